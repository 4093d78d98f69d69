#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "elastomono/config.hpp"
#include "elastomono/constrained.hpp"
#include "elastomono/monotonicity_test.hpp"
#include "elastomono/ntd.hpp"
#include "elastomono/sensitivity.hpp"
#include "elastomono/tsvd.hpp"

namespace elastomono {

// Everything the noise-free part of an experiment produces: reconstruction
// mesh and basis, background solutions, the clean gap matrix and the
// sensitivity stacks on pixels and test balls.
struct ForwardData {
  Mesh mesh;
  BoundaryPatchSet patches;
  LoadBasis basis;
  MaterialField background_material;
  MaterialField truth_material;  // on the data mesh when one is used
  NtdAssembly background;        // on the reconstruction mesh
  NtDMatrix data_background;     // Λ̄₀ on the data mesh
  NtDMatrix data_truth;          // Λ̄ on the data mesh
  Eigen::MatrixXd gap;           // U = Λ̄₀ − Λ̄
  PixelGrid pixels;
  TestBallSet balls;
  SensitivityStack pixel_stack;
  SensitivityStack ball_stack;
  std::optional<Mesh> data_mesh;
};

ForwardData generate_forward_data(const ExperimentConfig& config, int jobs = 1);

// Gap data as seen by the inversion: U^δ and the PD matrix U^δ + shift·I
// (U itself for δ = 0).
struct Measurement {
  Eigen::MatrixXd gap;
  Eigen::MatrixXd gap_pd;
  double delta = 0.0;
  double shift = 0.0;
  std::uint64_t seed = 0;
  NoisySample noise;
};

Measurement measure(const Eigen::MatrixXd& clean_gap, double delta, std::uint64_t seed,
                    std::optional<double> shift = std::nullopt);

struct MonoTestOutcome {
  TestConstants constants;
  MarkedBallSet marked;
  std::vector<bool> raster;
  std::vector<bool> truth;
  double jaccard = 0.0;
};

MonoTestOutcome run_mono_test(const ExperimentConfig& config, const ForwardData& data, const Measurement& meas,
                              int jobs = 1);

struct ReconstructionOutcome {
  bool combined = false;
  SupportModel support = SupportModel::single;
  BoxBounds bounds;
  std::vector<CoefficientBox> boxes;  // ζ, or λ/μ/ρ for disjoint supports
  ReconstructionResult result;
  std::optional<TruncationReport> truncation;
  // Per-parameter pixel values (λ, μ, ρ) and thresholded masks.
  std::array<Eigen::VectorXd, 3> values;
  std::array<std::vector<bool>, 3> masks;
  std::array<std::vector<bool>, 3> truths;
  std::array<double, 3> jaccard{};
  // Jaccard of the union of the masks against the union truth.
  double jaccard_union = 0.0;
};

ReconstructionOutcome run_reconstruction(const ExperimentConfig& config, const ForwardData& data,
                                         const Measurement& meas, bool combined, int jobs = 1);

enum class Stage { forward, test, reconstruct, combined, score, all };

std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view name);

struct ExperimentSummary {
  std::vector<std::string> files;  // relative to the output directory, sorted
  std::vector<std::pair<std::string, double>> scores;
};

// Runs the stages up to `stage` and writes all artifacts below
// config.output_directory. Output is a pure function of the config.
// Errors are rethrown with the failing stage prefixed.
ExperimentSummary run_experiment(const ExperimentConfig& config, Stage stage, int jobs = 1);

}  // namespace elastomono
