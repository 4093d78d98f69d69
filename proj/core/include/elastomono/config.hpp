#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "elastomono/box_qp.hpp"
#include "elastomono/mesh.hpp"
#include "elastomono/phantom.hpp"
#include "elastomono/tsvd.hpp"

namespace elastomono {

enum class Method { mono_test, constrained, combined };
enum class SupportModel { single, disjoint };

std::string_view to_string(Method m);
std::string_view to_string(SupportModel s);

struct ExperimentConfig {
  // [mesh]
  int subdivisions = 51;
  TriangulationScheme scheme = TriangulationScheme::right_diagonal;
  int data_subdivisions = 0;  // 0: synthesize data on the reconstruction mesh

  // [measurements]
  int patches = 19;

  // [pixels]
  int pixels_x = 17;
  int pixels_y = 17;

  // [balls]
  int balls_per_side = 10;
  double ball_radius = 0.05;

  // [background], [contrast]
  Background background{1.0, 1.0, 1.0};
  Background contrast{2.0, 2.0, 2.0};

  // [bounds]; unset minima default to contrast − background.
  std::optional<double> lambda_min;
  std::optional<double> mu_min;
  std::optional<double> rho_min;

  // [phantom]
  Phantom phantom;

  // [noise]
  double delta = 0.0;
  std::uint64_t seed = 1;
  std::optional<double> shift;  // unset: realized absolute noise norm

  // [method]
  Method method = Method::constrained;
  SupportModel support = SupportModel::single;
  double threshold = 0.5;

  // [tsvd]
  double tau = 0.99;
  EnergyCriterion criterion = EnergyCriterion::linear;
  TruncationScope scope = TruncationScope::per_region;

  // [solver]
  SolverOptions solver;
  double beta_cap_factor = 1e6;

  // [output]
  std::string output_directory = "out";

  double effective_lambda_min() const { return lambda_min.value_or(contrast.lambda - background.lambda); }
  double effective_mu_min() const { return mu_min.value_or(contrast.mu - background.mu); }
  double effective_rho_min() const { return rho_min.value_or(contrast.rho - background.rho); }
};

// Default phantom: one disc of radius 0.15 at the centre carrying the
// contrast values in all three parameters.
Phantom default_phantom(const Background& contrast);

// Line-oriented "key = value" text with [section] headers and '#'
// comments. Throws Error(config) on unknown keys or malformed values.
ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& config);

void validate_config(const ExperimentConfig& config);

std::string format_shape(const PhantomShape& shape);
PhantomShape parse_shape(std::string_view text);

}  // namespace elastomono
