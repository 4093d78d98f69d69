#pragma once

#include <iosfwd>

#include <Eigen/Core>

#include "elastomono/constrained.hpp"
#include "elastomono/sensitivity.hpp"

namespace elastomono {

enum class EnergyCriterion {
  linear,   // Σ_{i≤l} σ_i / Σ σ_i ≥ τ
  squared,  // Σ_{i≤l} σ_i² / Σ σ_i² ≥ τ
};

enum class TruncationScope {
  per_region,  // truncate each [Tλ_k | Tμ_k | Tρ_k] separately
  global,      // truncate the assembled m² × 3L system
};

struct TsvdDecomposition {
  Eigen::VectorXd singular_values;  // positive singular values, descending
  Eigen::MatrixXd left;             // leading singular vectors (columns)
  Eigen::MatrixXd right;
  int retained = 0;
  double tau = 0.0;
  EnergyCriterion criterion = EnergyCriterion::linear;

  int rank() const noexcept { return static_cast<int>(singular_values.size()); }
  Eigen::MatrixXd truncated() const;
  // Cumulative energy fraction after each singular value.
  Eigen::VectorXd energy_profile() const;
};

// Retains the smallest l whose cumulative energy fraction reaches tau.
TsvdDecomposition tsvd(const Eigen::MatrixXd& a, double tau, EnergyCriterion criterion = EnergyCriterion::linear);

// Smallest l with cumulative fraction ≥ tau over the given descending values.
int retained_rank(const Eigen::VectorXd& singular_values, double tau, EnergyCriterion criterion);

struct TruncationReport {
  std::vector<int> retained;  // per region (or a single entry for the global scope)
  std::vector<int> rank;
  std::vector<Eigen::VectorXd> spectra;
};

SensitivityStack truncate_sensitivity_stack(const SensitivityStack& stack, double tau,
                                            EnergyCriterion criterion = EnergyCriterion::linear,
                                            TruncationScope scope = TruncationScope::per_region,
                                            TruncationReport* report = nullptr, int jobs = 1);

// Constrained reconstruction with the truncated matrices in the residual;
// the constraints must come from the untruncated stack.
ReconstructionResult combined_reconstruct(const SensitivityStack& truncated, const Eigen::MatrixXd& gap,
                                          const BoxConstraints& constraints, const SolverOptions& options = {});
ReconstructionResult combined_reconstruct(const SensitivityStack& truncated, const Eigen::MatrixXd& gap,
                                          const DisjointConstraints& constraints, const SolverOptions& options = {});

// CSV rows "k,i,sigma,retained".
void write_spectra_csv(std::ostream& out, const TruncationReport& report);

}  // namespace elastomono
