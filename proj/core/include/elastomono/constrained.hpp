#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "elastomono/box_qp.hpp"
#include "elastomono/sensitivity.hpp"

namespace elastomono {

// a_max = λ₀ − λ₀²/(λ₀ + λ_min) and likewise b_max (μ), c_max (ρ);
// τ₁ = b_max/a_max, τ₂ = c_max/a_max.
struct BoxBounds {
  double a_max = 0.0;
  double b_max = 0.0;
  double c_max = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

BoxBounds compute_box_bounds(double lambda0, double mu0, double rho0, double lambda_min, double mu_min,
                             double rho_min);

// β = max{a > 0 : U − a·T ⪰ 0} for a fixed SPD matrix U, by whitening with
// the Cholesky factor of U. Construct once per U and query per region.
class BetaBound {
 public:
  explicit BetaBound(const Eigen::MatrixXd& u_pd);

  // Returns `cap` when the whitened T has no positive eigenvalue (the
  // constraint never binds).
  double operator()(const Eigen::MatrixXd& t, double cap, bool* capped = nullptr) const;

  // Largest eigenvalue of L⁻¹ T L⁻ᵀ.
  double whitened_max_eigenvalue(const Eigen::MatrixXd& t) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

double compute_beta(const Eigen::MatrixXd& u_pd, const Eigen::MatrixXd& t, double cap);

struct CoefficientBox {
  double limit = 0.0;  // a_max, b_max or c_max
  double cap = 0.0;
  std::vector<double> beta;
  std::vector<double> upper;  // min(limit, beta_k)
  std::vector<bool> capped;

  std::size_t capped_count() const;
};

// Bounds for the common-support unknown ζ (μ and ρ coefficients are τ₁ζ and
// τ₂ζ), with T_k = Tλ_k + τ₁Tμ_k + τ₂Tρ_k.
struct BoxConstraints {
  BoxBounds bounds;
  CoefficientBox zeta;
};

// Bounds for independent (α, β, γ) coefficients; each β bound uses the
// parameter's own sensitivity matrix.
struct DisjointConstraints {
  BoxBounds bounds;
  std::array<CoefficientBox, 3> boxes;  // λ, μ, ρ
};

// `u_pd` is U for noiseless data and U^δ + δI for noisy data.
BoxConstraints single_support_constraints(const SensitivityStack& stack, const Eigen::MatrixXd& u_pd,
                                          const BoxBounds& bounds, double cap_factor = 1e6, int jobs = 1);
DisjointConstraints disjoint_support_constraints(const SensitivityStack& stack, const Eigen::MatrixXd& u_pd,
                                                 const BoxBounds& bounds, double cap_factor = 1e6, int jobs = 1);

struct ReconstructionResult {
  // One row per pixel; one column (ζ) for the common-support problem,
  // three (α, β, γ) for disjoint supports.
  Eigen::MatrixXd coefficients;
  double objective = 0.0;
  double projected_gradient_norm = 0.0;
  double gradient_norm_at_zero = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_log;

  std::optional<double> threshold;
  std::vector<std::vector<bool>> masks;  // per column, filled by apply_threshold
};

ReconstructionResult minimize_single_support(const SensitivityStack& stack, const Eigen::MatrixXd& gap,
                                             const BoxConstraints& constraints, const SolverOptions& options = {});
ReconstructionResult minimize_disjoint_supports(const SensitivityStack& stack, const Eigen::MatrixXd& gap,
                                                const DisjointConstraints& constraints,
                                                const SolverOptions& options = {});

// Pixel k is marked iff value_k ≥ fraction·max(values); empty when no value is
// positive.
std::vector<bool> threshold_support(const Eigen::VectorXd& values, double fraction);

// Thresholds every coefficient column and records the fraction.
void apply_threshold(ReconstructionResult& result, double fraction);

// Objective ‖Σ_k x_k T_k − U‖²_F for the given per-region matrices.
double residual_objective(const std::vector<Eigen::MatrixXd>& matrices, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& gap);

}  // namespace elastomono
