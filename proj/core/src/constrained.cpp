#include "elastomono/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "elastomono/error.hpp"
#include "elastomono/parallel.hpp"

namespace elastomono {

BoxBounds compute_box_bounds(double lambda0, double mu0, double rho0, double lambda_min, double mu_min,
                             double rho_min) {
  for (double v : {lambda0, mu0, rho0, lambda_min, mu_min, rho_min}) {
    require(v > 0.0 && std::isfinite(v), ErrorKind::invalid_argument, "box-bound inputs must be positive");
  }
  auto bound = [](double p0, double pmin) { return p0 - p0 * p0 / (p0 + pmin); };
  BoxBounds b;
  b.a_max = bound(lambda0, lambda_min);
  b.b_max = bound(mu0, mu_min);
  b.c_max = bound(rho0, rho_min);
  require(b.a_max > 0.0, ErrorKind::invalid_argument, "λ bound underflows to zero");
  b.tau1 = b.b_max / b.a_max;
  b.tau2 = b.c_max / b.a_max;
  return b;
}

BetaBound::BetaBound(const Eigen::MatrixXd& u_pd) {
  require(u_pd.rows() == u_pd.cols() && u_pd.rows() > 0, ErrorKind::incompatible_operands,
          "matrix must be square and nonempty");
  llt_.compute(0.5 * (u_pd + u_pd.transpose()));
  require(llt_.info() == Eigen::Success, ErrorKind::not_positive_definite,
          "Cholesky factorization failed: matrix is not positive definite");
  const auto diag = llt_.matrixL().toDenseMatrix().diagonal();
  require((diag.array() > 0.0).all() && diag.allFinite(), ErrorKind::not_positive_definite,
          "Cholesky factorization failed: matrix is not positive definite");
}

double BetaBound::whitened_max_eigenvalue(const Eigen::MatrixXd& t) const {
  require(t.rows() == llt_.rows() && t.cols() == llt_.cols(), ErrorKind::incompatible_operands,
          "sensitivity matrix does not match the data matrix");
  // W = L⁻¹ T L⁻ᵀ
  Eigen::MatrixXd w = llt_.matrixL().solve(0.5 * (t + t.transpose()));
  w = llt_.matrixL().solve(w.transpose()).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::numerical_failure, "eigenvalue iteration did not converge");
  return es.eigenvalues().maxCoeff();
}

double BetaBound::operator()(const Eigen::MatrixXd& t, double cap, bool* capped) const {
  const double top = whitened_max_eigenvalue(t);
  const bool binds = top > 0.0 && 1.0 / top < cap;
  if (capped) *capped = !binds;
  return binds ? 1.0 / top : cap;
}

double compute_beta(const Eigen::MatrixXd& u_pd, const Eigen::MatrixXd& t, double cap) {
  return BetaBound(u_pd)(t, cap);
}

std::size_t CoefficientBox::capped_count() const {
  return static_cast<std::size_t>(std::count(capped.begin(), capped.end(), true));
}

namespace {

CoefficientBox make_box(const BetaBound& beta, std::size_t n, double limit, double cap_factor, int jobs,
                        const std::function<Eigen::MatrixXd(std::size_t)>& matrix) {
  CoefficientBox box;
  box.limit = limit;
  box.cap = cap_factor * limit;
  box.beta.assign(n, 0.0);
  box.upper.assign(n, 0.0);
  std::vector<char> capped(n, 0);
  parallel_for(n, jobs, [&](std::size_t k) {
    bool c = false;
    box.beta[k] = beta(matrix(k), box.cap, &c);
    box.upper[k] = std::min(limit, box.beta[k]);
    capped[k] = c;
  });
  box.capped.assign(capped.begin(), capped.end());
  return box;
}

}  // namespace

BoxConstraints single_support_constraints(const SensitivityStack& stack, const Eigen::MatrixXd& u_pd,
                                          const BoxBounds& bounds, double cap_factor, int jobs) {
  const BetaBound beta(u_pd);
  BoxConstraints c;
  c.bounds = bounds;
  c.zeta = make_box(beta, stack.size(), bounds.a_max, cap_factor, jobs, [&](std::size_t k) {
    return stack.regions[k].combined(1.0, bounds.tau1, bounds.tau2);
  });
  return c;
}

DisjointConstraints disjoint_support_constraints(const SensitivityStack& stack, const Eigen::MatrixXd& u_pd,
                                                 const BoxBounds& bounds, double cap_factor, int jobs) {
  const BetaBound beta(u_pd);
  DisjointConstraints c;
  c.bounds = bounds;
  c.boxes[0] = make_box(beta, stack.size(), bounds.a_max, cap_factor, jobs,
                        [&](std::size_t k) { return stack.regions[k].lambda; });
  c.boxes[1] = make_box(beta, stack.size(), bounds.b_max, cap_factor, jobs,
                        [&](std::size_t k) { return stack.regions[k].mu; });
  c.boxes[2] = make_box(beta, stack.size(), bounds.c_max, cap_factor, jobs,
                        [&](std::size_t k) { return stack.regions[k].rho; });
  return c;
}

namespace {

Eigen::VectorXd vectorize(const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

ReconstructionResult run_solver(const Eigen::MatrixXd& a, const Eigen::MatrixXd& gap, const Eigen::VectorXd& upper,
                                Eigen::Index columns, const SolverOptions& options) {
  const auto qp = solve_box_least_squares(a, vectorize(gap), upper, options);
  ReconstructionResult r;
  const auto n = qp.x.size() / columns;
  r.coefficients = Eigen::Map<const Eigen::MatrixXd>(qp.x.data(), n, columns);
  r.objective = qp.objective;
  r.projected_gradient_norm = qp.projected_gradient_norm;
  r.gradient_norm_at_zero = qp.gradient_norm_at_zero;
  r.iterations = qp.iterations;
  r.converged = qp.converged;
  r.objective_log = qp.objective_log;
  require(std::isfinite(r.objective), ErrorKind::numerical_failure, "objective is not finite");
  return r;
}

void check_stack(const SensitivityStack& stack, const Eigen::MatrixXd& gap, std::size_t box_size) {
  require(gap.rows() == gap.cols(), ErrorKind::incompatible_operands, "gap matrix must be square");
  require(stack.size() == 0 || stack.load_count() == gap.rows(), ErrorKind::incompatible_operands,
          "sensitivities and gap matrix use different numbers of loads");
  require(box_size == stack.size(), ErrorKind::incompatible_operands, "constraints do not match the pixel set");
}

}  // namespace

ReconstructionResult minimize_single_support(const SensitivityStack& stack, const Eigen::MatrixXd& gap,
                                             const BoxConstraints& constraints, const SolverOptions& options) {
  check_stack(stack, gap, constraints.zeta.upper.size());
  const auto n = static_cast<Eigen::Index>(stack.size());
  Eigen::MatrixXd a(gap.size(), n);
  const auto& b = constraints.bounds;
  for (Eigen::Index k = 0; k < n; ++k) a.col(k) = vectorize(stack.regions[k].combined(1.0, b.tau1, b.tau2));
  const Eigen::VectorXd upper = Eigen::Map<const Eigen::VectorXd>(constraints.zeta.upper.data(), n);
  return run_solver(a, gap, upper, 1, options);
}

ReconstructionResult minimize_disjoint_supports(const SensitivityStack& stack, const Eigen::MatrixXd& gap,
                                                const DisjointConstraints& constraints,
                                                const SolverOptions& options) {
  for (const auto& box : constraints.boxes) check_stack(stack, gap, box.upper.size());
  const auto n = static_cast<Eigen::Index>(stack.size());
  Eigen::MatrixXd a(gap.size(), 3 * n);
  Eigen::VectorXd upper(3 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a.col(k) = vectorize(stack.regions[k].lambda);
    a.col(n + k) = vectorize(stack.regions[k].mu);
    a.col(2 * n + k) = vectorize(stack.regions[k].rho);
    for (int p = 0; p < 3; ++p) upper[p * n + k] = constraints.boxes[p].upper[k];
  }
  return run_solver(a, gap, upper, 3, options);
}

std::vector<bool> threshold_support(const Eigen::VectorXd& values, double fraction) {
  require(fraction > 0.0 && fraction < 1.0, ErrorKind::invalid_argument, "threshold fraction must lie in (0,1)");
  require(values.allFinite(), ErrorKind::numerical_failure, "coefficients are not finite");
  std::vector<bool> mask(values.size(), false);
  const double top = values.size() ? values.maxCoeff() : 0.0;
  if (!(top > 0.0)) return mask;
  for (Eigen::Index k = 0; k < values.size(); ++k) mask[k] = values[k] >= fraction * top;
  return mask;
}

void apply_threshold(ReconstructionResult& result, double fraction) {
  result.masks.clear();
  for (Eigen::Index c = 0; c < result.coefficients.cols(); ++c) {
    result.masks.push_back(threshold_support(result.coefficients.col(c), fraction));
  }
  result.threshold = fraction;
}

double residual_objective(const std::vector<Eigen::MatrixXd>& matrices, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& gap) {
  require(static_cast<Eigen::Index>(matrices.size()) == x.size(), ErrorKind::incompatible_operands,
          "coefficient count does not match matrix count");
  Eigen::MatrixXd r = -gap;
  for (std::size_t k = 0; k < matrices.size(); ++k) r += x[static_cast<Eigen::Index>(k)] * matrices[k];
  return r.squaredNorm();
}

}  // namespace elastomono
