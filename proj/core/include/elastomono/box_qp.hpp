#pragma once

#include <vector>

#include <Eigen/Core>

namespace elastomono {

struct SolverOptions {
  double tolerance = 1e-8;  // relative projected-gradient norm
  int max_iterations = 5000;
  bool accelerate = true;
  // Every `polish_interval` iterations, try an exact least-squares step on
  // the current free variables. 0 disables it.
  int polish_interval = 25;
};

struct BoxQpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double projected_gradient_norm = 0.0;
  double gradient_norm_at_zero = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_log;  // objective after each iteration, starting at x = 0
};

// Minimizes ‖A x − d‖² subject to 0 ≤ x ≤ upper by projected gradient
// (monotone accelerated variant) with step 1/L, L from power iteration on
// AᵀA. Every iterate is feasible and the objective never increases.
BoxQpResult solve_box_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& d,
                                    const Eigen::VectorXd& upper, const SolverOptions& options = {});

// Norm of the gradient with components pushing outward at active bounds
// removed.
double projected_gradient_norm(const Eigen::VectorXd& gradient, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& upper);

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration(const Eigen::MatrixXd& symmetric, int iterations = 300);

}  // namespace elastomono
