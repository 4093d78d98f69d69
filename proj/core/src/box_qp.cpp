#include "elastomono/box_qp.hpp"

#include <cmath>

#include <Eigen/QR>

#include "elastomono/error.hpp"

namespace elastomono {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& upper) {
  return x.cwiseMax(0.0).cwiseMin(upper);
}

}  // namespace

double projected_gradient_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& x, const Eigen::VectorXd& upper) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (x[i] <= 0.0) gi = std::min(gi, 0.0);
    if (x[i] >= upper[i]) gi = std::max(gi, 0.0);
    sum += gi * gi;
  }
  return std::sqrt(sum);
}

double power_iteration(const Eigen::MatrixXd& a, int iterations) {
  if (a.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = a * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

BoxQpResult solve_box_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& d, const Eigen::VectorXd& upper,
                                    const SolverOptions& options) {
  require(A.rows() == d.size() && A.cols() == upper.size(), ErrorKind::incompatible_operands,
          "least-squares operands have inconsistent sizes");
  require((upper.array() >= 0.0).all(), ErrorKind::invalid_argument, "upper bounds must be nonnegative");
  const auto n = A.cols();

  auto objective = [&](const Eigen::VectorXd& x) { return (A * x - d).squaredNorm(); };
  auto gradient = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * (A.transpose() * (A * x - d)); };

  BoxQpResult out;
  out.x = Eigen::VectorXd::Zero(n);
  double fx = objective(out.x);
  require(std::isfinite(fx), ErrorKind::numerical_failure, "objective is not finite");
  out.objective_log.push_back(fx);
  Eigen::VectorXd g = gradient(out.x);
  out.gradient_norm_at_zero = g.norm();
  const double stop = options.tolerance * (1.0 + out.gradient_norm_at_zero);
  out.projected_gradient_norm = projected_gradient_norm(g, out.x, upper);
  if (n == 0 || out.projected_gradient_norm <= stop) {
    out.objective = fx;
    out.converged = true;
    return out;
  }

  // Slight overestimate keeps the step inside the descent region when the
  // power iteration has not fully converged.
  const double lipschitz = 2.0 * power_iteration(A.transpose() * A) * 1.01;
  require(lipschitz > 0.0 && std::isfinite(lipschitz), ErrorKind::numerical_failure,
          "cannot bound the gradient Lipschitz constant");

  Eigen::VectorXd x = out.x, y = out.x;
  double t = 1.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd z = project(y - gradient(y) / lipschitz, upper);
    const double fz = objective(z);
    require(std::isfinite(fz), ErrorKind::numerical_failure, "objective is not finite");
    Eigen::VectorXd next = x;
    if (fz <= fx) {
      next = z;
      fx = fz;
    }
    if (options.accelerate) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      if (fz > fx) {
        y = next;  // restart momentum after a rejected step
        t = 1.0;
      } else {
        y = next + (t / t_next) * (z - next) + ((t - 1.0) / t_next) * (next - x);
        t = t_next;
      }
    } else {
      y = next;
    }
    x = std::move(next);

    if (options.polish_interval > 0 && it % options.polish_interval == 0) {
      const Eigen::VectorXd gx = gradient(x);
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lower = x[i] <= 0.0 && gx[i] > 0.0;
        const bool at_upper = x[i] >= upper[i] && gx[i] < 0.0;
        if (!at_lower && !at_upper) free.push_back(i);
      }
      if (!free.empty()) {
        Eigen::MatrixXd af(A.rows(), static_cast<Eigen::Index>(free.size()));
        for (std::size_t k = 0; k < free.size(); ++k) af.col(static_cast<Eigen::Index>(k)) = A.col(free[k]);
        const Eigen::VectorXd step_free = af.completeOrthogonalDecomposition().solve(d - A * x);
        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k < free.size(); ++k) step[free[k]] = step_free[static_cast<Eigen::Index>(k)];
        if (step.allFinite()) {
          for (double s = 1.0; s > 1e-6; s *= 0.5) {
            Eigen::VectorXd trial = project(x + s * step, upper);
            const double ft = objective(trial);
            if (ft < fx) {
              x = std::move(trial);
              fx = ft;
              y = x;
              t = 1.0;
              break;
            }
          }
        }
      }
    }

    out.objective_log.push_back(fx);
    out.iterations = it;
    out.projected_gradient_norm = projected_gradient_norm(gradient(x), x, upper);
    if (out.projected_gradient_norm <= stop) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  out.objective = fx;
  return out;
}

}  // namespace elastomono
