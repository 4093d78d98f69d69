#include "elastomono/tsvd.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/SVD>

#include "elastomono/error.hpp"
#include "elastomono/matrix_io.hpp"
#include "elastomono/parallel.hpp"

namespace elastomono {

Eigen::MatrixXd TsvdDecomposition::truncated() const {
  const auto l = static_cast<Eigen::Index>(retained);
  return left.leftCols(l) * singular_values.head(l).asDiagonal() * right.leftCols(l).transpose();
}

Eigen::VectorXd TsvdDecomposition::energy_profile() const {
  Eigen::VectorXd w = criterion == EnergyCriterion::squared ? Eigen::VectorXd(singular_values.array().square())
                                                            : singular_values;
  Eigen::VectorXd profile(w.size());
  double run = 0.0;
  const double total = w.sum();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    run += w[i];
    profile[i] = run / total;
  }
  return profile;
}

int retained_rank(const Eigen::VectorXd& s, double tau, EnergyCriterion criterion) {
  const Eigen::VectorXd w = criterion == EnergyCriterion::squared ? Eigen::VectorXd(s.array().square()) : s;
  const double total = w.sum();
  double run = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    run += w[i];
    if (run >= tau * total) return static_cast<int>(i + 1);
  }
  return static_cast<int>(w.size());
}

TsvdDecomposition tsvd(const Eigen::MatrixXd& a, double tau, EnergyCriterion criterion) {
  require(tau > 0.0 && tau < 1.0, ErrorKind::invalid_argument, "energy threshold must lie in (0,1)");
  require(a.size() > 0 && a.allFinite(), ErrorKind::degenerate_input, "matrix is empty or not finite");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  require(s.size() > 0 && s[0] > 0.0, ErrorKind::degenerate_input, "zero matrix has no truncated SVD");
  const double floor = s[0] * static_cast<double>(std::max(a.rows(), a.cols())) *
                       std::numeric_limits<double>::epsilon();
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > floor) ++r;
  TsvdDecomposition d;
  d.singular_values = s.head(r);
  d.left = svd.matrixU().leftCols(r);
  d.right = svd.matrixV().leftCols(r);
  d.tau = tau;
  d.criterion = criterion;
  d.retained = retained_rank(d.singular_values, tau, criterion);
  return d;
}

SensitivityStack truncate_sensitivity_stack(const SensitivityStack& stack, double tau, EnergyCriterion criterion,
                                            TruncationScope scope, TruncationReport* report, int jobs) {
  SensitivityStack out = stack;
  const auto n = stack.size();
  if (scope == TruncationScope::per_region) {
    std::vector<int> retained(n, 0), rank(n, 0);
    std::vector<Eigen::VectorXd> spectra(n);
    parallel_for(n, jobs, [&](std::size_t k) {
      const Eigen::MatrixXd c = stack.regions[k].concatenated();
      if (c.cwiseAbs().maxCoeff() == 0.0) return;  // empty region stays zero
      const auto d = tsvd(c, tau, criterion);
      out.regions[k] = SensitivityTriplet::split(d.truncated());
      retained[k] = d.retained;
      rank[k] = d.rank();
      spectra[k] = d.singular_values;
    });
    if (report) *report = {std::move(retained), std::move(rank), std::move(spectra)};
    return out;
  }

  const auto m = static_cast<Eigen::Index>(stack.load_count());
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd system(m * m, 3 * nn);
  for (Eigen::Index k = 0; k < nn; ++k) {
    const auto& t = stack.regions[k];
    system.col(k) = Eigen::Map<const Eigen::VectorXd>(t.lambda.data(), m * m);
    system.col(nn + k) = Eigen::Map<const Eigen::VectorXd>(t.mu.data(), m * m);
    system.col(2 * nn + k) = Eigen::Map<const Eigen::VectorXd>(t.rho.data(), m * m);
  }
  const auto d = tsvd(system, tau, criterion);
  const Eigen::MatrixXd reduced = d.truncated();
  for (Eigen::Index k = 0; k < nn; ++k) {
    auto& t = out.regions[k];
    t.lambda = Eigen::Map<const Eigen::MatrixXd>(reduced.col(k).data(), m, m);
    t.mu = Eigen::Map<const Eigen::MatrixXd>(reduced.col(nn + k).data(), m, m);
    t.rho = Eigen::Map<const Eigen::MatrixXd>(reduced.col(2 * nn + k).data(), m, m);
  }
  if (report) *report = {{d.retained}, {d.rank()}, {d.singular_values}};
  return out;
}

ReconstructionResult combined_reconstruct(const SensitivityStack& truncated, const Eigen::MatrixXd& gap,
                                          const BoxConstraints& constraints, const SolverOptions& options) {
  return minimize_single_support(truncated, gap, constraints, options);
}

ReconstructionResult combined_reconstruct(const SensitivityStack& truncated, const Eigen::MatrixXd& gap,
                                          const DisjointConstraints& constraints, const SolverOptions& options) {
  return minimize_disjoint_supports(truncated, gap, constraints, options);
}

void write_spectra_csv(std::ostream& out, const TruncationReport& report) {
  out << "k,i,sigma,retained\n";
  for (std::size_t k = 0; k < report.spectra.size(); ++k) {
    const auto& s = report.spectra[k];
    const int kept = k < report.retained.size() ? report.retained[k] : 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      out << k << ',' << i << ',' << format_double(s[i]) << ',' << (i < kept ? 1 : 0) << '\n';
    }
  }
}

}  // namespace elastomono
