#include "elastomono/sensitivity.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "elastomono/elasticity.hpp"
#include "elastomono/error.hpp"
#include "elastomono/matrix_io.hpp"
#include "elastomono/parallel.hpp"

namespace elastomono {

Eigen::MatrixXd SensitivityTriplet::concatenated() const {
  Eigen::MatrixXd c(lambda.rows(), 3 * lambda.cols());
  c << lambda, mu, rho;
  return c;
}

SensitivityTriplet SensitivityTriplet::split(const Eigen::MatrixXd& c) {
  require(c.cols() == 3 * c.rows(), ErrorKind::incompatible_operands, "expected an m x 3m block matrix");
  const auto m = c.rows();
  return {c.leftCols(m), c.middleCols(m, m), c.rightCols(m)};
}

ElementSensitivityData::ElementSensitivityData(const Mesh& mesh, const ForwardSolutions& background)
    : m_(static_cast<Index>(background.displacements.cols())), background_id_(background.material_id) {
  const auto& u = background.displacements;
  require(u.rows() == mesh.dof_count(), ErrorKind::incompatible_operands,
          "background solutions do not match the mesh");
  const Index ne = mesh.element_count();
  area_ = mesh.element_areas();
  divergence_.resize(ne, m_);
  strain_.resize(3 * static_cast<Eigen::Index>(ne), m_);
  nodal_.resize(6 * static_cast<Eigen::Index>(ne), m_);
  const double root2 = std::sqrt(2.0);
  for (Index e = 0; e < ne; ++e) {
    const auto g = hat_gradients(mesh, e);
    const auto& t = mesh.triangles()[e];
    for (Index l = 0; l < m_; ++l) {
      const auto s = element_strain(g, mesh, e, u.col(l));
      divergence_(e, l) = s.divergence;
      strain_(3 * e, l) = s.exx;
      strain_(3 * e + 1, l) = s.eyy;
      strain_(3 * e + 2, l) = root2 * s.exy;
      for (int a = 0; a < 3; ++a) {
        nodal_(6 * e + a, l) = u(2 * t[a], l);
        nodal_(6 * e + 3 + a, l) = u(2 * t[a] + 1, l);
      }
    }
  }
}

SensitivityTriplet ElementSensitivityData::region(const ElementWeights& weights) const {
  // Each block is RᵀR with R stacking sqrt(weight·area)-scaled element rows.
  const auto n = static_cast<Eigen::Index>(weights.size());
  Eigen::MatrixXd rl(n, m_), rm(3 * n, m_), rr(8 * n, m_);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Index e = weights[k].element;
    const double wa = weights[k].weight * area_[e];
    const double s = std::sqrt(wa);
    rl.row(k) = s * divergence_.row(e);
    rm.middleRows(3 * k, 3) = (std::sqrt(2.0) * s) * strain_.middleRows(3 * static_cast<Eigen::Index>(e), 3);
    // P1 mass matrix (area/12)(I + 11ᵀ) per component.
    const double sm = std::sqrt(wa / 12.0);
    for (int c = 0; c < 2; ++c) {
      const auto vals = nodal_.middleRows(6 * static_cast<Eigen::Index>(e) + 3 * c, 3);
      rr.middleRows(8 * k + 4 * c, 3) = sm * vals;
      rr.row(8 * k + 4 * c + 3) = sm * vals.colwise().sum();
    }
  }
  SensitivityTriplet t;
  t.lambda = Eigen::MatrixXd::Zero(m_, m_);
  t.mu = Eigen::MatrixXd::Zero(m_, m_);
  t.rho = Eigen::MatrixXd::Zero(m_, m_);
  if (n == 0) return t;
  t.lambda.selfadjointView<Eigen::Lower>().rankUpdate(rl.transpose());
  t.mu.selfadjointView<Eigen::Lower>().rankUpdate(rm.transpose());
  t.rho.selfadjointView<Eigen::Lower>().rankUpdate(rr.transpose());
  for (auto* mat : {&t.lambda, &t.mu, &t.rho}) {
    *mat = mat->selfadjointView<Eigen::Lower>();
  }
  return t;
}

SensitivityStack assemble_sensitivities(const ElementSensitivityData& data, const RegionSet& regions, int jobs) {
  SensitivityStack stack;
  stack.background_id = data.background_id();
  stack.region_set_id = regions.id;
  stack.regions.resize(regions.size());
  stack.descriptors.resize(regions.size());
  parallel_for(regions.size(), jobs, [&](std::size_t k) {
    stack.regions[k] = data.region(regions.weights[k]);
    stack.descriptors[k] = describe(regions.regions[k]);
  });
  return stack;
}

SensitivityStack assemble_sensitivities(const Mesh& mesh, const ForwardSolutions& background,
                                        const RegionSet& regions, int jobs) {
  return assemble_sensitivities(ElementSensitivityData(mesh, background), regions, jobs);
}

Eigen::MatrixXd frechet_form(const SensitivityTriplet& region, const ParameterDirection& d) {
  return -region.combined(d.lambda, d.mu, d.rho);
}

void write_sensitivity(std::ostream& out, std::size_t k, const SensitivityTriplet& t, const std::string& descriptor) {
  out << "sensitivity k=" << k << " m=" << t.lambda.rows() << " region=" << descriptor << '\n';
  write_matrix_rows(out, t.lambda);
  write_matrix_rows(out, t.mu);
  write_matrix_rows(out, t.rho);
}

SensitivityTriplet read_sensitivity(std::istream& in, std::string* descriptor) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)) && header.rfind("sensitivity ", 0) == 0, ErrorKind::io,
          "not a sensitivity file");
  const auto mpos = header.find(" m=");
  const auto rpos = header.find(" region=");
  require(mpos != std::string::npos && rpos != std::string::npos, ErrorKind::io, "malformed sensitivity header");
  const auto m = std::stol(header.substr(mpos + 3, rpos - mpos - 3));
  if (descriptor) *descriptor = header.substr(rpos + 8);
  SensitivityTriplet t;
  t.lambda = read_matrix_rows(in, m, m);
  t.mu = read_matrix_rows(in, m, m);
  t.rho = read_matrix_rows(in, m, m);
  return t;
}

void write_stack(const std::string& directory, const SensitivityStack& stack) {
  for (std::size_t k = 0; k < stack.size(); ++k) {
    std::ostringstream name, body;
    name << directory << "/region_" << std::setw(4) << std::setfill('0') << k << ".txt";
    write_sensitivity(body, k, stack.regions[k], stack.descriptors[k]);
    write_file(name.str(), body.str());
  }
}

}  // namespace elastomono
