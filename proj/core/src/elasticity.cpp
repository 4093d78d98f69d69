#include "elastomono/elasticity.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "elastomono/error.hpp"
#include "elastomono/parallel.hpp"

namespace elastomono {

MaterialField MaterialField::uniform(Index elements, double lambda, double mu, double rho) {
  MaterialField m;
  m.lambda.assign(elements, lambda);
  m.mu.assign(elements, mu);
  m.rho.assign(elements, rho);
  return m;
}

void MaterialField::validate(Index elements) const {
  const auto n = static_cast<std::size_t>(elements);
  require(lambda.size() == n && mu.size() == n && rho.size() == n, ErrorKind::invalid_material,
          "material field size does not match the mesh");
  for (std::size_t e = 0; e < n; ++e) {
    const bool ok = std::isfinite(lambda[e]) && std::isfinite(mu[e]) && std::isfinite(rho[e]) &&
                    lambda[e] > 0.0 && mu[e] > 0.0 && rho[e] > 0.0;
    require(ok, ErrorKind::invalid_material, "nonpositive material value on element " + std::to_string(e));
  }
}

MaterialField MaterialField::scaled(double factor) const {
  MaterialField m = *this;
  for (auto* field : {&m.lambda, &m.mu, &m.rho}) {
    for (double& v : *field) v *= factor;
  }
  return m;
}

std::string MaterialField::fingerprint() const {
  // FNV-1a over the raw bytes.
  std::uint64_t h = 1469598103934665603ull;
  for (const auto* field : {&lambda, &mu, &rho}) {
    for (double v : *field) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
      }
    }
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

Eigen::VectorXd neumann_rhs(const Mesh& mesh, const BoundaryLoad& load) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.dof_count());
  for (const auto& item : load) {
    const auto& edge = mesh.boundary_edges().at(item.edge);
    const double half = 0.5 * mesh.edge_length(edge);
    for (Index node : edge.nodes) {
      f[2 * node] += half * item.traction.x();
      f[2 * node + 1] += half * item.traction.y();
    }
  }
  return f;
}

Eigen::VectorXd traction_rhs(const Mesh& mesh, const std::function<Point(const Point&, Side)>& traction) {
  static const double offset = 0.5 * std::sqrt(3.0 / 5.0);
  static const double points[3] = {0.5 - offset, 0.5, 0.5 + offset};
  static const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.dof_count());
  for (const auto& edge : mesh.boundary_edges()) {
    if (edge.side == Side::top) continue;
    const Point& a = mesh.nodes()[edge.nodes[0]];
    const Point& b = mesh.nodes()[edge.nodes[1]];
    const double len = (b - a).norm();
    for (int q = 0; q < 3; ++q) {
      const Point t = traction(a + points[q] * (b - a), edge.side);
      const double wa = weights[q] * len * (1.0 - points[q]);
      const double wb = weights[q] * len * points[q];
      f.segment<2>(2 * edge.nodes[0]) += wa * t;
      f.segment<2>(2 * edge.nodes[1]) += wb * t;
    }
  }
  return f;
}

Eigen::VectorXd body_force_rhs(const Mesh& mesh, const std::function<Point(const Point&)>& force) {
  // Degree-5 seven-point rule (barycentric coordinates, weights sum to 1).
  struct Rule {
    double l1, l2, w;
  };
  static const Rule rule[7] = {
      {1.0 / 3.0, 1.0 / 3.0, 0.225},
      {0.0597158717897698, 0.4701420641051151, 0.1323941527885062},
      {0.4701420641051151, 0.0597158717897698, 0.1323941527885062},
      {0.4701420641051151, 0.4701420641051151, 0.1323941527885062},
      {0.7974269853530873, 0.1012865073234563, 0.1259391805448271},
      {0.1012865073234563, 0.7974269853530873, 0.1259391805448271},
      {0.1012865073234563, 0.1012865073234563, 0.1259391805448271},
  };
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.dof_count());
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    const Point& a = mesh.nodes()[t[0]];
    const Point& b = mesh.nodes()[t[1]];
    const Point& c = mesh.nodes()[t[2]];
    const double area = mesh.element_areas()[e];
    for (const auto& q : rule) {
      const double l3 = 1.0 - q.l1 - q.l2;
      const Point x = q.l1 * a + q.l2 * b + l3 * c;
      const Point v = force(x) * (q.w * area);
      f.segment<2>(2 * t[0]) += q.l1 * v;
      f.segment<2>(2 * t[1]) += q.l2 * v;
      f.segment<2>(2 * t[2]) += l3 * v;
    }
  }
  return f;
}

Eigen::Matrix<double, 3, 2> hat_gradients(const Mesh& mesh, Index element) {
  const auto& t = mesh.triangles()[element];
  const Point& a = mesh.nodes()[t[0]];
  const Point& b = mesh.nodes()[t[1]];
  const Point& c = mesh.nodes()[t[2]];
  const double inv = 1.0 / (2.0 * mesh.element_areas()[element]);
  Eigen::Matrix<double, 3, 2> g;
  g << b.y() - c.y(), c.x() - b.x(),  //
      c.y() - a.y(), a.x() - c.x(),   //
      a.y() - b.y(), b.x() - a.x();
  return g * inv;
}

ElementStrain element_strain(const Eigen::Matrix<double, 3, 2>& grads, const Mesh& mesh, Index element,
                             const Eigen::Ref<const Eigen::VectorXd>& u) {
  const auto& t = mesh.triangles()[element];
  ElementStrain s;
  for (int a = 0; a < 3; ++a) {
    const double ux = u[2 * t[a]];
    const double uy = u[2 * t[a] + 1];
    s.exx += ux * grads(a, 0);
    s.eyy += uy * grads(a, 1);
    s.exy += 0.5 * (ux * grads(a, 1) + uy * grads(a, 0));
  }
  s.divergence = s.exx + s.eyy;
  return s;
}

StiffnessSystem::StiffnessSystem(const Mesh& mesh, const MaterialField& material) {
  material.validate(mesh.element_count());
  const Index ndof = mesh.dof_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.element_count()) * 36);

  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    const auto g = hat_gradients(mesh, e);
    const double area = mesh.element_areas()[e];
    const double lam = material.lambda[e], mu = material.mu[e], rho = material.rho[e];

    // Voigt strain (exx, eyy, 2exy).
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    for (int a = 0; a < 3; ++a) {
      B(0, 2 * a) = g(a, 0);
      B(1, 2 * a + 1) = g(a, 1);
      B(2, 2 * a) = g(a, 1);
      B(2, 2 * a + 1) = g(a, 0);
    }
    Eigen::Matrix3d D;
    D << lam + 2 * mu, lam, 0,  //
        lam, lam + 2 * mu, 0,   //
        0, 0, mu;
    Eigen::Matrix<double, 6, 6> K = area * B.transpose() * D * B;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double m = rho * area / 12.0 * (a == b ? 2.0 : 1.0);
        K(2 * a, 2 * b) += m;
        K(2 * a + 1, 2 * b + 1) += m;
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        triplets.emplace_back(2 * t[i / 2] + i % 2, 2 * t[j / 2] + j % 2, K(i, j));
      }
    }
  }
  full_.resize(ndof, ndof);
  full_.setFromTriplets(triplets.begin(), triplets.end());

  const auto pinned = mesh.dirichlet_nodes();
  std::vector<Index> reduced(ndof, -1);
  for (Index node = 0; node < mesh.node_count(); ++node) {
    if (pinned[node]) continue;
    for (int c = 0; c < 2; ++c) {
      reduced[2 * node + c] = static_cast<Index>(free_dofs_.size());
      free_dofs_.push_back(2 * node + c);
    }
  }
  std::vector<Eigen::Triplet<double>> free_triplets;
  free_triplets.reserve(triplets.size());
  for (int k = 0; k < full_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(full_, k); it; ++it) {
      const Index r = reduced[it.row()], c = reduced[it.col()];
      if (r >= 0 && c >= 0) free_triplets.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix free(free_dofs_.size(), free_dofs_.size());
  free.setFromTriplets(free_triplets.begin(), free_triplets.end());

  auto factor = std::make_shared<Factor>(free);
  require(factor->info() == Eigen::Success, ErrorKind::factorization_failure,
          "stiffness matrix is not positive definite");
  factor_ = std::move(factor);
}

double StiffnessSystem::form(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
  return v.dot(full_ * w);
}

DisplacementField StiffnessSystem::solve(const Eigen::VectorXd& rhs) const {
  require(rhs.size() == dof_count(), ErrorKind::incompatible_operands, "right-hand side has wrong length");
  Eigen::VectorXd b(free_dofs_.size());
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) b[i] = rhs[free_dofs_[i]];
  const Eigen::VectorXd x = factor_->solve(b);
  require(x.allFinite(), ErrorKind::numerical_failure, "forward solve produced non-finite values");
  DisplacementField u{Eigen::VectorXd::Zero(dof_count())};
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) u.values[free_dofs_[i]] = x[i];
  return u;
}

Eigen::MatrixXd StiffnessSystem::solve_columns(const Eigen::MatrixXd& rhs, int jobs) const {
  Eigen::MatrixXd u(rhs.rows(), rhs.cols());
  parallel_for(static_cast<std::size_t>(rhs.cols()), jobs, [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    u.col(col) = solve(rhs.col(col)).values;
  });
  return u;
}

}  // namespace elastomono

namespace elastomono {

double weighted_energy(const Mesh& mesh, const MaterialField& c, const Eigen::VectorXd& u) {
  double total = 0.0;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    const auto s = element_strain(hat_gradients(mesh, e), mesh, e, u);
    const double area = mesh.element_areas()[e];
    double mass = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
      const double v0 = u[2 * t[0] + comp], v1 = u[2 * t[1] + comp], v2 = u[2 * t[2] + comp];
      const double sum = v0 + v1 + v2;
      mass += area / 12.0 * (v0 * v0 + v1 * v1 + v2 * v2 + sum * sum);
    }
    total += area * (c.lambda[e] * s.divergence * s.divergence + 2.0 * c.mu[e] * s.contract(s)) +
             c.rho[e] * mass;
  }
  return total;
}

}  // namespace elastomono
