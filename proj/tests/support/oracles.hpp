#pragma once

// Independent reference computations used by the unit and acceptance
// suites. Nothing here calls into the library's assembly code.

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "elastomono/elasticity.hpp"
#include "elastomono/mesh.hpp"

namespace oracle {

using elastomono::Index;
using elastomono::Mesh;
using elastomono::Point;

// Fraction of a triangle inside `inside`, from centroid membership of the
// n² congruent subtriangles of a uniform n-fold edge subdivision.
inline double subdivided_fraction(const Point& a, const Point& b, const Point& c,
                                  const std::function<bool(const Point&)>& inside, int n) {
  const Point e1 = (b - a) / n;
  const Point e2 = (c - a) / n;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; i + j < n; ++j) {
      const Point p = a + i * e1 + j * e2;
      if (inside(p + (e1 + e2) / 3.0)) ++hits;
      if (i + j < n - 1 && inside(p + (2.0 * e1 + 2.0 * e2) / 3.0)) ++hits;
    }
  }
  return static_cast<double>(hits) / (n * n);
}

inline double subdivided_area(const Mesh& mesh, const std::function<bool(const Point&)>& inside, int n) {
  double area = 0.0;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    area += mesh.element_areas()[e] *
            subdivided_fraction(mesh.nodes()[t[0]], mesh.nodes()[t[1]], mesh.nodes()[t[2]], inside, n);
  }
  return area;
}

// ∫ λ div v div w + 2μ ε(v):ε(w) + ρ v·w on the mesh, with the gradient of
// the linear interpolant obtained by solving the 3×3 interpolation system
// and the mass term by the three-edge-midpoint rule (exact for quadratics).
inline double bilinear_form(const Mesh& mesh, const elastomono::MaterialField& mat, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& w) {
  double total = 0.0;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    Eigen::Matrix3d V;
    for (int r = 0; r < 3; ++r) V.row(r) << 1.0, mesh.nodes()[t[r]].x(), mesh.nodes()[t[r]].y();
    const Eigen::Matrix3d inv = V.inverse();
    auto grad = [&](const Eigen::VectorXd& u) {
      Eigen::Matrix2d g;  // g(i, j) = ∂u_i/∂x_j
      for (int i = 0; i < 2; ++i) {
        Eigen::Vector3d vals(u[2 * t[0] + i], u[2 * t[1] + i], u[2 * t[2] + i]);
        const Eigen::Vector3d coef = inv * vals;
        g(i, 0) = coef[1];
        g(i, 1) = coef[2];
      }
      return g;
    };
    const Eigen::Matrix2d gv = grad(v), gw = grad(w);
    const Eigen::Matrix2d ev = 0.5 * (gv + gv.transpose()), ew = 0.5 * (gw + gw.transpose());
    const double area = 0.5 * std::abs(V.determinant());
    double mass = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const Eigen::Vector2d vm(0.5 * (v[2 * a] + v[2 * b]), 0.5 * (v[2 * a + 1] + v[2 * b + 1]));
      const Eigen::Vector2d wm(0.5 * (w[2 * a] + w[2 * b]), 0.5 * (w[2 * a + 1] + w[2 * b + 1]));
      mass += vm.dot(wm) / 3.0;
    }
    total += area * (mat.lambda[e] * gv.trace() * gw.trace() + 2.0 * mat.mu[e] * (ev.array() * ew.array()).sum() +
                     mat.rho[e] * mass);
  }
  return total;
}

// max{a > 0 : λ_min(U − aT) ≥ 0} by bisection on (0, cap].
inline double bisection_beta(const Eigen::MatrixXd& u, const Eigen::MatrixXd& t, double cap) {
  auto feasible = [&](double a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u - a * t, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= 0.0;
  };
  if (feasible(cap)) return cap;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline Eigen::MatrixXd random_spd(int m, std::mt19937_64& rng, double floor = 0.1) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = n(rng);
  return a * a.transpose() + floor * Eigen::MatrixXd::Identity(m, m);
}

inline Eigen::MatrixXd random_psd(int m, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(m, rank);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = n(rng);
  return a * a.transpose();
}

inline double min_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double spectral_norm(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Per-element energy densities of a displacement field on a P1 mesh:
// (div u)², ε:ε and the exact P1 mass integral of |u|² (already multiplied by
// the element area).
struct ElementEnergies {
  std::vector<double> div2;
  std::vector<double> strain2;
  std::vector<double> mass;
};

inline ElementEnergies element_energies(const Mesh& mesh, const Eigen::VectorXd& u) {
  ElementEnergies out;
  const auto n = static_cast<std::size_t>(mesh.element_count());
  out.div2.resize(n);
  out.strain2.resize(n);
  out.mass.resize(n);
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    Eigen::Matrix3d V;
    for (int r = 0; r < 3; ++r) V.row(r) << 1.0, mesh.nodes()[t[r]].x(), mesh.nodes()[t[r]].y();
    const Eigen::Matrix3d inv = V.inverse();
    Eigen::Matrix2d g;
    for (int i = 0; i < 2; ++i) {
      const Eigen::Vector3d coef = inv * Eigen::Vector3d(u[2 * t[0] + i], u[2 * t[1] + i], u[2 * t[2] + i]);
      g(i, 0) = coef[1];
      g(i, 1) = coef[2];
    }
    const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
    const double area = 0.5 * std::abs(V.determinant());
    out.div2[e] = area * g.trace() * g.trace();
    out.strain2[e] = area * (eps.array() * eps.array()).sum();
    double m = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const Eigen::Vector2d mid(0.5 * (u[2 * a] + u[2 * b]), 0.5 * (u[2 * a + 1] + u[2 * b + 1]));
      m += mid.squaredNorm() / 3.0;
    }
    out.mass[e] = area * m;
  }
  return out;
}

}  // namespace oracle
