#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "elastomono/mesh.hpp"

namespace elastomono {

// Piecewise-constant Lamé parameters and density, one value per element.
struct MaterialField {
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> rho;

  static MaterialField uniform(Index elements, double lambda, double mu, double rho);

  std::size_t size() const noexcept { return lambda.size(); }

  // Throws invalid_material unless every value is finite and positive and
  // all three fields have `elements` entries.
  void validate(Index elements) const;

  MaterialField scaled(double factor) const;
  std::string fingerprint() const;
};

// Nodal displacements, interleaved as (ux0, uy0, ux1, uy1, ...).
struct DisplacementField {
  Eigen::VectorXd values;

  Point at(Index node) const { return {values[2 * node], values[2 * node + 1]}; }
};

struct EdgeTraction {
  Index edge = 0;  // index into Mesh::boundary_edges()
  Point traction{0.0, 0.0};
};

// Piecewise-constant surface load on boundary edges.
using BoundaryLoad = std::vector<EdgeTraction>;

Eigen::VectorXd neumann_rhs(const Mesh& mesh, const BoundaryLoad& load);

// Load vector for a smooth traction field on the loaded sides, by 3-point
// Gauss quadrature per edge.
Eigen::VectorXd traction_rhs(const Mesh& mesh, const std::function<Point(const Point&, Side)>& traction);

// Volume source term. Used only for manufactured-solution checks; the
// reconstruction paths never add one.
Eigen::VectorXd body_force_rhs(const Mesh& mesh, const std::function<Point(const Point&)>& force);

// Gradients of the three P1 hat functions on an element (rows: vertices).
Eigen::Matrix<double, 3, 2> hat_gradients(const Mesh& mesh, Index element);

// Element strain of a nodal field: divergence and the symmetric gradient
// (exx, eyy, exy).
struct ElementStrain {
  double divergence = 0.0;
  double exx = 0.0;
  double eyy = 0.0;
  double exy = 0.0;

  double contract(const ElementStrain& other) const {
    return exx * other.exx + eyy * other.eyy + 2.0 * exy * other.exy;
  }
};

ElementStrain element_strain(const Eigen::Matrix<double, 3, 2>& grads, const Mesh& mesh, Index element,
                             const Eigen::Ref<const Eigen::VectorXd>& u);

// Assembled bilinear form
//   a(v, w) = ∫ λ div v div w + 2μ ∇ˢv : ∇ˢw + ρ v·w dx
// over all nodal DOFs, together with a Cholesky factorization of the block
// acting on the unclamped DOFs. Immutable once constructed; solves may run
// concurrently.
class StiffnessSystem {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double>;
  using Factor = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower>;

  StiffnessSystem(const Mesh& mesh, const MaterialField& material);

  const SparseMatrix& matrix() const noexcept { return full_; }
  Index dof_count() const noexcept { return static_cast<Index>(full_.rows()); }
  Index free_dof_count() const noexcept { return static_cast<Index>(free_dofs_.size()); }
  const std::vector<Index>& free_dofs() const noexcept { return free_dofs_; }

  double form(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;

  // Solves a(u, v) = rhs·v for all admissible v. Clamped components of the
  // right-hand side are ignored and the corresponding entries of u are zero.
  DisplacementField solve(const Eigen::VectorXd& rhs) const;

  // One solve per column, spread over `jobs` threads.
  Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& rhs, int jobs = 1) const;

 private:
  SparseMatrix full_;
  std::vector<Index> free_dofs_;
  std::shared_ptr<const Factor> factor_;
};

}  // namespace elastomono

namespace elastomono {

// ∫ cλ (div u)² + 2 cμ |∇ˢu|² + cρ |u|² dx for arbitrary (possibly signed)
// per-element coefficients; the mass part uses the exact P1 mass matrix.
double weighted_energy(const Mesh& mesh, const MaterialField& coefficients, const Eigen::VectorXd& u);

}  // namespace elastomono
