#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elastomono/elasticity.hpp"
#include "elastomono/mesh.hpp"

namespace elastomono {

// Orthonormal surface loads, one per patch: the outward normal scaled to
// unit L² norm on its patch.
struct LoadBasis {
  std::vector<BoundaryLoad> loads;
  Eigen::MatrixXd rhs;   // nodal load vectors, one column per load
  Eigen::MatrixXd gram;  // ∫ g_i·g_j ds
  std::string id;

  Index size() const noexcept { return static_cast<Index>(loads.size()); }
};

LoadBasis build_load_basis(const Mesh& mesh, const BoundaryPatchSet& patches);

// Displacements u^{g_l} for every basis load, one column per load.
struct ForwardSolutions {
  Eigen::MatrixXd displacements;
  std::string material_id;
  std::string basis_id;
};

ForwardSolutions solve_basis(const Mesh& mesh, const MaterialField& material, const LoadBasis& basis,
                             int jobs = 1);
ForwardSolutions solve_basis(const StiffnessSystem& system, const LoadBasis& basis, std::string material_id,
                             int jobs = 1);

// Galerkin projection of the Neumann-to-Dirichlet operator onto the span of
// the load basis.
struct NtDMatrix {
  Eigen::MatrixXd values;
  std::string material_id;
  std::string basis_id;
  std::uint64_t seed = 0;

  Index size() const noexcept { return static_cast<Index>(values.rows()); }
};

struct NtdAssembly {
  NtDMatrix ntd;                 // boundary-trace form ∫ g_i·u^{g_j} ds
  Eigen::MatrixXd volume_form;   // a(u^{g_i}, u^{g_j})
  ForwardSolutions solutions;
  double cross_check = 0.0;      // max relative deviation between the two forms
};

// Both forms are computed and must agree to 1e-9 relative; otherwise a
// numerical-failure error is raised.
NtdAssembly assemble_ntd(const Mesh& mesh, const MaterialField& material, const LoadBasis& basis,
                         int jobs = 1);

NtDMatrix ntd_from_solutions(const LoadBasis& basis, const ForwardSolutions& solutions);

// U = Λ̄(background) − Λ̄(true).
Eigen::MatrixXd gap_matrix(const NtDMatrix& background, const NtDMatrix& truth);

struct NoisySample {
  Eigen::MatrixXd noisy;
  Eigen::MatrixXd perturbation;
  double relative_level = 0.0;
  double absolute_norm = 0.0;  // ‖perturbation‖_F
  std::uint64_t seed = 0;
};

// noisy = clean + delta·‖clean‖_F·S/‖S‖_F with S the symmetric part of a
// standard-normal matrix drawn from `seed`. The direction S depends only on
// the seed and the size.
NoisySample add_noise(const Eigen::MatrixXd& clean, double delta, std::uint64_t seed);

void write_ntd(std::ostream& out, const NtDMatrix& ntd);
NtDMatrix read_ntd(std::istream& in);

}  // namespace elastomono
