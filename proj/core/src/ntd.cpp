#include "elastomono/ntd.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "elastomono/error.hpp"
#include "elastomono/matrix_io.hpp"

namespace elastomono {

LoadBasis build_load_basis(const Mesh& mesh, const BoundaryPatchSet& patches) {
  require(patches.size() >= 1, ErrorKind::invalid_patch, "empty patch set");
  LoadBasis basis;
  const auto m = static_cast<Index>(patches.size());
  basis.rhs.resize(mesh.dof_count(), m);
  for (Index l = 0; l < m; ++l) {
    const auto& patch = patches.patches[l];
    require(patch.length > 0.0 && !patch.edges.empty(), ErrorKind::invalid_patch,
            "patch " + std::to_string(l) + " has zero length");
    const double scale = 1.0 / std::sqrt(patch.length);
    BoundaryLoad load;
    for (Index edge : patch.edges) {
      const auto& be = mesh.boundary_edges()[edge];
      require(be.side != Side::top, ErrorKind::invalid_patch, "patch touches the clamped side");
      load.push_back({edge, scale * outward_normal(be.side)});
    }
    basis.rhs.col(l) = neumann_rhs(mesh, load);
    basis.loads.push_back(std::move(load));
  }
  // Edgewise-constant loads: the Gram matrix is exact as a sum over edges.
  basis.gram = Eigen::MatrixXd::Zero(m, m);
  std::vector<std::vector<std::pair<Index, Point>>> by_edge(mesh.boundary_edges().size());
  for (Index l = 0; l < m; ++l) {
    for (const auto& item : basis.loads[l]) by_edge[item.edge].emplace_back(l, item.traction);
  }
  for (std::size_t e = 0; e < by_edge.size(); ++e) {
    const double len = mesh.edge_length(mesh.boundary_edges()[e]);
    for (const auto& [i, gi] : by_edge[e]) {
      for (const auto& [j, gj] : by_edge[e]) basis.gram(i, j) += len * gi.dot(gj);
    }
  }
  std::ostringstream id;
  id << "n" << mesh.node_count() << "e" << mesh.element_count() << "m" << m;
  basis.id = id.str();
  return basis;
}

ForwardSolutions solve_basis(const StiffnessSystem& system, const LoadBasis& basis, std::string material_id,
                             int jobs) {
  require(system.dof_count() == basis.rhs.rows(), ErrorKind::incompatible_operands,
          "load basis and stiffness system live on different meshes");
  return {system.solve_columns(basis.rhs, jobs), std::move(material_id), basis.id};
}

ForwardSolutions solve_basis(const Mesh& mesh, const MaterialField& material, const LoadBasis& basis, int jobs) {
  const StiffnessSystem system(mesh, material);
  return solve_basis(system, basis, material.fingerprint(), jobs);
}

NtDMatrix ntd_from_solutions(const LoadBasis& basis, const ForwardSolutions& solutions) {
  require(solutions.basis_id == basis.id, ErrorKind::incompatible_operands, "solutions belong to another basis");
  const Eigen::MatrixXd trace = basis.rhs.transpose() * solutions.displacements;
  NtDMatrix ntd;
  ntd.values = 0.5 * (trace + trace.transpose());
  ntd.material_id = solutions.material_id;
  ntd.basis_id = basis.id;
  return ntd;
}

NtdAssembly assemble_ntd(const Mesh& mesh, const MaterialField& material, const LoadBasis& basis, int jobs) {
  const StiffnessSystem system(mesh, material);
  NtdAssembly out;
  out.solutions = solve_basis(system, basis, material.fingerprint(), jobs);
  out.ntd = ntd_from_solutions(basis, out.solutions);
  const Eigen::MatrixXd& u = out.solutions.displacements;
  out.volume_form = u.transpose() * (system.matrix() * u);
  const double scale = out.ntd.values.cwiseAbs().maxCoeff();
  out.cross_check = scale > 0.0 ? (out.volume_form - out.ntd.values).cwiseAbs().maxCoeff() / scale : 0.0;
  require(std::isfinite(out.cross_check) && out.cross_check <= 1e-9, ErrorKind::numerical_failure,
          "boundary and volume forms of the NtD matrix disagree");
  return out;
}

Eigen::MatrixXd gap_matrix(const NtDMatrix& background, const NtDMatrix& truth) {
  require(background.size() == truth.size() && background.basis_id == truth.basis_id,
          ErrorKind::incompatible_operands, "NtD matrices were built on different load bases");
  return background.values - truth.values;
}

NoisySample add_noise(const Eigen::MatrixXd& clean, double delta, std::uint64_t seed) {
  require(delta >= 0.0 && std::isfinite(delta), ErrorKind::invalid_argument, "noise level must be nonnegative");
  NoisySample sample;
  sample.relative_level = delta;
  sample.seed = seed;
  sample.noisy = clean;
  sample.perturbation = Eigen::MatrixXd::Zero(clean.rows(), clean.cols());
  if (delta == 0.0) return sample;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd e(clean.rows(), clean.cols());
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    for (Eigen::Index i = 0; i < e.rows(); ++i) e(i, j) = normal(rng);
  }
  const Eigen::MatrixXd s = 0.5 * (e + e.transpose());
  sample.perturbation = (delta * clean.norm() / s.norm()) * s;
  sample.noisy = clean + sample.perturbation;
  sample.absolute_norm = sample.perturbation.norm();
  return sample;
}

void write_ntd(std::ostream& out, const NtDMatrix& ntd) {
  out << "ntd m=" << ntd.size() << " material=" << (ntd.material_id.empty() ? "-" : ntd.material_id)
      << " basis=" << (ntd.basis_id.empty() ? "-" : ntd.basis_id) << " seed=" << ntd.seed << '\n';
  write_matrix_rows(out, ntd.values);
}

NtDMatrix read_ntd(std::istream& in) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), ErrorKind::io, "empty NtD file");
  std::istringstream fields(header);
  std::string tag, token;
  fields >> tag;
  require(tag == "ntd", ErrorKind::io, "not an NtD matrix file");
  NtDMatrix ntd;
  Index m = -1;
  while (fields >> token) {
    const auto eq = token.find('=');
    require(eq != std::string::npos, ErrorKind::io, "malformed NtD header field '" + token + "'");
    const auto key = token.substr(0, eq);
    auto value = token.substr(eq + 1);
    if (value == "-") value.clear();
    if (key == "m") m = std::stoi(value);
    else if (key == "material") ntd.material_id = value;
    else if (key == "basis") ntd.basis_id = value;
    else if (key == "seed") ntd.seed = std::stoull(value);
  }
  require(m > 0, ErrorKind::io, "NtD header lacks the matrix size");
  ntd.values = read_matrix_rows(in, m, m);
  return ntd;
}

}  // namespace elastomono
