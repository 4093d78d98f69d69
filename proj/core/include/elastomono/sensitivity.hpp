#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elastomono/mesh.hpp"
#include "elastomono/ntd.hpp"

namespace elastomono {

// Sensitivity matrices of one region B:
//   (Tλ)_ij = ∫_B div u_i div u_j,  (Tμ)_ij = 2 ∫_B ∇ˢu_i : ∇ˢu_j,
//   (Tρ)_ij = ∫_B u_i · u_j,
// with u_l the background displacement for load g_l.
struct SensitivityTriplet {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd mu;
  Eigen::MatrixXd rho;

  Eigen::MatrixXd combined(double c_lambda, double c_mu, double c_rho) const {
    return c_lambda * lambda + c_mu * mu + c_rho * rho;
  }
  // Horizontal concatenation [Tλ | Tμ | Tρ].
  Eigen::MatrixXd concatenated() const;
  static SensitivityTriplet split(const Eigen::MatrixXd& concatenated);
};

struct SensitivityStack {
  std::vector<SensitivityTriplet> regions;
  std::vector<std::string> descriptors;
  std::string background_id;
  std::string region_set_id;

  std::size_t size() const noexcept { return regions.size(); }
  Index load_count() const noexcept {
    return regions.empty() ? 0 : static_cast<Index>(regions.front().lambda.rows());
  }
};

// Per-element strain and trace data of the background solutions; reused for
// any number of region sets.
class ElementSensitivityData {
 public:
  ElementSensitivityData(const Mesh& mesh, const ForwardSolutions& background);

  SensitivityTriplet region(const ElementWeights& weights) const;
  Index load_count() const noexcept { return m_; }
  const std::string& background_id() const noexcept { return background_id_; }

 private:
  Index m_ = 0;
  std::string background_id_;
  std::vector<double> area_;
  Eigen::MatrixXd divergence_;  // elements × m
  Eigen::MatrixXd strain_;      // 3·elements × m, rows (exx, eyy, √2·exy)
  Eigen::MatrixXd nodal_;       // 6·elements × m, vertex values (x then y)
};

SensitivityStack assemble_sensitivities(const Mesh& mesh, const ForwardSolutions& background,
                                        const RegionSet& regions, int jobs = 1);
SensitivityStack assemble_sensitivities(const ElementSensitivityData& data, const RegionSet& regions,
                                        int jobs = 1);

struct ParameterDirection {
  double lambda = 0.0;
  double mu = 0.0;
  double rho = 0.0;
};

// Galerkin matrix of the derivative of the NtD map at the background in the
// direction (cλ χ_B, cμ χ_B, cρ χ_B): −(cλ Tλ + cμ Tμ + cρ Tρ).
Eigen::MatrixXd frechet_form(const SensitivityTriplet& region, const ParameterDirection& direction);

// One file per region: header "sensitivity k=<k> m=<m> region=<descriptor>",
// followed by the λ, μ and ρ blocks.
void write_sensitivity(std::ostream& out, std::size_t k, const SensitivityTriplet& t, const std::string& descriptor);
SensitivityTriplet read_sensitivity(std::istream& in, std::string* descriptor = nullptr);
void write_stack(const std::string& directory, const SensitivityStack& stack);

}  // namespace elastomono
