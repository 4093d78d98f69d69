#pragma once

#include <vector>

#include <Eigen/Core>

#include "elastomono/ntd.hpp"
#include "elastomono/sensitivity.hpp"

namespace elastomono {

struct TestConstants {
  double lambda = 0.0;
  double mu = 0.0;
  double rho = 0.0;

  double sum() const noexcept { return lambda + mu + rho; }
};

struct ParameterPair {
  double background = 1.0;
  double inclusion = 1.0;
};

// Largest admissible constants C = (p0/p1)(p1 − p0) per parameter.
TestConstants admissible_constants(ParameterPair lambda, ParameterPair mu, ParameterPair rho);

struct MarkedBallSet {
  std::vector<bool> inside;
  std::vector<double> min_eigenvalue;
  std::vector<double> tolerance;  // per-ball threshold the eigenvalue was compared against
  bool strict = false;            // noisy test: eigenvalues must exceed zero

  std::size_t count() const;
};

// Marks ball B iff U − (Cλ Tλ_B + Cμ Tμ_B + Cρ Tρ_B) has no eigenvalue below
// −1e-10·‖·‖₂.
MarkedBallSet linearized_test_noiseless(const Eigen::MatrixXd& gap, const SensitivityStack& balls,
                                        const TestConstants& constants, int jobs = 1);

// Marks ball B iff every eigenvalue of −C·T_B + U^δ + shift·I is positive,
// where U^δ is the noisy gap matrix (the negative of the noisy difference
// Λ̄ − Λ̄₀).
MarkedBallSet linearized_test_noisy(const NoisySample& noisy_gap, const SensitivityStack& balls,
                                    const TestConstants& constants, double shift, int jobs = 1);

// Rasterizes ball flags onto a pixel grid: each pixel takes the flag of the
// nearest ball centre.
std::vector<bool> rasterize_marked(const MarkedBallSet& marked, const TestBallSet& balls, const PixelGrid& grid);

}  // namespace elastomono
