#pragma once

#include <optional>
#include <vector>

#include "elastomono/elasticity.hpp"
#include "elastomono/mesh.hpp"

namespace elastomono {

enum class Parameter { lambda, mu, rho };

struct Background {
  double lambda = 1.0;
  double mu = 1.0;
  double rho = 1.0;
};

// A shape and the values it assigns inside itself; unset values keep the
// background.
struct PhantomShape {
  Region region;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<double> rho;

  bool perturbs(Parameter p) const;
  std::optional<double> value(Parameter p) const;
};

struct Phantom {
  std::vector<PhantomShape> shapes;
};

// Throws invalid_phantom for shapes not strictly inside the unit square,
// nonpositive values or shapes that perturb nothing.
void validate_phantom(const Phantom& phantom);

// Element value = shape value iff the element centroid lies in the shape
// (later shapes win), background otherwise. Also rejects phantoms whose
// unperturbed region is not connected to the boundary.
MaterialField build_phantom_material(const Mesh& mesh, const Background& background, const Phantom& phantom);

// Pixel k is in the truth iff its centre lies in a shape perturbing `p`
// (any parameter when p is empty).
std::vector<bool> rasterize_truth(const Phantom& phantom, const PixelGrid& grid,
                                  std::optional<Parameter> p = std::nullopt);

// |mask ∩ truth| / |mask ∪ truth|, 1 when both are empty.
double score_jaccard(const std::vector<bool>& mask, const std::vector<bool>& truth);

}  // namespace elastomono
