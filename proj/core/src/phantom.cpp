#include "elastomono/phantom.hpp"

#include <cmath>
#include <deque>

#include "elastomono/error.hpp"

namespace elastomono {

bool PhantomShape::perturbs(Parameter p) const { return value(p).has_value(); }

std::optional<double> PhantomShape::value(Parameter p) const {
  switch (p) {
    case Parameter::lambda: return lambda;
    case Parameter::mu: return mu;
    case Parameter::rho: return rho;
  }
  return std::nullopt;
}

void validate_phantom(const Phantom& phantom) {
  for (std::size_t s = 0; s < phantom.shapes.size(); ++s) {
    const auto& shape = phantom.shapes[s];
    const auto tag = "shape " + std::to_string(s) + ": ";
    require(!std::holds_alternative<WholeDomain>(shape.region), ErrorKind::invalid_phantom,
            tag + "must be a bounded shape");
    if (const auto* d = std::get_if<Disc>(&shape.region)) {
      require(d->radius > 0.0, ErrorKind::invalid_phantom, tag + "radius must be positive");
    } else if (const auto* e = std::get_if<Ellipse>(&shape.region)) {
      require(e->semi_axes.x() > 0.0 && e->semi_axes.y() > 0.0, ErrorKind::invalid_phantom,
              tag + "semi-axes must be positive");
    } else if (const auto* b = std::get_if<Box>(&shape.region)) {
      require(b->hi.x() > b->lo.x() && b->hi.y() > b->lo.y(), ErrorKind::invalid_phantom, tag + "empty rectangle");
    }
    const auto bb = bounding_box(shape.region);
    require(bb[0] > 0.0 && bb[1] > 0.0 && bb[2] < 1.0 && bb[3] < 1.0, ErrorKind::invalid_phantom,
            tag + "must lie strictly inside the unit square");
    require(shape.lambda || shape.mu || shape.rho, ErrorKind::invalid_phantom, tag + "perturbs no parameter");
    for (const auto& v : {shape.lambda, shape.mu, shape.rho}) {
      require(!v || (*v > 0.0 && std::isfinite(*v)), ErrorKind::invalid_phantom, tag + "values must be positive");
    }
  }
}

MaterialField build_phantom_material(const Mesh& mesh, const Background& bg, const Phantom& phantom) {
  validate_phantom(phantom);
  auto material = MaterialField::uniform(mesh.element_count(), bg.lambda, bg.mu, bg.rho);
  std::vector<bool> support(mesh.element_count(), false);
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const Point c = mesh.centroid(e);
    for (const auto& shape : phantom.shapes) {
      if (!contains(shape.region, c)) continue;
      support[e] = true;
      if (shape.lambda) material.lambda[e] = *shape.lambda;
      if (shape.mu) material.mu[e] = *shape.mu;
      if (shape.rho) material.rho[e] = *shape.rho;
    }
  }

  // The unperturbed elements must all be reachable from the boundary.
  const auto neighbours = mesh.element_neighbours();
  std::vector<bool> reached(mesh.element_count(), false);
  std::deque<Index> queue;
  for (const auto& edge : mesh.boundary_edges()) {
    if (!support[edge.element] && !reached[edge.element]) {
      reached[edge.element] = true;
      queue.push_back(edge.element);
    }
  }
  while (!queue.empty()) {
    const Index e = queue.front();
    queue.pop_front();
    for (Index n : neighbours[e]) {
      if (!support[n] && !reached[n]) {
        reached[n] = true;
        queue.push_back(n);
      }
    }
  }
  for (Index e = 0; e < mesh.element_count(); ++e) {
    require(support[e] || reached[e], ErrorKind::invalid_phantom,
            "the complement of the phantom support is not connected to the boundary");
  }
  material.validate(mesh.element_count());
  return material;
}

std::vector<bool> rasterize_truth(const Phantom& phantom, const PixelGrid& grid, std::optional<Parameter> p) {
  std::vector<bool> truth(grid.size(), false);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point c = grid.center(k);
    for (const auto& shape : phantom.shapes) {
      if ((!p || shape.perturbs(*p)) && contains(shape.region, c)) truth[k] = true;
    }
  }
  return truth;
}

double score_jaccard(const std::vector<bool>& mask, const std::vector<bool>& truth) {
  require(mask.size() == truth.size(), ErrorKind::incompatible_operands, "mask and truth use different grids");
  std::size_t both = 0, either = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    both += mask[k] && truth[k];
    either += mask[k] || truth[k];
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace elastomono
