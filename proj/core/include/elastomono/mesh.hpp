#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace elastomono {

using Index = std::int32_t;
using Point = Eigen::Vector2d;

enum class Side : std::uint8_t { left, right, bottom, top };

std::string_view to_string(Side side);
Side side_from_string(std::string_view name);
Point outward_normal(Side side);

enum class TriangulationScheme : std::uint8_t { right_diagonal, crossed };

struct BoundaryEdge {
  std::array<Index, 2> nodes{};
  Side side = Side::bottom;
  Index element = -1;
};

// Triangulated unit square. Top side {y=1} is clamped, the other three
// sides carry surface loads.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Point> nodes, std::vector<std::array<Index, 3>> triangles,
       std::vector<BoundaryEdge> boundary);

  static Mesh unit_square(int n, TriangulationScheme scheme = TriangulationScheme::right_diagonal);

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<std::array<Index, 3>>& triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_; }
  const std::vector<double>& element_areas() const noexcept { return areas_; }

  Index node_count() const noexcept { return static_cast<Index>(nodes_.size()); }
  Index element_count() const noexcept { return static_cast<Index>(triangles_.size()); }
  Index dof_count() const noexcept { return 2 * node_count(); }

  Point centroid(Index element) const;
  double edge_length(const BoundaryEdge& edge) const;
  double max_edge_length() const;
  double min_edge_length() const;

  // Nodes lying on a clamped edge.
  std::vector<bool> dirichlet_nodes() const;

  // Elements sharing an edge with `element`.
  std::vector<std::vector<Index>> element_neighbours() const;

 private:
  std::vector<Point> nodes_;
  std::vector<std::array<Index, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<double> areas_;
};

void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

// A run of consecutive loaded boundary edges.
struct Patch {
  std::vector<Index> edges;  // indices into Mesh::boundary_edges()
  double length = 0.0;
  double start = 0.0;  // arclength coordinate along the loaded boundary
};

struct BoundaryPatchSet {
  std::vector<Patch> patches;
  std::vector<Index> dirichlet_edges;

  std::size_t size() const noexcept { return patches.size(); }
};

// Arclength coordinate of a point on the loaded boundary, walking
// counterclockwise from (0,1): down the left side, along the bottom, up the
// right side. Total length 3.
double loaded_boundary_coordinate(const Point& p, Side side);

BoundaryPatchSet partition_neumann_boundary(const Mesh& mesh, int m);

// Assigns edges to patches by the arclength breakpoints of `reference`;
// used to carry a patch layout onto a refined mesh.
BoundaryPatchSet partition_like(const Mesh& mesh, const BoundaryPatchSet& reference);

// Regions

struct Disc {
  Point center{0.0, 0.0};
  double radius = 0.0;
  bool contains(const Point& p) const;
};

struct Ellipse {
  Point center{0.0, 0.0};
  Point semi_axes{0.0, 0.0};
  bool contains(const Point& p) const;
};

// Half-open box [lo, hi).
struct Box {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};
  bool contains(const Point& p) const;
};

struct WholeDomain {
  bool contains(const Point&) const { return true; }
};

using Region = std::variant<Disc, Ellipse, Box, WholeDomain>;

bool contains(const Region& region, const Point& p);
std::array<double, 4> bounding_box(const Region& region);  // xmin, ymin, xmax, ymax
std::string describe(const Region& region);

struct ElementWeight {
  Index element = 0;
  double weight = 0.0;
};

using ElementWeights = std::vector<ElementWeight>;

// Fraction of each element inside `region`, from centroid membership of 16
// congruent subtriangles. Elements with zero weight are omitted.
ElementWeights region_quadrature_weights(const Mesh& mesh, const Region& region);

double weighted_area(const Mesh& mesh, const ElementWeights& weights);

struct RegionSet {
  std::string id;
  std::vector<Region> regions;
  std::vector<ElementWeights> weights;

  std::size_t size() const noexcept { return regions.size(); }
};

RegionSet make_region_set(const Mesh& mesh, std::string id, std::vector<Region> regions);

struct PixelGrid {
  int nx = 0;
  int ny = 0;
  RegionSet cells;  // row-major, row 0 at y = 0

  Point center(std::size_t k) const;
  std::size_t size() const noexcept { return cells.size(); }
};

PixelGrid make_pixel_grid(const Mesh& mesh, int nx, int ny);

struct TestBallSet {
  int per_side = 0;
  double radius = 0.0;
  RegionSet balls;

  const Disc& ball(std::size_t k) const { return std::get<Disc>(balls.regions[k]); }
  std::size_t size() const noexcept { return balls.size(); }
};

// per_side^2 balls centred on a uniform grid.
TestBallSet make_test_balls(const Mesh& mesh, int per_side, double radius);

}  // namespace elastomono
