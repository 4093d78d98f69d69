#include "elastomono/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "elastomono/error.hpp"

namespace elastomono {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "?";
}

Side side_from_string(std::string_view name) {
  if (name == "left") return Side::left;
  if (name == "right") return Side::right;
  if (name == "bottom") return Side::bottom;
  if (name == "top") return Side::top;
  fail(ErrorKind::io, "unknown boundary side '" + std::string(name) + "'");
}

Point outward_normal(Side side) {
  switch (side) {
    case Side::left: return {-1.0, 0.0};
    case Side::right: return {1.0, 0.0};
    case Side::bottom: return {0.0, -1.0};
    case Side::top: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::pair<Index, Index> edge_key(Index a, Index b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<std::array<Index, 3>> triangles,
           std::vector<BoundaryEdge> boundary)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), boundary_(std::move(boundary)) {
  const auto n_nodes = static_cast<Index>(nodes_.size());
  areas_.reserve(triangles_.size());
  std::map<std::pair<Index, Index>, std::vector<Index>> owners;
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    const auto& t = triangles_[e];
    for (Index v : t) {
      require(v >= 0 && v < n_nodes, ErrorKind::invalid_argument, "triangle references missing node");
    }
    const double area = signed_area(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]);
    require(area > 0.0, ErrorKind::invalid_argument,
            "triangle " + std::to_string(e) + " is degenerate or clockwise");
    areas_.push_back(area);
    for (int k = 0; k < 3; ++k) {
      owners[edge_key(t[k], t[(k + 1) % 3])].push_back(static_cast<Index>(e));
    }
  }
  for (auto& edge : boundary_) {
    auto it = owners.find(edge_key(edge.nodes[0], edge.nodes[1]));
    require(it != owners.end() && it->second.size() == 1, ErrorKind::invalid_argument,
            "boundary edge does not belong to exactly one triangle");
    edge.element = it->second.front();
  }
}

Mesh Mesh::unit_square(int n, TriangulationScheme scheme) {
  require(n >= 2, ErrorKind::invalid_argument, "mesh needs at least 2 subdivisions per side");
  const double h = 1.0 / n;
  std::vector<Point> nodes;
  auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      nodes.emplace_back(i == n ? 1.0 : i * h, j == n ? 1.0 : j * h);
    }
  }
  std::vector<std::array<Index, 3>> triangles;
  if (scheme == TriangulationScheme::crossed) {
    const auto first_center = static_cast<Index>(nodes.size());
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) nodes.emplace_back((i + 0.5) * h, (j + 0.5) * h);
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
        const Index e = first_center + j * n + i;
        triangles.push_back({a, b, e});
        triangles.push_back({b, c, e});
        triangles.push_back({c, d, e});
        triangles.push_back({d, a, e});
      }
    }
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      }
    }
  }
  // Counterclockwise from (0,1).
  std::vector<BoundaryEdge> boundary;
  for (int j = n; j > 0; --j) boundary.push_back({{id(0, j), id(0, j - 1)}, Side::left, -1});
  for (int i = 0; i < n; ++i) boundary.push_back({{id(i, 0), id(i + 1, 0)}, Side::bottom, -1});
  for (int j = 0; j < n; ++j) boundary.push_back({{id(n, j), id(n, j + 1)}, Side::right, -1});
  for (int i = n; i > 0; --i) boundary.push_back({{id(i, n), id(i - 1, n)}, Side::top, -1});
  return Mesh(std::move(nodes), std::move(triangles), std::move(boundary));
}

Point Mesh::centroid(Index element) const {
  const auto& t = triangles_[element];
  return (nodes_[t[0]] + nodes_[t[1]] + nodes_[t[2]]) / 3.0;
}

double Mesh::edge_length(const BoundaryEdge& edge) const {
  return (nodes_[edge.nodes[1]] - nodes_[edge.nodes[0]]).norm();
}

double Mesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) h = std::max(h, (nodes_[t[k]] - nodes_[t[(k + 1) % 3]]).norm());
  }
  return h;
}

double Mesh::min_edge_length() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) h = std::min(h, (nodes_[t[k]] - nodes_[t[(k + 1) % 3]]).norm());
  }
  return h;
}

std::vector<bool> Mesh::dirichlet_nodes() const {
  std::vector<bool> pinned(nodes_.size(), false);
  for (const auto& edge : boundary_) {
    if (edge.side == Side::top) {
      pinned[edge.nodes[0]] = true;
      pinned[edge.nodes[1]] = true;
    }
  }
  return pinned;
}

std::vector<std::vector<Index>> Mesh::element_neighbours() const {
  std::map<std::pair<Index, Index>, std::vector<Index>> owners;
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    const auto& t = triangles_[e];
    for (int k = 0; k < 3; ++k) owners[edge_key(t[k], t[(k + 1) % 3])].push_back(static_cast<Index>(e));
  }
  std::vector<std::vector<Index>> neighbours(triangles_.size());
  for (const auto& [key, elems] : owners) {
    if (elems.size() == 2) {
      neighbours[elems[0]].push_back(elems[1]);
      neighbours[elems[1]].push_back(elems[0]);
    }
  }
  return neighbours;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "nodes " << mesh.node_count() << '\n';
  for (const auto& p : mesh.nodes()) buf << p.x() << ' ' << p.y() << '\n';
  buf << "triangles " << mesh.element_count() << '\n';
  for (const auto& t : mesh.triangles()) buf << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  buf << "boundary " << mesh.boundary_edges().size() << '\n';
  for (const auto& e : mesh.boundary_edges()) {
    buf << e.nodes[0] << ' ' << e.nodes[1] << ' ' << to_string(e.side) << '\n';
  }
  out << buf.str();
}

Mesh read_mesh(std::istream& in) {
  auto expect_section = [&in](const char* name) {
    std::string tag;
    std::size_t count = 0;
    if (!(in >> tag >> count) || tag != name) {
      fail(ErrorKind::io, std::string("mesh file: expected '") + name + "' section");
    }
    return count;
  };
  std::vector<Point> nodes(expect_section("nodes"));
  for (auto& p : nodes) {
    if (!(in >> p.x() >> p.y())) fail(ErrorKind::io, "mesh file: truncated node list");
  }
  std::vector<std::array<Index, 3>> triangles(expect_section("triangles"));
  for (auto& t : triangles) {
    if (!(in >> t[0] >> t[1] >> t[2])) fail(ErrorKind::io, "mesh file: truncated triangle list");
  }
  std::vector<BoundaryEdge> boundary(expect_section("boundary"));
  for (auto& e : boundary) {
    std::string side;
    if (!(in >> e.nodes[0] >> e.nodes[1] >> side)) fail(ErrorKind::io, "mesh file: truncated boundary list");
    e.side = side_from_string(side);
  }
  return Mesh(std::move(nodes), std::move(triangles), std::move(boundary));
}

// Patches

double loaded_boundary_coordinate(const Point& p, Side side) {
  switch (side) {
    case Side::left: return 1.0 - p.y();
    case Side::bottom: return 1.0 + p.x();
    case Side::right: return 2.0 + p.y();
    case Side::top: break;
  }
  fail(ErrorKind::invalid_argument, "the clamped side carries no arclength coordinate");
}

namespace {

BoundaryPatchSet partition_by_breakpoints(const Mesh& mesh, const std::vector<double>& breaks) {
  const auto m = breaks.size() - 1;
  BoundaryPatchSet set;
  set.patches.resize(m);
  struct Loaded {
    double mid;
    Index edge;
  };
  std::vector<Loaded> loaded;
  const auto& edges = mesh.boundary_edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (e.side == Side::top) {
      set.dirichlet_edges.push_back(static_cast<Index>(k));
      continue;
    }
    const Point mid = 0.5 * (mesh.nodes()[e.nodes[0]] + mesh.nodes()[e.nodes[1]]);
    loaded.push_back({loaded_boundary_coordinate(mid, e.side), static_cast<Index>(k)});
  }
  std::sort(loaded.begin(), loaded.end(), [](const Loaded& a, const Loaded& b) { return a.mid < b.mid; });
  std::size_t l = 0;
  for (const auto& item : loaded) {
    while (l + 1 < m && item.mid >= breaks[l + 1]) ++l;
    auto& patch = set.patches[l];
    const double len = mesh.edge_length(edges[item.edge]);
    if (patch.edges.empty()) patch.start = item.mid - 0.5 * len;
    patch.edges.push_back(item.edge);
    patch.length += len;
  }
  for (std::size_t p = 0; p < m; ++p) {
    require(!set.patches[p].edges.empty(), ErrorKind::invalid_argument,
            "patch " + std::to_string(p) + " received no boundary edges");
  }
  return set;
}

}  // namespace

BoundaryPatchSet partition_neumann_boundary(const Mesh& mesh, int m) {
  require(m >= 1, ErrorKind::invalid_argument, "patch count must be positive");
  const auto loaded = std::count_if(mesh.boundary_edges().begin(), mesh.boundary_edges().end(),
                                    [](const BoundaryEdge& e) { return e.side != Side::top; });
  require(m <= loaded, ErrorKind::invalid_argument,
          "patch count " + std::to_string(m) + " exceeds the " + std::to_string(loaded) +
              " loaded boundary edges");
  std::vector<double> breaks(m + 1);
  for (int l = 0; l <= m; ++l) breaks[l] = 3.0 * l / m;
  return partition_by_breakpoints(mesh, breaks);
}

BoundaryPatchSet partition_like(const Mesh& mesh, const BoundaryPatchSet& reference) {
  require(reference.size() >= 1, ErrorKind::invalid_argument, "reference patch set is empty");
  std::vector<double> breaks;
  for (const auto& p : reference.patches) breaks.push_back(p.start);
  breaks.push_back(3.0);
  return partition_by_breakpoints(mesh, breaks);
}

// Regions

bool Disc::contains(const Point& p) const { return (p - center).squaredNorm() < radius * radius; }

bool Ellipse::contains(const Point& p) const {
  const double dx = (p.x() - center.x()) / semi_axes.x();
  const double dy = (p.y() - center.y()) / semi_axes.y();
  return dx * dx + dy * dy < 1.0;
}

bool Box::contains(const Point& p) const {
  return p.x() >= lo.x() && p.x() < hi.x() && p.y() >= lo.y() && p.y() < hi.y();
}

bool contains(const Region& region, const Point& p) {
  return std::visit([&p](const auto& r) { return r.contains(p); }, region);
}

std::array<double, 4> bounding_box(const Region& region) {
  struct Visitor {
    std::array<double, 4> operator()(const Disc& d) const {
      return {d.center.x() - d.radius, d.center.y() - d.radius, d.center.x() + d.radius,
              d.center.y() + d.radius};
    }
    std::array<double, 4> operator()(const Ellipse& e) const {
      return {e.center.x() - e.semi_axes.x(), e.center.y() - e.semi_axes.y(),
              e.center.x() + e.semi_axes.x(), e.center.y() + e.semi_axes.y()};
    }
    std::array<double, 4> operator()(const Box& b) const { return {b.lo.x(), b.lo.y(), b.hi.x(), b.hi.y()}; }
    std::array<double, 4> operator()(const WholeDomain&) const { return {-1e300, -1e300, 1e300, 1e300}; }
  };
  return std::visit(Visitor{}, region);
}

std::string describe(const Region& region) {
  std::ostringstream s;
  s.precision(17);
  struct Visitor {
    std::ostringstream& s;
    void operator()(const Disc& d) { s << "disc " << d.center.x() << ' ' << d.center.y() << ' ' << d.radius; }
    void operator()(const Ellipse& e) {
      s << "ellipse " << e.center.x() << ' ' << e.center.y() << ' ' << e.semi_axes.x() << ' '
        << e.semi_axes.y();
    }
    void operator()(const Box& b) {
      s << "box " << b.lo.x() << ' ' << b.lo.y() << ' ' << b.hi.x() << ' ' << b.hi.y();
    }
    void operator()(const WholeDomain&) { s << "domain"; }
  };
  std::visit(Visitor{s}, region);
  return s.str();
}

namespace {

// Centroids of the 16 congruent subtriangles, in reference coordinates.
const std::array<std::array<double, 2>, 16>& subtriangle_centroids() {
  static const auto table = [] {
    std::array<std::array<double, 2>, 16> c{};
    std::size_t k = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; i + j < 4; ++j) c[k++] = {(i + 1.0 / 3.0) / 4.0, (j + 1.0 / 3.0) / 4.0};
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; i + j < 3; ++j) c[k++] = {(i + 2.0 / 3.0) / 4.0, (j + 2.0 / 3.0) / 4.0};
    }
    return c;
  }();
  return table;
}

}  // namespace

ElementWeights region_quadrature_weights(const Mesh& mesh, const Region& region) {
  ElementWeights weights;
  const auto box = bounding_box(region);
  const auto& nodes = mesh.nodes();
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles()[e];
    const Point& a = nodes[t[0]];
    const Point& b = nodes[t[1]];
    const Point& c = nodes[t[2]];
    const double xmin = std::min({a.x(), b.x(), c.x()}), xmax = std::max({a.x(), b.x(), c.x()});
    const double ymin = std::min({a.y(), b.y(), c.y()}), ymax = std::max({a.y(), b.y(), c.y()});
    if (xmax < box[0] || xmin > box[2] || ymax < box[1] || ymin > box[3]) continue;
    int inside = 0;
    for (const auto& rc : subtriangle_centroids()) {
      if (contains(region, a + rc[0] * (b - a) + rc[1] * (c - a))) ++inside;
    }
    if (inside > 0) weights.push_back({e, inside / 16.0});
  }
  return weights;
}

double weighted_area(const Mesh& mesh, const ElementWeights& weights) {
  double total = 0.0;
  for (const auto& w : weights) total += w.weight * mesh.element_areas()[w.element];
  return total;
}

RegionSet make_region_set(const Mesh& mesh, std::string id, std::vector<Region> regions) {
  RegionSet set;
  set.id = std::move(id);
  set.weights.reserve(regions.size());
  for (const auto& r : regions) set.weights.push_back(region_quadrature_weights(mesh, r));
  set.regions = std::move(regions);
  return set;
}

Point PixelGrid::center(std::size_t k) const {
  const auto ix = static_cast<int>(k % nx);
  const auto iy = static_cast<int>(k / nx);
  return {(ix + 0.5) / nx, (iy + 0.5) / ny};
}

PixelGrid make_pixel_grid(const Mesh& mesh, int nx, int ny) {
  require(nx >= 1 && ny >= 1, ErrorKind::invalid_argument, "pixel grid needs positive dimensions");
  std::vector<Region> cells;
  cells.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      cells.emplace_back(Box{{static_cast<double>(ix) / nx, static_cast<double>(iy) / ny},
                             {ix + 1 == nx ? 1.0 : static_cast<double>(ix + 1) / nx,
                              iy + 1 == ny ? 1.0 : static_cast<double>(iy + 1) / ny}});
    }
  }
  PixelGrid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.cells = make_region_set(mesh, "pixels " + std::to_string(nx) + "x" + std::to_string(ny), std::move(cells));
  return grid;
}

TestBallSet make_test_balls(const Mesh& mesh, int per_side, double radius) {
  require(per_side >= 1, ErrorKind::invalid_argument, "need at least one test ball per side");
  require(radius > 0.0, ErrorKind::invalid_argument, "test-ball radius must be positive");
  // An open ball lies in the open square iff its centre is at least `radius`
  // away from every side.
  require(radius <= 0.5 / per_side + 1e-15, ErrorKind::invalid_argument,
          "test balls of this radius leave the domain");
  std::vector<Region> balls;
  for (int iy = 0; iy < per_side; ++iy) {
    for (int ix = 0; ix < per_side; ++ix) {
      balls.emplace_back(Disc{{(ix + 0.5) / per_side, (iy + 0.5) / per_side}, radius});
    }
  }
  TestBallSet set;
  set.per_side = per_side;
  set.radius = radius;
  std::ostringstream id;
  id << "balls " << per_side << "x" << per_side << " r=" << radius;
  set.balls = make_region_set(mesh, id.str(), std::move(balls));
  return set;
}

}  // namespace elastomono
