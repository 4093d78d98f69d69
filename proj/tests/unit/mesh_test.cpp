#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "elastomono/error.hpp"
#include "elastomono/mesh.hpp"
#include "oracles.hpp"

namespace em = elastomono;

namespace {

double total_area(const em::Mesh& m) {
  const auto& a = m.element_areas();
  return std::accumulate(a.begin(), a.end(), 0.0);
}

}  // namespace

TEST(Mesh, TwoByTwoRightDiagonal) {
  const auto m = em::Mesh::unit_square(2);
  EXPECT_EQ(m.element_count(), 8);
  EXPECT_EQ(m.node_count(), 9);
  EXPECT_NEAR(total_area(m), 1.0, 1e-12);
}

TEST(Mesh, CrossedSchemeCounts) {
  const auto m = em::Mesh::unit_square(51, em::TriangulationScheme::crossed);
  EXPECT_EQ(m.element_count(), 4 * 51 * 51);
  EXPECT_NEAR(total_area(m), 1.0, 1e-12);
}

TEST(Mesh, DefaultElementCount) {
  const auto m = em::Mesh::unit_square(51);
  EXPECT_EQ(m.element_count(), 5202);
  EXPECT_LT(std::abs(m.element_count() - 5248), 0.01 * 5248);
}

TEST(Mesh, RejectsTooFewSubdivisions) {
  try {
    (void)em::Mesh::unit_square(1);
    FAIL();
  } catch (const em::Error& e) {
    EXPECT_EQ(e.kind(), em::ErrorKind::invalid_argument);
  }
}

TEST(Mesh, InvariantsOverSizesAndSchemes) {
  for (auto scheme : {em::TriangulationScheme::right_diagonal, em::TriangulationScheme::crossed}) {
    for (int n : {2, 3, 7, 16}) {
      const auto m = em::Mesh::unit_square(n, scheme);
      EXPECT_NEAR(total_area(m), 1.0, 1e-12);
      for (double a : m.element_areas()) EXPECT_GT(a, 0.0);
      double boundary_length = 0.0;
      for (const auto& e : m.boundary_edges()) {
        boundary_length += m.edge_length(e);
        EXPECT_GE(e.element, 0);
      }
      EXPECT_NEAR(boundary_length, 4.0, 1e-12);
      // Crossed cells add a centre node.
      const int k = scheme == em::TriangulationScheme::crossed ? 2 * n : n;
      for (const auto& p : m.nodes()) EXPECT_DOUBLE_EQ(p.x() * k, std::round(p.x() * k));
    }
  }
}

TEST(Mesh, RefinementHalvesEdgeLength) {
  for (int n : {4, 8, 16}) {
    const double h = em::Mesh::unit_square(n).max_edge_length();
    const double h2 = em::Mesh::unit_square(2 * n).max_edge_length();
    EXPECT_NEAR(h2, 0.5 * h, 1e-14);
  }
}

TEST(Mesh, DeterministicConstruction) {
  const auto a = em::Mesh::unit_square(9, em::TriangulationScheme::crossed);
  const auto b = em::Mesh::unit_square(9, em::TriangulationScheme::crossed);
  std::ostringstream sa, sb;
  em::write_mesh(sa, a);
  em::write_mesh(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Mesh, TextRoundTrip) {
  const auto m = em::Mesh::unit_square(5, em::TriangulationScheme::crossed);
  std::ostringstream out;
  em::write_mesh(out, m);
  std::istringstream in(out.str());
  const auto r = em::read_mesh(in);
  std::ostringstream again;
  em::write_mesh(again, r);
  EXPECT_EQ(out.str(), again.str());
  EXPECT_EQ(r.element_count(), m.element_count());
}

TEST(Mesh, RejectsClockwiseTriangle) {
  std::vector<em::Point> nodes{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(em::Mesh(nodes, {{0, 2, 1}}, {}), em::Error);
}

TEST(Patches, ThreeSidesOnePatchEach) {
  const auto m = em::Mesh::unit_square(4);
  const auto p = em::partition_neumann_boundary(m, 3);
  ASSERT_EQ(p.size(), 3u);
  const em::Side expected[3] = {em::Side::left, em::Side::bottom, em::Side::right};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(p.patches[k].length, 1.0, 1e-12);
    for (auto e : p.patches[k].edges) EXPECT_EQ(m.boundary_edges()[e].side, expected[k]);
  }
}

TEST(Patches, NineteenPatchesNearEqualLength) {
  const auto m = em::Mesh::unit_square(51);
  const auto p = em::partition_neumann_boundary(m, 19);
  ASSERT_EQ(p.size(), 19u);
  double total = 0.0;
  for (const auto& patch : p.patches) {
    EXPECT_NEAR(patch.length, 3.0 / 19.0, m.max_edge_length());
    total += patch.length;
  }
  EXPECT_NEAR(total, 3.0, 1e-12);
}

TEST(Patches, PartitionCoversLoadedBoundaryExactlyOnce) {
  for (int m_patches : {1, 2, 5, 12, 19, 30}) {
    const auto m = em::Mesh::unit_square(10, em::TriangulationScheme::crossed);
    const auto p = em::partition_neumann_boundary(m, m_patches);
    std::multiset<em::Index> seen;
    for (const auto& patch : p.patches) {
      ASSERT_FALSE(patch.edges.empty());
      seen.insert(patch.edges.begin(), patch.edges.end());
      // Contiguity: consecutive edges share a node.
      for (std::size_t i = 1; i < patch.edges.size(); ++i) {
        const auto& a = m.boundary_edges()[patch.edges[i - 1]].nodes;
        const auto& b = m.boundary_edges()[patch.edges[i]].nodes;
        EXPECT_TRUE(a[0] == b[0] || a[0] == b[1] || a[1] == b[0] || a[1] == b[1]);
      }
    }
    std::set<em::Index> loaded;
    for (std::size_t e = 0; e < m.boundary_edges().size(); ++e) {
      if (m.boundary_edges()[e].side != em::Side::top) loaded.insert(static_cast<em::Index>(e));
    }
    EXPECT_EQ(seen.size(), loaded.size());
    EXPECT_EQ(std::set<em::Index>(seen.begin(), seen.end()), loaded);
    for (auto e : p.dirichlet_edges) EXPECT_EQ(m.boundary_edges()[e].side, em::Side::top);
  }
}

TEST(Patches, RejectsBadCounts) {
  const auto m = em::Mesh::unit_square(2);
  EXPECT_THROW(em::partition_neumann_boundary(m, 0), em::Error);
  EXPECT_NO_THROW(em::partition_neumann_boundary(m, 6));
  try {
    (void)em::partition_neumann_boundary(m, 7);
    FAIL();
  } catch (const em::Error& e) {
    EXPECT_EQ(e.kind(), em::ErrorKind::invalid_argument);
  }
}

TEST(Patches, PartitionLikeKeepsBreakpoints) {
  const auto coarse = em::Mesh::unit_square(6);
  const auto fine = em::Mesh::unit_square(18);
  const auto pc = em::partition_neumann_boundary(coarse, 6);
  const auto pf = em::partition_like(fine, pc);
  ASSERT_EQ(pf.size(), pc.size());
  for (std::size_t k = 0; k < pc.size(); ++k) {
    EXPECT_NEAR(pf.patches[k].length, pc.patches[k].length, 1e-12);
    EXPECT_NEAR(pf.patches[k].start, pc.patches[k].start, 1e-12);
  }
}

TEST(Regions, WholeDomainHasUnitWeights) {
  const auto m = em::Mesh::unit_square(6, em::TriangulationScheme::crossed);
  const auto w = em::region_quadrature_weights(m, em::WholeDomain{});
  ASSERT_EQ(w.size(), static_cast<std::size_t>(m.element_count()));
  for (const auto& ew : w) EXPECT_EQ(ew.weight, 1.0);
}

TEST(Regions, DiscAreaMatchesSubdivisionOracle) {
  const auto m = em::Mesh::unit_square(51);
  const em::Disc disc{{0.5, 0.5}, 0.1};
  const double area = em::weighted_area(m, em::region_quadrature_weights(m, disc));
  const double ref = oracle::subdivided_area(m, [&](const em::Point& p) { return disc.contains(p); }, 40);
  EXPECT_NEAR(area, std::numbers::pi * 0.01, 0.02 * std::numbers::pi * 0.01);
  EXPECT_NEAR(area, ref, 0.02 * ref);
}

TEST(Regions, WeightsMatchOracleElementwise) {
  const auto m = em::Mesh::unit_square(12, em::TriangulationScheme::crossed);
  const em::Ellipse ell{{0.43, 0.61}, {0.22, 0.13}};
  const auto w = em::region_quadrature_weights(m, ell);
  std::vector<double> dense(m.element_count(), 0.0);
  for (const auto& ew : w) dense[ew.element] = ew.weight;
  for (em::Index e = 0; e < m.element_count(); ++e) {
    const auto& t = m.triangles()[e];
    const double ref = oracle::subdivided_fraction(m.nodes()[t[0]], m.nodes()[t[1]], m.nodes()[t[2]],
                                                   [&](const em::Point& p) { return ell.contains(p); }, 4);
    EXPECT_DOUBLE_EQ(dense[e], ref) << "16 subtriangles equal the 4-fold subdivision";
  }
}

TEST(Regions, AlignedPixelsHaveBinaryWeights) {
  const auto m = em::Mesh::unit_square(51);
  const auto grid = em::make_pixel_grid(m, 17, 17);
  for (const auto& weights : grid.cells.weights) {
    for (const auto& ew : weights) EXPECT_TRUE(ew.weight == 1.0 || ew.weight == 0.0);
  }
}

TEST(Regions, PixelWeightsPartitionUnity) {
  for (int nx : {3, 7, 17}) {
    const auto m = em::Mesh::unit_square(20, em::TriangulationScheme::crossed);
    const auto grid = em::make_pixel_grid(m, nx, nx + 1);
    std::vector<double> sum(m.element_count(), 0.0);
    for (const auto& weights : grid.cells.weights)
      for (const auto& ew : weights) sum[ew.element] += ew.weight;
    for (double s : sum) EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

TEST(Regions, TinyRegionMayHaveNoWeights) {
  const auto m = em::Mesh::unit_square(4);
  const auto w = em::region_quadrature_weights(m, em::Disc{{0.5, 0.5}, 1e-4});
  EXPECT_EQ(em::weighted_area(m, w), 0.0);
}

TEST(Regions, OutsideRegionHasNoWeights) {
  const auto m = em::Mesh::unit_square(4);
  EXPECT_TRUE(em::region_quadrature_weights(m, em::Disc{{3.0, 3.0}, 0.5}).empty());
}

TEST(Balls, DefaultLayout) {
  const auto m = em::Mesh::unit_square(51);
  const auto balls = em::make_test_balls(m, 10, 0.05);
  ASSERT_EQ(balls.size(), 100u);
  for (std::size_t k = 0; k < balls.size(); ++k) {
    const auto& b = balls.ball(k);
    const double d = std::min({b.center.x(), b.center.y(), 1.0 - b.center.x(), 1.0 - b.center.y()});
    EXPECT_GE(d, b.radius);
  }
  EXPECT_THROW(em::make_test_balls(m, 10, 0.051), em::Error);
}
