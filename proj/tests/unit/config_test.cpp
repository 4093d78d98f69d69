#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "elastomono/config.hpp"
#include "elastomono/error.hpp"

namespace em = elastomono;

namespace {

std::string config_message(std::string_view text) {
  try {
    em::parse_config(text);
  } catch (const em::Error& e) {
    EXPECT_EQ(e.kind(), em::ErrorKind::config);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const auto c = em::parse_config("");
  EXPECT_EQ(c.subdivisions, 51);
  EXPECT_EQ(c.patches, 19);
  EXPECT_EQ(c.pixels_x, 17);
  EXPECT_EQ(c.balls_per_side, 10);
  EXPECT_EQ(c.ball_radius, 0.05);
  EXPECT_EQ(c.contrast.lambda, 2.0);
  EXPECT_EQ(c.effective_lambda_min(), 1.0);
  EXPECT_EQ(c.method, em::Method::constrained);
  EXPECT_EQ(c.tau, 0.99);
  ASSERT_EQ(c.phantom.shapes.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<em::Disc>(c.phantom.shapes[0].region));
}

TEST(Config, SectionsCommentsAndValues) {
  const auto c = em::parse_config(R"(
# comment
[mesh]
subdivisions = 20   # trailing comment
scheme = crossed
[phantom]
shape = ellipse 0.3 0.6 0.1 0.05 lambda=3
shape = rect 0.6 0.6 0.8 0.8 mu=2 rho=2.5
[noise]
delta = 0.05
seed = 77
shift = 0.25
[method]
name = combined
support = disjoint
[tsvd]
criterion = squared
scope = global
[solver]
accelerate = false
)");
  EXPECT_EQ(c.subdivisions, 20);
  EXPECT_EQ(c.scheme, em::TriangulationScheme::crossed);
  ASSERT_EQ(c.phantom.shapes.size(), 2u);
  EXPECT_EQ(*c.phantom.shapes[0].lambda, 3.0);
  EXPECT_FALSE(c.phantom.shapes[0].mu);
  EXPECT_EQ(*c.phantom.shapes[1].rho, 2.5);
  EXPECT_EQ(c.delta, 0.05);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(*c.shift, 0.25);
  EXPECT_EQ(c.method, em::Method::combined);
  EXPECT_EQ(c.support, em::SupportModel::disjoint);
  EXPECT_EQ(c.criterion, em::EnergyCriterion::squared);
  EXPECT_EQ(c.scope, em::TruncationScope::global);
  EXPECT_FALSE(c.solver.accelerate);
}

TEST(Config, RoundTripIsIdentity) {
  for (const char* text : {"", "[noise]\ndelta = 0.1\nshift = 0.3\n[bounds]\nmu_min = 0.5\n",
                           "[phantom]\nshape = disc 0.4 0.45 0.123456789012345 rho=2\n[mesh]\ndata_subdivisions = 60\n"}) {
    const auto a = em::parse_config(text);
    const std::string s = em::serialize_config(a);
    EXPECT_EQ(em::serialize_config(em::parse_config(s)), s);
  }
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"single_disc.cfg", "disjoint.cfg"}) {
    EXPECT_NO_THROW(em::parse_config(slurp(std::string(ELASTOMONO_CONFIG_DIR) + "/" + name))) << name;
  }
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(config_message("[mesh]\nbogus = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_message("[mesh]\nsubdivisions = ten\n").find("line 2"), std::string::npos);
  EXPECT_NE(config_message("\n\nno equals sign\n").find("line 3"), std::string::npos);
  config_message("[mesh\n");
  config_message("[phantom]\nshape = triangle 0 0 1\n");
  config_message("[phantom]\nshape = disc 0.5 0.5\n");
  config_message("[phantom]\nshape = disc 0.5 0.5 0.1 kappa=2\n");
  config_message("[method]\nname = magic\n");
}

TEST(Config, ValidationRejectsBadValues) {
  config_message("[mesh]\nsubdivisions = 1\n");
  config_message("[noise]\ndelta = -0.1\n");
  config_message("[method]\nthreshold = 1.5\n");
  config_message("[tsvd]\ntau = 1\n");
  config_message("[contrast]\nlambda = 0.5\n");
  // Equal contrast leaves no admissible variation unless a bound is given.
  config_message("[contrast]\nrho = 1\n");
  EXPECT_NO_THROW(em::parse_config("[contrast]\nrho = 1\n[bounds]\nrho_min = 0.5\n"));
  config_message("[phantom]\nshape = disc 0.05 0.5 0.1 lambda=2\n");  // leaves the square
  config_message("[mesh]\nsubdivisions = 20\ndata_subdivisions = 10\n");
}

TEST(Config, ShapeTextRoundTrip) {
  for (const char* text : {"disc 0.5 0.5 0.15 lambda=2 mu=2 rho=2", "ellipse 0.3 0.68 0.16 0.09 lambda=2",
                           "rect 0.58 0.55 0.82 0.79 mu=2"}) {
    EXPECT_EQ(em::format_shape(em::parse_shape(text)), text);
  }
}
