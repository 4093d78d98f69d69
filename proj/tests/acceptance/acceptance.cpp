// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion.
//
//   elastomono_acceptance [N ...] [--expect-red=N,M]
//
// Numbers select a subset. The exit status is 0 iff the failing criteria are
// exactly the --expect-red set, so a known-red criterion that turns green
// also needs attention.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elastomono/constrained.hpp"
#include "elastomono/error.hpp"
#include "elastomono/experiment.hpp"
#include "elastomono/phantom.hpp"
#include "elastomono/tsvd.hpp"
#include "loewner.hpp"
#include "manufactured.hpp"
#include "oracles.hpp"

namespace em = elastomono;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  std::string buf(std::snprintf(nullptr, 0, f, args...) + 1, '\0');
  std::snprintf(buf.data(), buf.size(), f, args...);
  buf.pop_back();
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

em::ExperimentConfig load_config(const std::string& name) {
  return em::parse_config(slurp(fs::path(ELASTOMONO_CONFIG_DIR) / name));
}

constexpr int kSeeds = 10;

// Shared full-scale forward data, built on first use.
const em::ForwardData& single_disc_data() {
  static const em::ForwardData d = em::generate_forward_data(em::parse_config(""));
  return d;
}

const em::ExperimentConfig& disjoint_config() {
  static const em::ExperimentConfig c = load_config("disjoint.cfg");
  return c;
}

const em::ForwardData& disjoint_data() {
  static const em::ForwardData d = em::generate_forward_data(disjoint_config());
  return d;
}

Verdict fem_correctness() {
  const oracle::Manufactured mms;
  std::vector<double> errors;
  double worst_identity = 0.0;
  for (int n : {8, 16, 32}) {
    const auto m = em::Mesh::unit_square(n);
    const em::StiffnessSystem sys(m, em::MaterialField::uniform(m.element_count(), mms.lambda, mms.mu, mms.rho));
    const Eigen::VectorXd rhs =
        em::body_force_rhs(m, [&](const em::Point& p) { return mms.force(p); }) +
        em::traction_rhs(m, [&](const em::Point& p, em::Side s) {
          return em::Point(mms.stress(p) * em::outward_normal(s));
        });
    const auto u = sys.solve(rhs);
    const double a = sys.form(u.values, u.values);
    worst_identity = std::max(worst_identity, std::abs(a - rhs.dot(u.values)) / a);
    errors.push_back(oracle::l2_error(m, u.values, mms));
  }
  // Energy identity on every load solve of the full-scale background.
  const auto& d = single_disc_data();
  const auto& bg = d.background;
  const em::StiffnessSystem sys(d.mesh, d.background_material);
  for (Eigen::Index l = 0; l < bg.solutions.displacements.cols(); ++l) {
    const Eigen::VectorXd u = bg.solutions.displacements.col(l);
    const double a = sys.form(u, u);
    worst_identity = std::max(worst_identity, std::abs(a - d.basis.rhs.col(l).dot(u)) / a);
  }
  double order = 1e9;
  for (std::size_t i = 1; i < errors.size(); ++i) order = std::min(order, std::log2(errors[i - 1] / errors[i]));
  return {order >= 1.7 && worst_identity <= 1e-10,
          fmt("min L2 order %.3f (>= 1.7), max energy identity residual %.2e (<= 1e-10)", order, worst_identity)};
}

Verdict frechet_derivative() {
  const auto mesh = em::Mesh::unit_square(8);
  const auto basis = em::build_load_basis(mesh, em::partition_neumann_boundary(mesh, 6));
  const auto p0 = em::MaterialField::uniform(mesh.element_count(), 1, 1, 1);
  const auto bg = em::assemble_ntd(mesh, p0, basis);
  const em::ElementSensitivityData data(mesh, bg.solutions);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(0.25, 0.75), rad(0.1, 0.25), val(-1.0, 1.0);
  double worst = 0.0;
  for (int dir = 0; dir < 10; ++dir) {
    const em::Disc region{{pos(rng), pos(rng)}, rad(rng)};
    const auto w = em::region_quadrature_weights(mesh, region);
    const em::ParameterDirection q{val(rng), val(rng), val(rng)};
    const Eigen::MatrixXd deriv = em::frechet_form(data.region(w), q);
    for (double t : {1e-2, 1e-3}) {
      auto p = p0;
      for (const auto& ew : w) {
        p.lambda[ew.element] += t * q.lambda * ew.weight;
        p.mu[ew.element] += t * q.mu * ew.weight;
        p.rho[ew.element] += t * q.rho * ew.weight;
      }
      const Eigen::MatrixXd fd = (em::assemble_ntd(mesh, p, basis).ntd.values - bg.ntd.values) / t;
      worst = std::max(worst, (fd - deriv).norm() / deriv.norm() / (5.0 * t));
    }
  }
  return {worst <= 1.0, fmt("max relative error / (5t) = %.3f over 10 directions, t in {1e-2,1e-3}", worst)};
}

struct OrderedPairs {
  int pairs = 0;
  // Worst violations relative to the sample scale.
  double sandwich = -1e300;
  double ratio_bound_u1 = -1e300;
  double ratio_bound_u2 = -1e300;
  // Smallest eigenvalue relative to the norm.
  double ordered_ntd = 1e300;
  double ordered_derivative = 1e300;
};

const OrderedPairs& ordered_pairs() {
  static const OrderedPairs r = [] {
    OrderedPairs o;
    const auto mesh = em::Mesh::unit_square(16);
    const auto basis = em::build_load_basis(mesh, em::partition_neumann_boundary(mesh, 10));
    const auto grid = em::make_pixel_grid(mesh, 4, 4);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int pair = 0; pair < 24; ++pair) {
      const auto p2 = oracle::random_field(mesh, rng, 0.5, 3.0);
      const auto p1 = oracle::ordered_above(mesh, p2, rng);
      const auto a1 = em::assemble_ntd(mesh, p1, basis);
      const auto a2 = em::assemble_ntd(mesh, p2, basis);
      for (int probe = 0; probe < 8; ++probe) {
        Eigen::VectorXd c(basis.size());
        for (auto& x : c) x = n(rng);
        const auto s = oracle::loewner_sample(mesh, p1, a1, p2, a2, c);
        o.sandwich = std::max({o.sandwich, (s.gap - s.upper_bound) / s.scale, (s.lower_bound - s.gap) / s.scale});
        o.ratio_bound_u1 = std::max(o.ratio_bound_u1, (s.ratio_bound_u1 - s.gap) / s.scale);
        o.ratio_bound_u2 = std::max(o.ratio_bound_u2, (s.ratio_bound_u2 - s.gap) / s.scale);
      }
      // Λ(p₂) − Λ(p₁) ⪰ 0 for p₁ ≥ p₂.
      const Eigen::MatrixXd diff = a2.ntd.values - a1.ntd.values;
      o.ordered_ntd = std::min(o.ordered_ntd, oracle::min_eigenvalue(diff) / oracle::spectral_norm(a2.ntd.values));
      // Λ'(p₂)q₀ − Λ'(p₂)q₁ ⪰ 0 for pixelwise q₀ ≤ q₁.
      const auto stack = em::assemble_sensitivities(mesh, a2.solutions, grid.cells);
      Eigen::MatrixXd d0 = Eigen::MatrixXd::Zero(basis.size(), basis.size()), d1 = d0;
      for (std::size_t k = 0; k < stack.size(); ++k) {
        const em::ParameterDirection q0{u(rng), u(rng), u(rng)};
        const em::ParameterDirection q1{q0.lambda + u(rng), q0.mu + u(rng), q0.rho + u(rng)};
        d0 += em::frechet_form(stack.regions[k], q0);
        d1 += em::frechet_form(stack.regions[k], q1);
      }
      o.ordered_derivative = std::min(o.ordered_derivative, oracle::min_eigenvalue(d0 - d1) / oracle::spectral_norm(d1));
      ++o.pairs;
    }
    return o;
  }();
  return r;
}

Verdict loewner_monotonicity() {
  const auto& o = ordered_pairs();
  const bool ok = o.pairs >= 20 && o.sandwich <= 1e-9 && o.ordered_ntd >= -1e-10 && o.ordered_derivative >= -1e-10;
  return {ok, fmt("%d ordered pairs: sandwich worst %.2e·scale, min eig ratios %.2e / %.2e", o.pairs, o.sandwich,
                  o.ordered_ntd, o.ordered_derivative)};
}

Verdict ratio_lower_bound() {
  const auto& o = ordered_pairs();
  return {o.ratio_bound_u1 <= 1e-9 && o.ratio_bound_u2 <= 1e-9,
          fmt("worst violation %.2e·scale (u1 weights), %.2e·scale (u2 weights)", o.ratio_bound_u1, o.ratio_bound_u2)};
}

Verdict beta_oracle() {
  std::mt19937_64 rng(5150);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXd u = oracle::random_spd(6, rng);
    const Eigen::MatrixXd t = oracle::random_psd(6, 1 + i % 6, rng);
    const double beta = em::compute_beta(u, t, 1e6);
    const double ref = oracle::bisection_beta(u, t, 1e6);
    worst = std::max(worst, std::abs(beta - ref) / ref);
  }
  return {worst <= 1e-6, fmt("max relative deviation from bisection %.2e over 50 cases", worst)};
}

Verdict mono_test() {
  const auto c = em::parse_config("");
  const auto& d = single_disc_data();
  const auto& disc = std::get<em::Disc>(c.phantom.shapes.at(0).region);
  const auto clean = em::run_mono_test(c, d, em::measure(d.gap, 0.0, 1));
  int inside = 0, inside_marked = 0, far = 0, far_unmarked = 0;
  for (std::size_t k = 0; k < d.balls.size(); ++k) {
    const auto& b = d.balls.ball(k);
    const double centre = (b.center - disc.center).norm();
    if (centre + b.radius <= disc.radius) {
      ++inside;
      inside_marked += clean.marked.inside[k];
    }
    if (centre - disc.radius - b.radius > 0.1) {
      ++far;
      far_unmarked += !clean.marked.inside[k];
    }
  }
  auto noisy_cfg = c;
  noisy_cfg.delta = 0.001;
  const auto noisy = em::run_mono_test(noisy_cfg, d, em::measure(d.gap, 0.001, 1));
  const bool ok = inside > 0 && inside_marked == inside && far_unmarked >= 0.95 * far && noisy.jaccard >= 0.3;
  return {ok, fmt("%d elements; inside marked %d/%d, far unmarked %d/%d; delta=0.001 Jaccard %.3f (>= 0.3)",
                  d.mesh.element_count(), inside_marked, inside, far_unmarked, far, noisy.jaccard)};
}

Verdict constrained_recon() {
  auto c = em::parse_config("");
  const auto& d = single_disc_data();
  const double clean = em::run_reconstruction(c, d, em::measure(d.gap, 0.0, 1), false).jaccard_union;
  c.delta = 0.1;
  int good = 0;
  std::string scores;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const double j = em::run_reconstruction(c, d, em::measure(d.gap, 0.1, seed), false).jaccard_union;
    good += j >= 0.25;
    scores += fmt(" %.2f", j);
  }
  return {clean >= 0.4 && good >= 7,
          fmt("noiseless Jaccard %.3f (>= 0.4); delta=0.1 seeds >= 0.25: %d/10 [%s ]", clean, good, scores.c_str())};
}

Verdict tsvd_properties() {
  const auto& d = single_disc_data();
  int non_minimal = 0;
  double worst_tail = 0.0;
  for (const auto& t : d.pixel_stack.regions) {
    const Eigen::MatrixXd a = t.concatenated();
    if (a.cwiseAbs().maxCoeff() == 0.0) continue;
    const auto s = em::tsvd(a, 0.99);
    const double total = s.singular_values.sum();
    if (s.singular_values.head(s.retained).sum() < 0.99 * total ||
        (s.retained > 1 && s.singular_values.head(s.retained - 1).sum() >= 0.99 * total))
      ++non_minimal;
    const Eigen::BDCSVD<Eigen::MatrixXd> full(a);
    const double tail = full.singularValues().tail(full.singularValues().size() - s.retained).squaredNorm();
    worst_tail = std::max(worst_tail, std::abs((a - s.truncated()).squaredNorm() - tail) / a.squaredNorm());
  }
  // τ → 1 reproduces the untruncated reconstruction.
  auto c = em::parse_config("");
  c.tau = 1.0 - 1e-13;
  const auto meas = em::measure(d.gap, 0.0, 1);
  const auto plain = em::run_reconstruction(c, d, meas, false);
  const auto comb = em::run_reconstruction(c, d, meas, true);
  const double obj_gap = std::abs(comb.result.objective - plain.result.objective) / d.gap.squaredNorm();
  const bool same_mask = comb.masks[0] == plain.masks[0];
  const bool ok = non_minimal == 0 && worst_tail <= 1e-10 && obj_gap <= 1e-8 && same_mask;
  return {ok, fmt("non-minimal truncations %d, tail identity %.2e, tau->1 objective gap %.2e, masks %s", non_minimal,
                  worst_tail, obj_gap, same_mask ? "equal" : "differ")};
}

Verdict combined_superiority() {
  auto single = em::parse_config("");
  single.delta = 0.1;
  const auto& ds = single_disc_data();
  auto disjoint = disjoint_config();
  const auto& dd = disjoint_data();
  int single_wins = 0, disjoint_wins = 0;
  std::array<int, 3> recovered{};
  std::string log;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto ms = em::measure(ds.gap, 0.1, seed);
    const double js_c = em::run_reconstruction(single, ds, ms, false).jaccard_union;
    const double js_t = em::run_reconstruction(single, ds, ms, true).jaccard_union;
    single_wins += js_t >= js_c;
    const auto md = em::measure(dd.gap, 0.1, seed);
    const auto rc = em::run_reconstruction(disjoint, dd, md, false);
    const auto rt = em::run_reconstruction(disjoint, dd, md, true);
    const double mc = (rc.jaccard[0] + rc.jaccard[1] + rc.jaccard[2]) / 3;
    const double mt = (rt.jaccard[0] + rt.jaccard[1] + rt.jaccard[2]) / 3;
    disjoint_wins += mt >= mc;
    for (int p = 0; p < 3; ++p) recovered[p] += rt.jaccard[p] >= 0.25;
    log += fmt(" s%d:%.2f/%.2f,%.2f/%.2f(%.2f,%.2f,%.2f)", seed, js_t, js_c, mt, mc, rt.jaccard[0], rt.jaccard[1],
               rt.jaccard[2]);
  }
  const bool ok = single_wins >= 7 && disjoint_wins >= 7 && recovered[0] >= 7 && recovered[1] >= 7 && recovered[2] >= 7;
  return {ok, fmt("combined >= constrained: single %d/10, disjoint %d/10; per-parameter >= 0.25 (lambda,mu,rho): "
                  "%d,%d,%d /10\n    seed:single comb/constr, disjoint mean comb/constr (comb lambda,mu,rho):%s",
                  single_wins, disjoint_wins, recovered[0], recovered[1], recovered[2], log.c_str())};
}

Verdict noise_convergence() {
  auto c = em::parse_config("");
  const auto& d = single_disc_data();
  const Eigen::MatrixXd z0 = em::run_reconstruction(c, d, em::measure(d.gap, 0.0, 1), false).result.coefficients;
  std::vector<double> dist;
  for (double delta : {0.1, 0.05, 0.01, 0.001}) {
    c.delta = delta;
    const auto r = em::run_reconstruction(c, d, em::measure(d.gap, delta, 1), false);
    dist.push_back((r.result.coefficients - z0).norm());
  }
  bool ok = true;
  for (std::size_t i = 1; i < dist.size(); ++i) ok = ok && dist[i] <= 1.1 * dist[i - 1];
  // Not scored: far below the tested range the shifted bounds approach the
  // noiseless ones.
  c.delta = 1e-9;
  const double tiny = (em::run_reconstruction(c, d, em::measure(d.gap, 1e-9, 1), false).result.coefficients - z0).norm();
  return {ok, fmt("|z_delta - z_0| for delta 0.1,0.05,0.01,0.001: %.3e %.3e %.3e %.3e (delta 1e-9: %.3e)", dist[0],
                  dist[1], dist[2], dist[3], tiny)};
}

Verdict determinism() {
  auto c = em::parse_config("");
  c.delta = 0.01;
  c.output_directory = (fs::temp_directory_path() / "elastomono_acceptance_det").string();
  auto snapshot = [&] {
    fs::remove_all(c.output_directory);
    const auto summary = em::run_experiment(c, em::Stage::all, 2);
    std::map<std::string, std::string> files;
    for (const auto& f : summary.files) files[f] = slurp(fs::path(c.output_directory) / f);
    return files;
  };
  const auto a = snapshot();
  const auto b = snapshot();
  fs::remove_all(c.output_directory);
  return {a == b && !a.empty(), fmt("%zu artifacts, %s", a.size(), a == b ? "bit-identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, fem_correctness},  {2, frechet_derivative}, {3, loewner_monotonicity}, {4, ratio_lower_bound},
      {5, beta_oracle},      {6, mono_test},          {7, constrained_recon},    {8, tsvd_properties},
      {9, combined_superiority}, {10, noise_convergence}, {11, determinism}};
  std::set<int> only, expect_red, red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--expect-red=", 0) == 0) {
      std::istringstream list(arg.substr(13));
      for (std::string item; std::getline(list, item, ',');) expect_red.insert(std::stoi(item));
    } else {
      only.insert(std::stoi(arg));
    }
  }
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) red.insert(id);
    std::printf("criterion %2d: %s  %s  (%.1fs)\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  auto join = [](const std::set<int>& ids) {
    std::string out;
    for (int id : ids) out += (out.empty() ? "" : ",") + std::to_string(id);
    return out.empty() ? std::string("none") : out;
  };
  // Known-red criteria outside the selected subset do not count.
  std::set<int> expected;
  for (int id : expect_red)
    if (only.empty() || only.count(id)) expected.insert(id);
  std::printf("failing: %s; expected red: %s\n", join(red).c_str(), join(expected).c_str());
  return red == expected ? 0 : 1;
}
