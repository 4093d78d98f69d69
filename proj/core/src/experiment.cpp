#include "elastomono/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "elastomono/error.hpp"
#include "elastomono/matrix_io.hpp"
#include "elastomono/phantom.hpp"

namespace elastomono {

ForwardData generate_forward_data(const ExperimentConfig& config, int jobs) {
  validate_config(config);
  ForwardData d;
  d.mesh = Mesh::unit_square(config.subdivisions, config.scheme);
  d.patches = partition_neumann_boundary(d.mesh, config.patches);
  d.basis = build_load_basis(d.mesh, d.patches);
  const auto& bg = config.background;
  d.background_material = MaterialField::uniform(d.mesh.element_count(), bg.lambda, bg.mu, bg.rho);
  d.background = assemble_ntd(d.mesh, d.background_material, d.basis, jobs);

  if (config.data_subdivisions > 0) {
    d.data_mesh = Mesh::unit_square(config.data_subdivisions, config.scheme);
    const auto patches = partition_like(*d.data_mesh, d.patches);
    const auto basis = build_load_basis(*d.data_mesh, patches);
    const auto bg_material = MaterialField::uniform(d.data_mesh->element_count(), bg.lambda, bg.mu, bg.rho);
    d.truth_material = build_phantom_material(*d.data_mesh, bg, config.phantom);
    d.data_background = assemble_ntd(*d.data_mesh, bg_material, basis, jobs).ntd;
    d.data_truth = assemble_ntd(*d.data_mesh, d.truth_material, basis, jobs).ntd;
  } else {
    d.truth_material = build_phantom_material(d.mesh, bg, config.phantom);
    d.data_background = d.background.ntd;
    d.data_truth = assemble_ntd(d.mesh, d.truth_material, d.basis, jobs).ntd;
  }
  d.gap = gap_matrix(d.data_background, d.data_truth);

  d.pixels = make_pixel_grid(d.mesh, config.pixels_x, config.pixels_y);
  d.balls = make_test_balls(d.mesh, config.balls_per_side, config.ball_radius);
  const ElementSensitivityData sens(d.mesh, d.background.solutions);
  d.pixel_stack = assemble_sensitivities(sens, d.pixels.cells, jobs);
  d.ball_stack = assemble_sensitivities(sens, d.balls.balls, jobs);
  return d;
}

Measurement measure(const Eigen::MatrixXd& clean_gap, double delta, std::uint64_t seed,
                    std::optional<double> shift) {
  Measurement m;
  m.delta = delta;
  m.seed = seed;
  m.noise = add_noise(clean_gap, delta, seed);
  m.gap = m.noise.noisy;
  m.shift = shift.value_or(m.noise.absolute_norm);
  m.gap_pd = m.gap;
  m.gap_pd.diagonal().array() += m.shift;
  return m;
}

namespace {

std::vector<bool> union_mask(const std::array<std::vector<bool>, 3>& masks) {
  std::vector<bool> out(masks[0].size(), false);
  for (const auto& m : masks) {
    for (std::size_t i = 0; i < out.size() && i < m.size(); ++i) out[i] = out[i] || m[i];
  }
  return out;
}

constexpr std::array<Parameter, 3> kParameters{Parameter::lambda, Parameter::mu, Parameter::rho};
constexpr std::array<const char*, 3> kParameterNames{"lambda", "mu", "rho"};

}  // namespace

MonoTestOutcome run_mono_test(const ExperimentConfig& config, const ForwardData& data, const Measurement& meas,
                              int jobs) {
  MonoTestOutcome out;
  const auto& b = config.background;
  const auto& c = config.contrast;
  out.constants = admissible_constants({b.lambda, c.lambda}, {b.mu, c.mu}, {b.rho, c.rho});
  if (meas.delta > 0.0) {
    out.marked = linearized_test_noisy(meas.noise, data.ball_stack, out.constants, meas.shift, jobs);
  } else {
    out.marked = linearized_test_noiseless(meas.gap, data.ball_stack, out.constants, jobs);
  }
  out.raster = rasterize_marked(out.marked, data.balls, data.pixels);
  out.truth = rasterize_truth(config.phantom, data.pixels);
  out.jaccard = score_jaccard(out.raster, out.truth);
  return out;
}

ReconstructionOutcome run_reconstruction(const ExperimentConfig& config, const ForwardData& data,
                                         const Measurement& meas, bool combined, int jobs) {
  ReconstructionOutcome out;
  out.combined = combined;
  out.support = config.support;
  const auto& b = config.background;
  out.bounds = compute_box_bounds(b.lambda, b.mu, b.rho, config.effective_lambda_min(), config.effective_mu_min(),
                                  config.effective_rho_min());

  SensitivityStack truncated;
  if (combined) {
    TruncationReport report;
    truncated = truncate_sensitivity_stack(data.pixel_stack, config.tau, config.criterion, config.scope, &report, jobs);
    out.truncation = std::move(report);
  }

  if (config.support == SupportModel::single) {
    const auto box =
        single_support_constraints(data.pixel_stack, meas.gap_pd, out.bounds, config.beta_cap_factor, jobs);
    out.result = combined ? combined_reconstruct(truncated, meas.gap, box, config.solver)
                          : minimize_single_support(data.pixel_stack, meas.gap, box, config.solver);
    out.boxes = {box.zeta};
    const Eigen::VectorXd zeta = out.result.coefficients.col(0);
    out.values = {zeta, out.bounds.tau1 * zeta, out.bounds.tau2 * zeta};
  } else {
    const auto boxes =
        disjoint_support_constraints(data.pixel_stack, meas.gap_pd, out.bounds, config.beta_cap_factor, jobs);
    out.result = combined ? combined_reconstruct(truncated, meas.gap, boxes, config.solver)
                          : minimize_disjoint_supports(data.pixel_stack, meas.gap, boxes, config.solver);
    out.boxes = {boxes.boxes.begin(), boxes.boxes.end()};
    for (int p = 0; p < 3; ++p) out.values[p] = out.result.coefficients.col(p);
  }
  apply_threshold(out.result, config.threshold);

  const bool single = config.support == SupportModel::single;
  const auto any_truth = rasterize_truth(config.phantom, data.pixels);
  for (int p = 0; p < 3; ++p) {
    out.masks[p] = single ? out.result.masks[0] : out.result.masks[p];
    out.truths[p] = single ? any_truth : rasterize_truth(config.phantom, data.pixels, kParameters[p]);
    out.jaccard[p] = score_jaccard(out.masks[p], out.truths[p]);
  }
  out.jaccard_union = score_jaccard(union_mask(out.masks), any_truth);
  return out;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::forward: return "forward";
    case Stage::test: return "test";
    case Stage::reconstruct: return "reconstruct";
    case Stage::combined: return "combined";
    case Stage::score: return "score";
    case Stage::all: return "all";
  }
  return "?";
}

Stage stage_from_string(std::string_view name) {
  for (Stage s : {Stage::forward, Stage::test, Stage::reconstruct, Stage::combined, Stage::score, Stage::all}) {
    if (to_string(s) == name) return s;
  }
  fail(ErrorKind::config, "unknown stage '" + std::string(name) + "'");
}

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string root) : root_(std::move(root)) {}

  void file(const std::string& name, const std::string& content) {
    write_file((std::filesystem::path(root_) / name).string(), content);
    files_.push_back(name);
  }

  template <class F>
  void stream(const std::string& name, F&& body) {
    std::ostringstream s;
    body(s);
    file(name, s.str());
  }

  // Writes a PGM scaled to [0, max value] and records the scale.
  void raster(const std::string& name, const std::vector<double>& values, int nx, int ny) {
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, v);
    if (!(scale > 0.0)) scale = 1.0;
    stream(name, [&](std::ostream& o) { write_pgm(o, values, nx, ny, scale); });
    scales_.emplace_back(name, scale);
  }

  void directory_tree(const std::string& name) { files_.push_back(name + "/"); }

  const std::string& root() const { return root_; }
  std::vector<std::string> files() const {
    auto f = files_;
    std::sort(f.begin(), f.end());
    return f;
  }
  const std::vector<std::pair<std::string, double>>& scales() const { return scales_; }

 private:
  std::string root_;
  std::vector<std::string> files_;
  std::vector<std::pair<std::string, double>> scales_;
};

std::vector<double> as_doubles(const std::vector<bool>& mask) {
  std::vector<double> out(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1.0 : 0.0;
  return out;
}

void write_forward(ArtifactWriter& w, const ForwardData& d, const Measurement& meas) {
  w.stream("mesh.txt", [&](std::ostream& o) { write_mesh(o, d.mesh); });
  if (d.data_mesh) w.stream("data_mesh.txt", [&](std::ostream& o) { write_mesh(o, *d.data_mesh); });
  w.stream("ntd_background.txt", [&](std::ostream& o) { write_ntd(o, d.data_background); });
  w.stream("ntd_truth.txt", [&](std::ostream& o) { write_ntd(o, d.data_truth); });
  w.stream("gap.txt", [&](std::ostream& o) { write_matrix_rows(o, d.gap); });
  if (meas.delta > 0.0) {
    NtDMatrix noisy = d.data_truth;
    noisy.values = d.data_background.values - meas.gap;
    noisy.seed = meas.seed;
    w.stream("ntd_noisy.txt", [&](std::ostream& o) { write_ntd(o, noisy); });
    w.stream("gap_noisy.txt", [&](std::ostream& o) { write_matrix_rows(o, meas.gap); });
  }
  w.stream("displacements_background.csv", [&](std::ostream& o) {
    const auto& u = d.background.solutions.displacements;
    o << "node,x,y";
    for (Eigen::Index l = 0; l < u.cols(); ++l) o << ",ux" << l << ",uy" << l;
    o << '\n';
    for (Index n = 0; n < d.mesh.node_count(); ++n) {
      const Point& p = d.mesh.nodes()[n];
      o << n << ',' << format_double(p.x()) << ',' << format_double(p.y());
      for (Eigen::Index l = 0; l < u.cols(); ++l) {
        o << ',' << format_double(u(2 * n, l)) << ',' << format_double(u(2 * n + 1, l));
      }
      o << '\n';
    }
  });
  write_stack((std::filesystem::path(w.root()) / "sensitivity").string(), d.pixel_stack);
  w.directory_tree("sensitivity");
}

void write_mono_test(ArtifactWriter& w, const ForwardData& d, const MonoTestOutcome& t) {
  w.stream("balls.csv", [&](std::ostream& o) {
    o << "ball,cx,cy,radius,min_eigenvalue,tolerance,marked\n";
    for (std::size_t k = 0; k < d.balls.size(); ++k) {
      const Disc& b = d.balls.ball(k);
      o << k << ',' << format_double(b.center.x()) << ',' << format_double(b.center.y()) << ','
        << format_double(b.radius) << ',' << format_double(t.marked.min_eigenvalue[k]) << ','
        << format_double(t.marked.tolerance[k]) << ',' << (t.marked.inside[k] ? 1 : 0) << '\n';
    }
  });
  w.raster("mono_test.pgm", as_doubles(t.raster), d.pixels.nx, d.pixels.ny);
}

void write_reconstruction(ArtifactWriter& w, const ForwardData& d, const ReconstructionOutcome& r,
                          const std::string& prefix) {
  for (int p = 0; p < 3; ++p) {
    const std::string base = prefix + "_" + kParameterNames[p];
    w.stream(base + ".csv", [&](std::ostream& o) {
      o << "pixel,x,y,value,marked\n";
      for (std::size_t k = 0; k < d.pixels.size(); ++k) {
        const Point c = d.pixels.center(k);
        o << k << ',' << format_double(c.x()) << ',' << format_double(c.y()) << ','
          << format_double(r.values[p][static_cast<Eigen::Index>(k)]) << ',' << (r.masks[p][k] ? 1 : 0) << '\n';
      }
    });
    std::vector<double> v(r.values[p].data(), r.values[p].data() + r.values[p].size());
    w.raster(base + ".pgm", v, d.pixels.nx, d.pixels.ny);
  }
  w.stream(prefix + "_solver_log.csv", [&](std::ostream& o) {
    o << "iteration,objective\n";
    for (std::size_t i = 0; i < r.result.objective_log.size(); ++i) {
      o << i << ',' << format_double(r.result.objective_log[i]) << '\n';
    }
  });
  w.stream(prefix + "_bounds.csv", [&](std::ostream& o) {
    o << "box,pixel,beta,upper,capped\n";
    for (std::size_t b = 0; b < r.boxes.size(); ++b) {
      for (std::size_t k = 0; k < r.boxes[b].beta.size(); ++k) {
        o << b << ',' << k << ',' << format_double(r.boxes[b].beta[k]) << ','
          << format_double(r.boxes[b].upper[k]) << ',' << (r.boxes[b].capped[k] ? 1 : 0) << '\n';
      }
    }
  });
  if (r.truncation) {
    w.stream("spectra.csv", [&](std::ostream& o) { write_spectra_csv(o, *r.truncation); });
  }
}

void add_reconstruction_scores(ExperimentSummary& s, const ReconstructionOutcome& r, const std::string& prefix) {
  if (r.support == SupportModel::single) {
    s.scores.emplace_back(prefix + ".jaccard", r.jaccard[0]);
  } else {
    for (int p = 0; p < 3; ++p) s.scores.emplace_back(prefix + ".jaccard_" + kParameterNames[p], r.jaccard[p]);
    s.scores.emplace_back(prefix + ".jaccard_union", r.jaccard_union);
  }
  s.scores.emplace_back(prefix + ".objective", r.result.objective);
  s.scores.emplace_back(prefix + ".projected_gradient_norm", r.result.projected_gradient_norm);
  s.scores.emplace_back(prefix + ".iterations", r.result.iterations);
  s.scores.emplace_back(prefix + ".converged", r.result.converged ? 1.0 : 0.0);
}

template <class F>
auto in_stage(std::string_view stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorKind::io, std::string(stage) + ": " + e.what());
  }
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config, Stage stage, int jobs) {
  ExperimentSummary summary;
  ArtifactWriter w(config.output_directory);

  const ForwardData data = in_stage("forward", [&] { return generate_forward_data(config, jobs); });
  const Measurement meas = in_stage("forward", [&] { return measure(data.gap, config.delta, config.seed, config.shift); });
  in_stage("forward", [&] { write_forward(w, data, meas); });

  const bool all = stage == Stage::all;
  const bool score_only = stage == Stage::score;
  const bool do_test = all || stage == Stage::test || (score_only && config.method == Method::mono_test);
  const bool do_recon = all || stage == Stage::reconstruct || (score_only && config.method == Method::constrained);
  const bool do_combined = all || stage == Stage::combined || (score_only && config.method == Method::combined);

  if (do_test) {
    const auto t = in_stage("test", [&] { return run_mono_test(config, data, meas, jobs); });
    in_stage("test", [&] { write_mono_test(w, data, t); });
    summary.scores.emplace_back("mono_test.jaccard", t.jaccard);
    summary.scores.emplace_back("mono_test.marked", static_cast<double>(t.marked.count()));
  }
  if (do_recon) {
    const auto r = in_stage("reconstruct", [&] { return run_reconstruction(config, data, meas, false, jobs); });
    in_stage("reconstruct", [&] { write_reconstruction(w, data, r, "constrained"); });
    add_reconstruction_scores(summary, r, "constrained");
  }
  if (do_combined) {
    const auto r = in_stage("combined", [&] { return run_reconstruction(config, data, meas, true, jobs); });
    in_stage("combined", [&] { write_reconstruction(w, data, r, "combined"); });
    add_reconstruction_scores(summary, r, "combined");
  }

  in_stage("score", [&] {
    const auto truth = rasterize_truth(config.phantom, data.pixels);
    w.raster("truth.pgm", as_doubles(truth), data.pixels.nx, data.pixels.ny);
    if (!summary.scores.empty()) {
      w.stream("scores.txt", [&](std::ostream& o) {
        for (const auto& [name, value] : summary.scores) o << name << ' ' << format_double(value) << '\n';
      });
    }
    w.stream("manifest.txt", [&](std::ostream& o) {
      o << "elastomono " << ELASTOMONO_VERSION << '\n'
        << "stage " << to_string(stage) << '\n'
        << "eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n'
        << "noise_seed " << meas.seed << '\n'
        << "noise_delta " << format_double(meas.delta) << '\n'
        << "noise_absolute " << format_double(meas.noise.absolute_norm) << '\n'
        << "shift " << format_double(meas.shift) << '\n'
        << "elements " << data.mesh.element_count() << '\n'
        << "ntd_cross_check " << format_double(data.background.cross_check) << '\n';
      for (const auto& [name, scale] : w.scales()) o << "raster_scale " << name << ' ' << format_double(scale) << '\n';
      for (const auto& f : w.files()) o << "file " << f << '\n';
      o << "\n# config\n" << serialize_config(config);
    });
  });
  summary.files = w.files();
  return summary;
}

}  // namespace elastomono
