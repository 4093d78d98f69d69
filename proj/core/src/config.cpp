#include "elastomono/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "elastomono/error.hpp"
#include "elastomono/matrix_io.hpp"

namespace elastomono {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::mono_test: return "mono_test";
    case Method::constrained: return "constrained";
    case Method::combined: return "combined";
  }
  return "?";
}

std::string_view to_string(SupportModel s) { return s == SupportModel::single ? "single" : "disjoint"; }

Phantom default_phantom(const Background& contrast) {
  Phantom p;
  p.shapes.push_back({Disc{{0.5, 0.5}, 0.15}, contrast.lambda, contrast.mu, contrast.rho});
  return p;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void config_error(int line, const std::string& what) {
  fail(ErrorKind::config, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what);
}

double to_double(std::string_view v, int line) {
  try {
    return parse_double(v);
  } catch (const Error&) {
    config_error(line, "expected a number, got '" + std::string(v) + "'");
  }
}

long long to_integer(std::string_view v, int line) {
  long long out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) {
    config_error(line, "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

int to_int(std::string_view v, int line) {
  const auto x = to_integer(v, line);
  if (x < INT32_MIN || x > INT32_MAX) config_error(line, "integer out of range");
  return static_cast<int>(x);
}

bool to_bool(std::string_view v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  config_error(line, "expected true/false, got '" + std::string(v) + "'");
}

}  // namespace

PhantomShape parse_shape(std::string_view text) {
  const auto tok = split_ws(text);
  if (tok.empty()) fail(ErrorKind::config, "empty shape");
  PhantomShape shape;
  std::size_t next = 0;
  auto num = [&](std::size_t i) {
    if (i >= tok.size()) fail(ErrorKind::config, "shape '" + std::string(text) + "' is missing coordinates");
    return to_double(tok[i], 0);
  };
  if (tok[0] == "disc") {
    shape.region = Disc{{num(1), num(2)}, num(3)};
    next = 4;
  } else if (tok[0] == "ellipse") {
    shape.region = Ellipse{{num(1), num(2)}, {num(3), num(4)}};
    next = 5;
  } else if (tok[0] == "rect") {
    shape.region = Box{{num(1), num(2)}, {num(3), num(4)}};
    next = 5;
  } else {
    fail(ErrorKind::config, "unknown shape kind '" + tok[0] + "' (disc, ellipse, rect)");
  }
  for (; next < tok.size(); ++next) {
    const auto eq = tok[next].find('=');
    if (eq == std::string::npos) fail(ErrorKind::config, "expected parameter=value, got '" + tok[next] + "'");
    const auto key = tok[next].substr(0, eq);
    const double v = to_double(std::string_view(tok[next]).substr(eq + 1), 0);
    if (key == "lambda") shape.lambda = v;
    else if (key == "mu") shape.mu = v;
    else if (key == "rho") shape.rho = v;
    else fail(ErrorKind::config, "unknown phantom parameter '" + key + "'");
  }
  return shape;
}

std::string format_shape(const PhantomShape& shape) {
  std::string s;
  if (const auto* d = std::get_if<Disc>(&shape.region)) {
    s = "disc " + format_double(d->center.x()) + ' ' + format_double(d->center.y()) + ' ' + format_double(d->radius);
  } else if (const auto* e = std::get_if<Ellipse>(&shape.region)) {
    s = "ellipse " + format_double(e->center.x()) + ' ' + format_double(e->center.y()) + ' ' +
        format_double(e->semi_axes.x()) + ' ' + format_double(e->semi_axes.y());
  } else if (const auto* b = std::get_if<Box>(&shape.region)) {
    s = "rect " + format_double(b->lo.x()) + ' ' + format_double(b->lo.y()) + ' ' + format_double(b->hi.x()) + ' ' +
        format_double(b->hi.y());
  } else {
    fail(ErrorKind::config, "phantom shapes must be disc, ellipse or rect");
  }
  if (shape.lambda) s += " lambda=" + format_double(*shape.lambda);
  if (shape.mu) s += " mu=" + format_double(*shape.mu);
  if (shape.rho) s += " rho=" + format_double(*shape.rho);
  return s;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  bool phantom_given = false;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;

    if (full == "mesh.subdivisions") c.subdivisions = to_int(value, line_no);
    else if (full == "mesh.scheme") {
      if (value == "right_diagonal") c.scheme = TriangulationScheme::right_diagonal;
      else if (value == "crossed") c.scheme = TriangulationScheme::crossed;
      else config_error(line_no, "scheme must be right_diagonal or crossed");
    } else if (full == "mesh.data_subdivisions") c.data_subdivisions = to_int(value, line_no);
    else if (full == "measurements.patches") c.patches = to_int(value, line_no);
    else if (full == "pixels.nx") c.pixels_x = to_int(value, line_no);
    else if (full == "pixels.ny") c.pixels_y = to_int(value, line_no);
    else if (full == "balls.per_side") c.balls_per_side = to_int(value, line_no);
    else if (full == "balls.radius") c.ball_radius = to_double(value, line_no);
    else if (full == "background.lambda") c.background.lambda = to_double(value, line_no);
    else if (full == "background.mu") c.background.mu = to_double(value, line_no);
    else if (full == "background.rho") c.background.rho = to_double(value, line_no);
    else if (full == "contrast.lambda") c.contrast.lambda = to_double(value, line_no);
    else if (full == "contrast.mu") c.contrast.mu = to_double(value, line_no);
    else if (full == "contrast.rho") c.contrast.rho = to_double(value, line_no);
    else if (full == "bounds.lambda_min") c.lambda_min = to_double(value, line_no);
    else if (full == "bounds.mu_min") c.mu_min = to_double(value, line_no);
    else if (full == "bounds.rho_min") c.rho_min = to_double(value, line_no);
    else if (full == "phantom.shape") {
      try {
        c.phantom.shapes.push_back(parse_shape(value));
      } catch (const Error& e) {
        config_error(line_no, e.what());
      }
      phantom_given = true;
    } else if (full == "noise.delta") c.delta = to_double(value, line_no);
    else if (full == "noise.seed") c.seed = static_cast<std::uint64_t>(to_integer(value, line_no));
    else if (full == "noise.shift") {
      if (value == "auto") c.shift.reset();
      else c.shift = to_double(value, line_no);
    } else if (full == "method.name") {
      if (value == "mono_test") c.method = Method::mono_test;
      else if (value == "constrained") c.method = Method::constrained;
      else if (value == "combined") c.method = Method::combined;
      else config_error(line_no, "method must be mono_test, constrained or combined");
    } else if (full == "method.support") {
      if (value == "single") c.support = SupportModel::single;
      else if (value == "disjoint") c.support = SupportModel::disjoint;
      else config_error(line_no, "support must be single or disjoint");
    } else if (full == "method.threshold") c.threshold = to_double(value, line_no);
    else if (full == "tsvd.tau") c.tau = to_double(value, line_no);
    else if (full == "tsvd.criterion") {
      if (value == "linear") c.criterion = EnergyCriterion::linear;
      else if (value == "squared") c.criterion = EnergyCriterion::squared;
      else config_error(line_no, "criterion must be linear or squared");
    } else if (full == "tsvd.scope") {
      if (value == "per_region") c.scope = TruncationScope::per_region;
      else if (value == "global") c.scope = TruncationScope::global;
      else config_error(line_no, "scope must be per_region or global");
    } else if (full == "solver.tolerance") c.solver.tolerance = to_double(value, line_no);
    else if (full == "solver.max_iterations") c.solver.max_iterations = to_int(value, line_no);
    else if (full == "solver.accelerate") c.solver.accelerate = to_bool(value, line_no);
    else if (full == "solver.polish_interval") c.solver.polish_interval = to_int(value, line_no);
    else if (full == "solver.beta_cap_factor") c.beta_cap_factor = to_double(value, line_no);
    else if (full == "output.directory") c.output_directory = std::string(value);
    else config_error(line_no, "unknown key '" + full + "'");
  }
  if (!phantom_given) c.phantom = default_phantom(c.contrast);
  validate_config(c);
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream s;
  auto num = [](double v) { return format_double(v); };
  s << "[mesh]\n"
    << "subdivisions = " << c.subdivisions << '\n'
    << "scheme = " << (c.scheme == TriangulationScheme::crossed ? "crossed" : "right_diagonal") << '\n'
    << "data_subdivisions = " << c.data_subdivisions << '\n'
    << "\n[measurements]\n"
    << "patches = " << c.patches << '\n'
    << "\n[pixels]\n"
    << "nx = " << c.pixels_x << '\n'
    << "ny = " << c.pixels_y << '\n'
    << "\n[balls]\n"
    << "per_side = " << c.balls_per_side << '\n'
    << "radius = " << num(c.ball_radius) << '\n'
    << "\n[background]\n"
    << "lambda = " << num(c.background.lambda) << '\n'
    << "mu = " << num(c.background.mu) << '\n'
    << "rho = " << num(c.background.rho) << '\n'
    << "\n[contrast]\n"
    << "lambda = " << num(c.contrast.lambda) << '\n'
    << "mu = " << num(c.contrast.mu) << '\n'
    << "rho = " << num(c.contrast.rho) << '\n';
  if (c.lambda_min || c.mu_min || c.rho_min) {
    s << "\n[bounds]\n";
    if (c.lambda_min) s << "lambda_min = " << num(*c.lambda_min) << '\n';
    if (c.mu_min) s << "mu_min = " << num(*c.mu_min) << '\n';
    if (c.rho_min) s << "rho_min = " << num(*c.rho_min) << '\n';
  }
  s << "\n[phantom]\n";
  for (const auto& shape : c.phantom.shapes) s << "shape = " << format_shape(shape) << '\n';
  s << "\n[noise]\n"
    << "delta = " << num(c.delta) << '\n'
    << "seed = " << c.seed << '\n'
    << "shift = " << (c.shift ? num(*c.shift) : std::string("auto")) << '\n'
    << "\n[method]\n"
    << "name = " << to_string(c.method) << '\n'
    << "support = " << to_string(c.support) << '\n'
    << "threshold = " << num(c.threshold) << '\n'
    << "\n[tsvd]\n"
    << "tau = " << num(c.tau) << '\n'
    << "criterion = " << (c.criterion == EnergyCriterion::squared ? "squared" : "linear") << '\n'
    << "scope = " << (c.scope == TruncationScope::global ? "global" : "per_region") << '\n'
    << "\n[solver]\n"
    << "tolerance = " << num(c.solver.tolerance) << '\n'
    << "max_iterations = " << c.solver.max_iterations << '\n'
    << "accelerate = " << (c.solver.accelerate ? "true" : "false") << '\n'
    << "polish_interval = " << c.solver.polish_interval << '\n'
    << "beta_cap_factor = " << num(c.beta_cap_factor) << '\n'
    << "\n[output]\n"
    << "directory = " << c.output_directory << '\n';
  return s.str();
}

void validate_config(const ExperimentConfig& c) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::config, what);
  };
  check(c.subdivisions >= 2, "mesh.subdivisions must be at least 2");
  check(c.data_subdivisions == 0 || c.data_subdivisions >= c.subdivisions,
        "mesh.data_subdivisions must be 0 or at least mesh.subdivisions");
  check(c.patches >= 1, "measurements.patches must be positive");
  check(c.pixels_x >= 1 && c.pixels_y >= 1, "pixel grid must be nonempty");
  check(c.balls_per_side >= 1 && c.ball_radius > 0.0, "test balls need a positive count and radius");
  for (double v : {c.background.lambda, c.background.mu, c.background.rho, c.contrast.lambda, c.contrast.mu,
                   c.contrast.rho}) {
    check(v > 0.0 && std::isfinite(v), "material values must be positive");
  }
  check(c.contrast.lambda >= c.background.lambda && c.contrast.mu >= c.background.mu &&
            c.contrast.rho >= c.background.rho,
        "contrast values must not fall below the background");
  check(c.effective_lambda_min() > 0.0 && c.effective_mu_min() > 0.0 && c.effective_rho_min() > 0.0,
        "lower variation bounds must be positive (set [bounds] when a contrast equals the background)");
  check(c.delta >= 0.0 && std::isfinite(c.delta), "noise.delta must be nonnegative");
  check(!c.shift || *c.shift >= 0.0, "noise.shift must be nonnegative");
  check(c.threshold > 0.0 && c.threshold < 1.0, "method.threshold must lie in (0,1)");
  check(c.tau > 0.0 && c.tau < 1.0, "tsvd.tau must lie in (0,1)");
  check(c.solver.tolerance > 0.0 && c.solver.max_iterations >= 1, "solver settings must be positive");
  check(c.solver.polish_interval >= 0, "solver.polish_interval must be nonnegative");
  check(c.beta_cap_factor >= 1.0, "solver.beta_cap_factor must be at least 1");
  check(!c.output_directory.empty(), "output.directory must be set");
  try {
    validate_phantom(c.phantom);
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
}

}  // namespace elastomono
