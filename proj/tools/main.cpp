#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "elastomono/config.hpp"
#include "elastomono/error.hpp"
#include "elastomono/experiment.hpp"
#include "elastomono/matrix_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOther = 1;

int exit_code(const elastomono::Error& e) {
  using elastomono::ErrorKind;
  switch (e.kind()) {
    case ErrorKind::config:
    case ErrorKind::invalid_argument:
    case ErrorKind::invalid_material:
    case ErrorKind::invalid_patch:
    case ErrorKind::invalid_contrast:
    case ErrorKind::invalid_phantom:
      return kExitConfig;
    case ErrorKind::io:
      return kExitOther;
    default:
      return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotonicity-based shape reconstruction for linear elasticity"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int jobs = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"forward", "simulate data: NtD matrices, gap and sensitivities"},
      {"test", "forward, then the linearized monotonicity test on the test balls"},
      {"reconstruct", "forward, then the box-constrained reconstruction"},
      {"combined", "forward, then the reconstruction with truncated sensitivities"},
      {"score", "forward, then the config's method, with scores"},
      {"all", "every stage"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "noise seed (overrides [noise] seed)");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory (overrides [output] directory)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const auto stage = elastomono::stage_from_string(app.get_subcommands().front()->get_name());
  try {
    auto config = elastomono::parse_config(elastomono::read_file(config_path));
    if (seed) config.seed = *seed;
    if (out_dir) config.output_directory = *out_dir;
    const auto summary = elastomono::run_experiment(config, stage, jobs);
    for (const auto& [name, value] : summary.scores) {
      std::cout << name << ' ' << elastomono::format_double(value) << '\n';
    }
    std::cout << "wrote " << summary.files.size() << " artifacts to " << config.output_directory << '\n';
  } catch (const elastomono::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == elastomono::ErrorKind::io && std::string(e.what()).find(config_path) != std::string::npos) {
      return kExitConfig;
    }
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return 0;
}
