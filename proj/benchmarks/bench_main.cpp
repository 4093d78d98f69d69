#include <map>

#include <benchmark/benchmark.h>

#include "elastomono/box_qp.hpp"
#include "elastomono/constrained.hpp"
#include "elastomono/experiment.hpp"
#include "elastomono/phantom.hpp"
#include "elastomono/tsvd.hpp"

namespace em = elastomono;

namespace {

// Background solutions and pixel sensitivities at mesh size n, m = 19.
struct Scene {
  em::Mesh mesh;
  em::LoadBasis basis;
  em::MaterialField background;
  em::NtdAssembly bg;
  em::PixelGrid grid;

  explicit Scene(int n)
      : mesh(em::Mesh::unit_square(n)),
        basis(em::build_load_basis(mesh, em::partition_neumann_boundary(mesh, 19))),
        background(em::MaterialField::uniform(mesh.element_count(), 1, 1, 1)),
        bg(em::assemble_ntd(mesh, background, basis)),
        grid(em::make_pixel_grid(mesh, 17, 17)) {}
};

const Scene& scene(int n) {
  static std::map<int, Scene> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Scene(n)).first;
  return it->second;
}

void BM_StiffnessFactorization(benchmark::State& state) {
  const auto& s = scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    em::StiffnessSystem sys(s.mesh, s.background);
    benchmark::DoNotOptimize(sys);
  }
  state.counters["dofs"] = s.mesh.dof_count();
}
BENCHMARK(BM_StiffnessFactorization)->Arg(17)->Arg(34)->Arg(51)->Unit(benchmark::kMillisecond);

void BM_NtdAssembly(benchmark::State& state) {
  const auto& s = scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(em::assemble_ntd(s.mesh, s.background, s.basis));
}
BENCHMARK(BM_NtdAssembly)->Arg(17)->Arg(34)->Arg(51)->Unit(benchmark::kMillisecond);

void BM_PixelSensitivities(benchmark::State& state) {
  const auto& s = scene(51);
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(em::assemble_sensitivities(s.mesh, s.bg.solutions, s.grid.cells, jobs));
}
BENCHMARK(BM_PixelSensitivities)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

struct Problem {
  em::SensitivityStack stack;
  Eigen::MatrixXd gap;
  em::BoxConstraints constraints;
};

const Problem& problem() {
  static const Problem p = [] {
    const auto& s = scene(51);
    em::Phantom ph;
    ph.shapes.push_back({em::Disc{{0.5, 0.5}, 0.15}, 2.0, 2.0, 2.0});
    const auto truth = em::build_phantom_material(s.mesh, {1, 1, 1}, ph);
    Problem out;
    out.stack = em::assemble_sensitivities(s.mesh, s.bg.solutions, s.grid.cells);
    out.gap = em::gap_matrix(s.bg.ntd, em::assemble_ntd(s.mesh, truth, s.basis).ntd);
    out.constraints =
        em::single_support_constraints(out.stack, out.gap, em::compute_box_bounds(1, 1, 1, 1, 1, 1));
    return out;
  }();
  return p;
}

void BM_BetaBounds(benchmark::State& state) {
  const auto& p = problem();
  const auto bounds = em::compute_box_bounds(1, 1, 1, 1, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(em::single_support_constraints(p.stack, p.gap, bounds));
}
BENCHMARK(BM_BetaBounds)->Unit(benchmark::kMillisecond);

void BM_ConstrainedSolve(benchmark::State& state) {
  const auto& p = problem();
  em::SolverOptions opts;
  opts.polish_interval = static_cast<int>(state.range(0));
  int iterations = 0;
  for (auto _ : state) iterations = em::minimize_single_support(p.stack, p.gap, p.constraints, opts).iterations;
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_ConstrainedSolve)->Arg(25)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_TruncateStack(benchmark::State& state) {
  const auto& p = problem();
  for (auto _ : state) benchmark::DoNotOptimize(em::truncate_sensitivity_stack(p.stack, 0.99));
}
BENCHMARK(BM_TruncateStack)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
