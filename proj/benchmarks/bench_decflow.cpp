#include "decflow/darcy.hpp"
#include "decflow/meshio.hpp"
#include "decflow/whitney.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace decflow;

namespace {

MeshData square(int k) {
  GridOptions opt;
  opt.pattern = GridPattern::offset_columns;
  opt.perturb = 0.1;
  opt.seed = 3;
  return generate_structured(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), {k, k}, opt);
}

DarcyProblem problem_for(const MeshData& mesh) {
  auto c = std::make_shared<const SimplicialComplex>(mesh.to_complex());
  auto m = std::make_shared<const DualMeasures>(dual_measures(*c));
  DarcyProblem::Data d;
  d.kappa.assign(static_cast<std::size_t>(c->num_cells()), 1.0);
  d.boundary_flux = flux_cochain(*c, [](const Point& x) {
    Point v(2);
    v << 1.0 + x[1], x[0] * x[0];
    return v;
  });
  d.source = source_from_flux(*c, d.boundary_flux);
  return DarcyProblem::create(c, m, std::move(d));
}

void BM_BuildComplex(benchmark::State& state) {
  const auto mesh = square(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mesh.to_complex());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(mesh.cells.size()));
}

void BM_DualMeasures(benchmark::State& state) {
  const auto c = square(static_cast<int>(state.range(0))).to_complex();
  for (auto _ : state) benchmark::DoNotOptimize(dual_measures(c));
  state.SetItemsProcessed(state.iterations() * c.num_cells());
}

void BM_SchurSolve(benchmark::State& state) {
  const auto problem = problem_for(square(static_cast<int>(state.range(0))));
  const auto reduced = eliminate_knowns(assemble_saddle_system(problem), problem.known_fluxes(), problem.pin());
  for (auto _ : state) benchmark::DoNotOptimize(schur_solve(reduced.system));
  state.counters["unknowns"] = static_cast<double>(reduced.system.dim());
}

void BM_DirectSolve(benchmark::State& state) {
  const auto problem = problem_for(square(static_cast<int>(state.range(0))));
  const auto reduced = eliminate_knowns(assemble_saddle_system(problem), problem.known_fluxes(), problem.pin());
  for (auto _ : state) benchmark::DoNotOptimize(direct_solve(reduced.system));
  state.counters["unknowns"] = static_cast<double>(reduced.system.dim());
}

void BM_SolveDarcy(benchmark::State& state) {
  const auto problem = problem_for(square(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(solve_darcy(problem));
  state.SetItemsProcessed(state.iterations() * problem.complex().num_cells());
}

void BM_VelocityAtBarycenters(benchmark::State& state) {
  const auto problem = problem_for(square(static_cast<int>(state.range(0))));
  const auto sol = solve_darcy(problem);
  for (auto _ : state) benchmark::DoNotOptimize(velocity_at_barycenters(problem.complex(), sol.flux.values));
  state.SetItemsProcessed(state.iterations() * problem.complex().num_cells());
}

}  // namespace

BENCHMARK(BM_BuildComplex)->Arg(16)->Arg(64)->Arg(128);
BENCHMARK(BM_DualMeasures)->Arg(16)->Arg(64)->Arg(128);
BENCHMARK(BM_SchurSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveDarcy)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VelocityAtBarycenters)->Arg(64);
BENCHMARK_MAIN();
