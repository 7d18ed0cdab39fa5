#include <benchmark/benchmark.h>

#include "afmfem/llg.hpp"

using namespace afmfem;

namespace {

MaterialParams toy_material() {
  MaterialParams params;
  params.a11 = 2.0;
  params.a22 = 1.0;
  params.a12 = -0.5;
  params.a0 = -100.0;
  params.q1 = 5.0;
  params.q2 = 10.0;
  params.axis1 = params.axis2 = Vec3(1.0, 1.0, 1.0).normalized();
  return params;
}

struct Setup {
  Mesh mesh;
  FemSystem fem;
  SublatticePair pair;

  explicit Setup(int n)
      : mesh(generate_box_mesh(n, n, n, Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5))),
        fem(assemble(mesh)),
        pair(make_random_pair(7, mesh.n_vertices())) {}
};

void bm_flow_step_decoupled(benchmark::State& state) {
  const Setup setup(static_cast<int>(state.range(0)));
  FlowConfig config;
  config.theta = ThetaScheme::decoupled();
  config.tau = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(flow_step(setup.pair, toy_material(), config, setup.mesh, setup.fem));
}
BENCHMARK(bm_flow_step_decoupled)->Arg(8)->Arg(12);

void bm_flow_step_coupled(benchmark::State& state) {
  const Setup setup(static_cast<int>(state.range(0)));
  FlowConfig config;
  config.theta = ThetaScheme::coupled();
  config.tau = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(flow_step(setup.pair, toy_material(), config, setup.mesh, setup.fem));
}
BENCHMARK(bm_flow_step_coupled)->Arg(8)->Arg(12);

void bm_llg_step(benchmark::State& state) {
  const Setup setup(static_cast<int>(state.range(0)));
  const LLGParams llg;
  for (auto _ : state)
    benchmark::DoNotOptimize(llg_step(setup.pair, toy_material(), llg, FieldSchedule{}, 0.0,
                                      1e-3, SolverOptions{}, setup.mesh, setup.fem));
}
BENCHMARK(bm_llg_step)->Arg(8)->Arg(12);

void bm_energy(benchmark::State& state) {
  const Setup setup(static_cast<int>(state.range(0)));
  const MaterialParams params = toy_material();
  for (auto _ : state)
    benchmark::DoNotOptimize(energy(setup.pair, params, setup.mesh, setup.fem));
}
BENCHMARK(bm_energy)->Arg(8)->Arg(16);

}  // namespace
