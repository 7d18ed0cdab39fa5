#include <benchmark/benchmark.h>

#include "afmfem/fields.hpp"

using namespace afmfem;

namespace {

Mesh box(int n) { return generate_box_mesh(n, n, n, Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)); }

void bm_generate_box(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(box(n));
  state.SetLabel(std::to_string((n + 1) * (n + 1) * (n + 1)) + " vertices");
}
BENCHMARK(bm_generate_box)->Arg(8)->Arg(16)->Arg(24);

void bm_assemble_stiffness(benchmark::State& state) {
  const Mesh mesh = box(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(mesh));
}
BENCHMARK(bm_assemble_stiffness)->Arg(8)->Arg(16);

void bm_assemble_mass(benchmark::State& state) {
  const Mesh mesh = box(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_mass(mesh));
}
BENCHMARK(bm_assemble_mass)->Arg(8)->Arg(16);

void bm_constraint_report(benchmark::State& state) {
  const Mesh mesh = box(static_cast<int>(state.range(0)));
  const FemSystem fem = assemble(mesh);
  SublatticePair pair = make_random_pair(1, mesh.n_vertices());
  pair.m1 *= 1.05;  // force the exact |affine| integration path
  for (auto _ : state) benchmark::DoNotOptimize(constraint_report(pair, mesh, fem));
}
BENCHMARK(bm_constraint_report)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
