// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/initial_conditions.hpp"
#include "imexrrk/integrator.hpp"

#include <benchmark/benchmark.h>

using namespace imexrrk;

namespace {

void BM_Transform(benchmark::State& state) {
  PeriodicGrid g;
  g.nx = static_cast<int>(state.range(0));
  g.ny = g.nx;
  SpectralContext ctx(g);
  Field f(g);
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = uniform_sample(1, p);
  Spectrum s(g);
  Field back(g);
  for (auto _ : state) {
    ctx.transform(f.values(), s);
    ctx.inverse_transform(s, back);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.size()));
}
BENCHMARK(BM_Transform)->Arg(64)->Arg(128)->Arg(256);

void BM_Step(benchmark::State& state, FlowOperator op, const char* tableau, SteppingMode mode) {
  ModelSpec spec;
  spec.op = op;
  spec.epsilon = op == FlowOperator::allen_cahn ? 0.5 : 1.0;
  spec.grid.nx = static_cast<int>(state.range(0));
  spec.grid.ny = spec.grid.nx;
  Integrator integ(spec, builtin_tableau(tableau));
  auto s = integ.model().make_state(make_initial(InitSpec{}, spec));
  const double tau = op == FlowOperator::allen_cahn ? 1e-2 : 1e-3;
  for (auto _ : state) {
    auto next = integ.step(s, tau, mode).first;
    benchmark::DoNotOptimize(next.r);
  }
}
BENCHMARK_CAPTURE(BM_Step, ac_32_rt, FlowOperator::allen_cahn, "imex-rrk-3-2", SteppingMode::rt)
    ->Arg(128);
BENCHMARK_CAPTURE(BM_Step, ac_32_standard, FlowOperator::allen_cahn, "imex-rrk-3-2",
                  SteppingMode::standard)
    ->Arg(128);
BENCHMARK_CAPTURE(BM_Step, ac_64_rt, FlowOperator::allen_cahn, "imex-rrk-6-4", SteppingMode::rt)
    ->Arg(128);
BENCHMARK_CAPTURE(BM_Step, ch_43_rt, FlowOperator::cahn_hilliard, "imex-rrk-4-3",
                  SteppingMode::rt)
    ->Arg(128);

}  // namespace

BENCHMARK_MAIN();
