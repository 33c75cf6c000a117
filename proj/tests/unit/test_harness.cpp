// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imexrrk/errors.hpp"
#include "imexrrk/harness.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace imexrrk;

namespace {

ExperimentPreset small_ac() {
  auto p = preset("ac-rrk32");
  p.model.grid.nx = 16;
  p.model.grid.ny = 16;
  p.taus = {0.1, 0.05, 0.025};
  p.t_final = 0.3;
  p.tau_ref = 0.003125;
  return p;
}

}  // namespace

TEST_CASE("order helpers") {
  CHECK(successive_order(0.1, 4e-4, 0.05, 1e-4) == doctest::Approx(2.0));
  CHECK(successive_order(0.3, 27.0, 0.1, 1.0) == doctest::Approx(3.0));
  CHECK(std::isnan(successive_order(0.1, 0.0, 0.05, 1e-4)));
  CHECK(loglog_slope({1.0, 0.5, 0.25}, {1.0, 0.125, 0.015625}) == doctest::Approx(3.0));
  // Non-positive entries are skipped.
  CHECK(loglog_slope({1.0, 0.5, 0.25}, {1.0, 0.0, 0.0625}) == doctest::Approx(2.0));
  CHECK(std::isnan(loglog_slope({1.0}, {1.0})));
}

TEST_CASE("component errors") {
  PeriodicGrid g;
  g.nx = 8;
  g.ny = 8;
  Fields a{Field(g, 1.0), Field(g, 2.0)};
  Fields b{Field(g, 1.5), Field(g, 1.0)};
  const auto e = component_errors(a, b);
  REQUIRE(e.size() == 2);
  CHECK(e[0] == 0.5);
  CHECK(e[1] == 1.0);
  CHECK_THROWS_AS(component_errors(a, {Field(g)}), DimensionError);
}

TEST_CASE("presets are consistent") {
  const auto names = preset_names();
  CHECK(names.size() >= 16);
  for (const auto& n : names) {
    CAPTURE(n);
    const auto p = preset(n);
    CHECK(p.name == n);
    CHECK_NOTHROW(p.check());
    CHECK_NOTHROW(resolve_tableau(p.tableau));
    for (std::size_t i = 1; i < p.taus.size(); ++i) CHECK(p.taus[i] < p.taus[i - 1]);
  }
  CHECK_THROWS_AS(preset("ac-rrk99"), ConfigurationError);
  CHECK(preset("ac-rrk32").reference_step() == doctest::Approx(1.0 / 800.0 / 16.0));
  CHECK(preset("vac-rrk43").reference_step() == 1e-4);
  CHECK(preset("ch-rrk43").model.op == FlowOperator::cahn_hilliard);
  CHECK(preset("vac-merge").composite);
}

TEST_CASE("preset checks") {
  auto p = small_ac();
  p.taus = {0.05, 0.1};
  CHECK_THROWS_AS(p.check(), ConfigurationError);
  p = small_ac();
  p.taus.clear();
  CHECK_THROWS_AS(p.check(), ConfigurationError);
  p = small_ac();
  p.tableau = "imex-rrk-5-9";
  CHECK_THROWS_AS(p.check(), UnknownTableauError);
}

TEST_CASE("tanh circles form a partition of unity") {
  const auto p = preset("vac-merge");
  const auto u = make_initial(p.init, p.model);
  REQUIRE(u.size() == 3);
  double worst = 0.0;
  double lo = 1.0, hi = 0.0;
  for (std::size_t q = 0; q < u[0].size(); ++q) {
    worst = std::max(worst, std::abs(u[0][q] + u[1][q] + u[2][q] - 1.0));
    lo = std::min(lo, u[0][q]);
    hi = std::max(hi, u[0][q]);
  }
  CHECK(worst <= 1e-15);
  CHECK(lo >= 0.0);
  CHECK(hi > 0.99);
}

TEST_CASE("random initial data is reproducible") {
  CHECK(uniform_sample(1, 0) == uniform_sample(1, 0));
  CHECK(uniform_sample(1, 0) != uniform_sample(2, 0));
  double lo = 1.0, hi = -1.0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double v = uniform_sample(42, i);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= -1.0);
  CHECK(hi < 1.0);
  CHECK(lo < -0.99);
  CHECK(hi > 0.99);
  const auto p = preset("ch-separation");
  const auto a = make_initial(p.init, p.model);
  const auto b = make_initial(p.init, p.model);
  CHECK((a[0] - b[0]).max_abs() == 0.0);
  InitSpec bad;
  bad.kind = "gaussian";
  CHECK_THROWS_AS(bad.check(1), ConfigurationError);
}

TEST_CASE("parallel_for") {
  std::atomic<int> sum{0};
  parallel_for(10, 3, [&](int i) { sum += i; });
  CHECK(sum == 45);
  CHECK_THROWS_AS(parallel_for(4, 2,
                               [](int i) {
                                 if (i == 2) throw std::runtime_error("job 2");
                               }),
                  std::runtime_error);
}

TEST_CASE("reference solutions") {
  const auto p = small_ac();
  const double tau_ref = 0.0125;
  // At the initial time the reference is the initial state.
  const auto s0 = reference_solution(p, tau_ref, 0.0);
  const auto init = make_initial(p.init, p.model);
  CHECK((s0.u[0] - init[0]).max_abs() == 0.0);
  CHECK(s0.t_hat == 0.0);

  // Several targets in one march agree with separate marches.
  const auto many = reference_solutions(p, tau_ref, {0.3, 0.1037, 0.25});
  const auto single = reference_solution(p, tau_ref, 0.1037);
  CHECK(many[1].t_hat == 0.1037);
  CHECK((many[1].u[0] - single.u[0]).max_abs() == 0.0);
  const auto end = reference_solution(p, tau_ref, 0.3);
  CHECK((many[0].u[0] - end.u[0]).max_abs() <= 1e-15);
  CHECK_THROWS_AS(reference_solution(p, 0.0, 0.3), ConfigurationError);
}

TEST_CASE("convergence study on a small problem") {
  const auto p = small_ac();
  const auto study = convergence_study(p);
  REQUIRE(study.rows.size() == 3);
  CHECK(study.order == 2);
  CHECK(std::isnan(study.rows[0].order_rt));
  for (const auto& r : study.rows) {
    CHECK(r.failure.empty());
    CHECK(r.error_rt > 0.0);
    CHECK(r.error_idt > r.error_rt);
    CHECK(r.max_gamma_deviation > 0.0);
  }
  CHECK(study.rows[2].order_rt > 1.5);
  CHECK(study.gamma_slope.values.size() == 3);
  const auto [g, gn] = slope_studies(p);
  CHECK(g.values == study.gamma_slope.values);
  CHECK(gn.values == study.gn_slope.values);
  auto fine = p;
  fine.slope_taus = {p.taus[1], p.taus[2]};
  const auto [gf, gnf] = slope_studies(fine);
  CHECK(gf.taus == fine.slope_taus);
  CHECK(gf.values == std::vector<double>{g.values[1], g.values[2]});
  fine.slope_taus = {0.01, 0.02};
  CHECK_THROWS_AS(fine.check(), ConfigurationError);

  HarnessOptions two;
  two.threads = 2;
  const auto again = convergence_study(p, two);
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    CHECK(again.rows[i].error_rt == study.rows[i].error_rt);
    CHECK(again.rows[i].error_idt == study.rows[i].error_idt);
    CHECK(again.rows[i].t_hat_rt == study.rows[i].t_hat_rt);
  }
}

TEST_CASE("energy trace") {
  auto p = small_ac();
  p.taus = {0.05};
  p.t_final = 1.0;
  const auto trace = energy_trace(p);
  CHECK(trace.monotone);
  CHECK(trace.first_violation == 0);
  CHECK(trace.records.size() >= 19u);
  for (const auto& r : trace.records) CHECK(r.energy_modified <= r.energy_modified_before + 1e-10);
}

TEST_CASE("snapshots") {
  auto p = small_ac();
  p.taus = {0.05};
  p.snapshot_times = {0.0, 0.2, 0.5};
  int calls = 0;
  const auto snaps = phase_separation(p, [&](const Snapshot&) { ++calls; });
  REQUIRE(snaps.size() == 3);
  CHECK(calls == 3);
  CHECK(snaps[0].step == 0);
  CHECK(snaps[1].t_hat >= 0.2 - 1e-12);
  CHECK(snaps[2].t_hat >= 0.5 - 1e-12);
  CHECK(snaps[2].t_hat < 0.5 + 0.06);
}
