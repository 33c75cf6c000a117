// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dense_oracle.hpp"
#include "imexrrk/errors.hpp"
#include "imexrrk/initial_conditions.hpp"
#include "imexrrk/model.hpp"

#include <cmath>
#include <numbers>

using namespace imexrrk;

namespace {

ModelSpec small_spec(FlowOperator op, int n = 8) {
  ModelSpec s;
  s.op = op;
  s.epsilon = 0.5;
  s.grid.nx = n;
  s.grid.ny = n;
  return s;
}

Fields random_fields(const ModelSpec& s, std::uint64_t seed) {
  InitSpec init;
  init.kind = "random";
  init.amplitude = 0.8;
  init.seed = seed;
  return make_initial(init, s);
}

}  // namespace

TEST_CASE("potentials") {
  const auto dw = Potential::double_well();
  const auto mw = Potential::multi_well();
  CHECK(dw.value(1.0) == 0.0);
  CHECK(dw.value(-1.0) == 0.0);
  CHECK(dw.value(0.0) == 0.25);
  CHECK(mw.value(0.0) == 0.0);
  CHECK(mw.value(1.0) == 0.0);
  CHECK(mw.value(0.5) == doctest::Approx(1.0 / 64.0));
  // Central differences of F match F'.
  for (const auto& p : {dw, mw}) {
    for (double u : {-1.3, -0.2, 0.1, 0.7, 1.6}) {
      const double h = 1e-6;
      const double fd = (p.value(u + h) - p.value(u - h)) / (2.0 * h);
      CHECK(p.derivative(u) == doctest::Approx(fd).epsilon(1e-8));
    }
  }
  CHECK(Potential::from_name("multi-well") == mw);
  CHECK(Potential::from_name("double-well") == dw);
  CHECK_THROWS_AS(Potential::from_name("triple-well"), ConfigurationError);
  CHECK(flow_operator_from_name("cahn-hilliard") == FlowOperator::cahn_hilliard);
  CHECK(to_string(FlowOperator::allen_cahn) == "allen-cahn");
  CHECK_THROWS_AS(flow_operator_from_name("heat"), ConfigurationError);
}

TEST_CASE("model spec checks") {
  auto s = small_spec(FlowOperator::allen_cahn);
  CHECK_NOTHROW(s.check());
  s.epsilon = 0.0;
  CHECK_THROWS_AS(s.check(), ConfigurationError);
  s = small_spec(FlowOperator::cahn_hilliard);
  s.components = 3;
  CHECK_THROWS_AS(s.check(), ConfigurationError);
  s = small_spec(FlowOperator::allen_cahn);
  s.c0 = -1.0;
  CHECK_THROWS_AS(s.check(), ConfigurationError);
}

TEST_CASE("operators against dense matrices") {
  for (auto op : {FlowOperator::allen_cahn, FlowOperator::cahn_hilliard}) {
    CAPTURE(to_string(op));
    auto spec = small_spec(op);
    spec.c0 = 0.3;
    GradientFlow model(spec);
    oracle::DenseModel dense(spec);
    const Fields u = random_fields(spec, 4);
    const double r = 1.7;
    const std::vector<oracle::Vec> uv{oracle::to_vec(u[0])};
    std::vector<oracle::Vec> l, n;
    double nt = 0.0;
    dense.ops(uv, r, l, n, nt);

    CHECK(oracle::rel_diff(oracle::to_vec(model.apply_L(u[0])), l[0]) <= 1e-12);
    CHECK(oracle::rel_diff(oracle::to_vec(model.apply_N(u, r)[0]), n[0]) <= 1e-12);
    CHECK(model.apply_Ntilde(u, r) == doctest::Approx(nt).epsilon(1e-12));
    CHECK(model.e1(u) == doctest::Approx(dense.e1(uv)).epsilon(1e-14));
  }
}

TEST_CASE("energies") {
  auto spec = small_spec(FlowOperator::allen_cahn, 32);
  spec.c0 = 0.5;
  GradientFlow model(spec);
  InitSpec init;
  const auto s = model.make_state(make_initial(init, spec));
  CHECK(s.r == doctest::Approx(std::sqrt(model.e1(s.u) + 0.5)));
  // With r consistent with u the two energies agree.
  CHECK(model.modified_energy(s) == doctest::Approx(model.original_energy(s)).epsilon(1e-13));
  // 0.5 sin x sin y: |grad u|^2 integrates to 0.25 * 2 * pi^2 on (0, 2pi)^2.
  const double pi = std::numbers::pi;
  const double grad = 0.25 * 2.0 * pi * pi;
  CHECK(model.original_energy(s) - model.e1(s.u) ==
        doctest::Approx(0.5 * 0.25 * grad).epsilon(1e-12));
}

TEST_CASE("dissipation rate has the right sign") {
  for (auto op : {FlowOperator::allen_cahn, FlowOperator::cahn_hilliard}) {
    auto spec = small_spec(op, 16);
    GradientFlow model(spec);
    const auto u = random_fields(spec, 9);
    CHECK(model.dissipation_rate(u, model.init_r(u)) < 0.0);
  }
}

TEST_CASE("chemical potential") {
  auto spec = small_spec(FlowOperator::allen_cahn, 16);
  GradientFlow model(spec);
  const auto u = random_fields(spec, 2);
  const double r = model.init_r(u);
  const auto mu = model.chemical_potential(u, r);
  // For Allen-Cahn L + N = -mu.
  Field lhs = model.apply_L(u[0]);
  lhs += model.apply_N(u, r)[0];
  lhs += mu[0];
  CHECK(lhs.max_abs() <= 1e-12 * mu[0].max_abs());
}

TEST_CASE("SAV degeneracy") {
  auto spec = small_spec(FlowOperator::allen_cahn);
  GradientFlow model(spec);
  const Fields pure{Field(spec.grid, 1.0)};
  CHECK(model.init_r(pure) == 0.0);
  CHECK_THROWS_AS(model.apply_Ntilde(pure, 0.0), SavDegeneracyError);
  CHECK_THROWS_AS(model.apply_N(pure, 0.0), SavDegeneracyError);
  spec.c0 = 1.0;
  GradientFlow shifted(spec);
  CHECK_NOTHROW(shifted.apply_Ntilde(pure, 1.0));
}

TEST_CASE("field count and grid mismatches") {
  auto spec = small_spec(FlowOperator::allen_cahn);
  spec.components = 2;
  spec.potential = Potential::multi_well();
  GradientFlow model(spec);
  const Fields one{Field(spec.grid, 0.3)};
  CHECK_THROWS_AS((void)model.e1(one), DimensionError);
  PeriodicGrid other = spec.grid;
  other.nx = 16;
  const Fields wrong{Field(other, 0.3), Field(other, 0.3)};
  CHECK_THROWS_AS((void)model.e1(wrong), DimensionError);
}
