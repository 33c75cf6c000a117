// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/integrator.hpp"

#include "imexrrk/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace imexrrk {

std::string_view to_string(SteppingMode mode) {
  switch (mode) {
    case SteppingMode::standard:
      return "standard";
    case SteppingMode::idt:
      return "idt";
    case SteppingMode::rt:
      return "rt";
  }
  return "?";
}

SteppingMode stepping_mode_from_name(std::string_view name) {
  if (name == "standard") return SteppingMode::standard;
  if (name == "idt") return SteppingMode::idt;
  if (name == "rt") return SteppingMode::rt;
  throw ConfigurationError(
      fmt::format("unknown mode '{}'; expected standard, idt or rt", name));
}

namespace {

void require_positive_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigurationError(fmt::format("step size must be positive, got {}", tau));
  }
}

}  // namespace

Integrator::Integrator(ModelSpec spec, DoubleButcherTableau tableau,
                       IntegratorOptions options)
    : model_(std::move(spec)),
      tableau_(std::move(tableau)),
      report_(validate(tableau_)),
      options_(options),
      tmp_(model_.grid()) {
  if (!report_.passed()) {
    throw ConfigurationError(fmt::format(
        "tableau '{}' failed validation:\n{}", tableau_.name, report_.describe()));
  }
}

void Integrator::fill_stages(const SavState& state,
                             const std::vector<Spectrum>& u_hat, double tau,
                             StageData& out) {
  const int s = tableau_.stages();
  const int k = model_.components();
  const auto& a = tableau_.a;
  const auto& abar = tableau_.abar;
  auto& ctx = model_.context();

  out.u.resize(s);
  out.u_hat.resize(s);
  out.r.assign(s, 0.0);
  out.eval.resize(s);

  for (int i = 0; i < s; ++i) {
    auto& ui = out.u[i];
    auto& ui_hat = out.u_hat[i];
    ui.resize(k);
    ui_hat.resize(k);

    bool trivial = tau * a(i, i) == 0.0;
    for (int j = 0; j < i && trivial; ++j) {
      trivial = tau * a(i, j) == 0.0 && tau * abar(i, j) == 0.0;
    }

    for (int l = 0; l < k; ++l) {
      if (trivial) {
        ui_hat[l] = u_hat[l];
        ui[l] = state.u[l];
        continue;
      }
      auto& rhs = ui_hat[l];
      rhs = u_hat[l];
      for (int j = 0; j < i; ++j) {
        const auto& ev = out.eval[j];
        const double ca = tau * a(i, j);
        const double cb = tau * abar(i, j);
        if (ca != 0.0) rhs.axpy(ca, ev.l_hat[l]);
        if (cb != 0.0) rhs.axpy(cb, ev.n_hat[l]);
      }
      ctx.solve_diagonal(rhs, model_.linear_symbol(), tau * a(i, i));
      ctx.inverse_transform(rhs, ui[l]);
    }

    double ri = state.r;
    for (int j = 0; j < i; ++j) ri += tau * abar(i, j) * out.eval[j].ntilde;
    out.r[i] = ri;

    model_.evaluate(ui, ui_hat, ri, out.eval[i], i);
  }
}

StageData Integrator::compute_stages(const SavState& state, double tau) {
  if (!(tau >= 0.0)) {
    throw ConfigurationError(fmt::format("step size must be >= 0, got {}", tau));
  }
  auto& ctx = model_.context();
  std::vector<Spectrum> u_hat;
  for (const auto& f : state.u) u_hat.push_back(ctx.transform(f));
  StageData st;
  fill_stages(state, u_hat, tau, st);
  return st;
}

void Integrator::increment(const StageData& st, std::vector<Spectrum>& d,
                           double& nt) const {
  const int s = tableau_.stages();
  const int k = model_.components();
  d.resize(k);
  nt = 0.0;
  for (int l = 0; l < k; ++l) {
    d[l] = Spectrum(model_.grid());
    for (int i = 0; i < s; ++i) {
      if (tableau_.b(i) != 0.0) d[l].axpy(tableau_.b(i), st.eval[i].l_hat[l]);
      if (tableau_.bbar(i) != 0.0) d[l].axpy(tableau_.bbar(i), st.eval[i].n_hat[l]);
    }
  }
  for (int i = 0; i < s; ++i) nt += tableau_.bbar(i) * st.eval[i].ntilde;
}

GammaResult Integrator::gamma_from(const std::vector<Spectrum>& u_hat, double r,
                                   const StageData& st, double tau) const {
  const int s = tableau_.stages();
  const int k = model_.components();
  const double eps2 = model_.spec().epsilon * model_.spec().epsilon;
  auto& ctx = const_cast<GradientFlow&>(model_).context();
  const auto& k2 = ctx.k_squared();
  const auto& w = ctx.mode_weights();
  const double area = model_.grid().area();

  std::vector<Spectrum> d;
  double nt = 0.0;
  increment(st, d, nt);

  GammaResult g;
  double grad_d = 0.0;
  double grad_u = 0.0;
  for (int l = 0; l < k; ++l) {
    grad_d += ctx.grad_norm_sq(d[l]);
    grad_u += ctx.grad_norm_sq(u_hat[l]);
  }
  g.denominator = 0.5 * eps2 * grad_d + nt * nt;

  double num = 0.0;
  for (int i = 0; i < s; ++i) {
    const double bi = tableau_.b(i);
    const double bbi = tableau_.bbar(i);
    for (int l = 0; l < k; ++l) {
      const auto& uh = u_hat[l].modes;
      const auto& Uh = st.u_hat[i][l].modes;
      const auto& Lh = st.eval[i].l_hat[l].modes;
      const auto& Nh = st.eval[i].n_hat[l].modes;
      double acc = 0.0;
      for (std::size_t m = 0; m < uh.size(); ++m) {
        const Complex diff = uh[m] - Uh[m];
        const Complex comb = bi * Lh[m] + bbi * Nh[m];
        // <f, Lap g> = |Omega| sum w (-|k|^2) Re(f conj g)
        acc -= w[m] * k2[m] *
               (diff.real() * comb.real() + diff.imag() * comb.imag());
      }
      num += eps2 * acc * area;
    }
    num -= 2.0 * (r - st.r[i]) * bbi * st.eval[i].ntilde;
  }
  g.numerator = num;

  const double scale = 0.5 * eps2 * std::max(1.0, grad_u) + std::max(1.0, r * r);
  if (g.denominator <= options_.denominator_floor * scale) {
    g.gamma = 1.0;
    g.relaxed = false;
  } else {
    g.gamma = num / (tau * g.denominator);
    g.relaxed = true;
  }
  return g;
}

GammaResult Integrator::compute_gamma(const SavState& state,
                                      const StageData& stages, double tau) {
  require_positive_tau(tau);
  auto& ctx = model_.context();
  std::vector<Spectrum> u_hat;
  for (const auto& f : state.u) u_hat.push_back(ctx.transform(f));
  auto g = gamma_from(u_hat, state.r, stages, tau);
  if (!(g.gamma > 0.0)) {
    throw NonPositiveRelaxationError(
        fmt::format("relaxation coefficient gamma = {} <= 0 at tau = {}; "
                    "reduce the step size",
                    g.gamma, tau),
        g.gamma, tau);
  }
  return g;
}

double Integrator::dissipation_ur(const StageData& st) const {
  const int s = tableau_.stages();
  const int k = model_.components();
  const double eps2 = model_.spec().epsilon * model_.spec().epsilon;
  auto& ctx = const_cast<GradientFlow&>(model_).context();
  const auto& k2 = ctx.k_squared();
  const auto& w = ctx.mode_weights();
  const double area = model_.grid().area();

  double total = 0.0;
  for (int i = 0; i < s; ++i) {
    const double bi = tableau_.b(i);
    const double bbi = tableau_.bbar(i);
    for (int l = 0; l < k; ++l) {
      const auto& Uh = st.u_hat[i][l].modes;
      const auto& Lh = st.eval[i].l_hat[l].modes;
      const auto& Nh = st.eval[i].n_hat[l].modes;
      double acc = 0.0;
      for (std::size_t m = 0; m < Uh.size(); ++m) {
        const Complex comb = bi * Lh[m] + bbi * Nh[m];
        acc -= w[m] * k2[m] *
               (Uh[m].real() * comb.real() + Uh[m].imag() * comb.imag());
      }
      total -= eps2 * acc * area;
    }
    total += 2.0 * st.r[i] * bbi * st.eval[i].ntilde;
  }
  return total;
}

double Integrator::g_n(double gamma, const SavState& state,
                       const StageData& stages, double tau) {
  auto& ctx = model_.context();
  std::vector<Spectrum> u_hat;
  for (const auto& f : state.u) u_hat.push_back(ctx.transform(f));
  std::vector<Spectrum> d;
  double nt = 0.0;
  increment(stages, d, nt);

  const double e_old = model_.modified_energy(u_hat, state.r);
  for (std::size_t l = 0; l < u_hat.size(); ++l) u_hat[l].axpy(gamma * tau, d[l]);
  const double e_new = model_.modified_energy(u_hat, state.r + gamma * tau * nt);
  return e_new - e_old - gamma * tau * dissipation_ur(stages);
}

double Integrator::g_n_quadratic(double gamma, const GammaResult& g, double tau) {
  return -gamma * tau * g.numerator + gamma * gamma * tau * tau * g.denominator;
}

std::pair<SavState, StepRecord> Integrator::step(const SavState& state,
                                                 double tau, SteppingMode mode) {
  require_positive_tau(tau);
  auto& ctx = model_.context();
  const int k = model_.components();
  if (static_cast<int>(state.u.size()) != k) {
    throw DimensionError(
        fmt::format("state has {} components, model expects {}", state.u.size(), k));
  }

  u_hat_.resize(k);
  for (int l = 0; l < k; ++l) ctx.transform(state.u[l].values(), u_hat_[l]);

  StepRecord rec;
  rec.tau = tau;
  rec.t_hat_before = state.t_hat;
  rec.energy_modified_before = model_.modified_energy(u_hat_, state.r);

  fill_stages(state, u_hat_, tau, work_);

  double gamma = 1.0;
  const bool need_terms = mode != SteppingMode::standard || options_.gn_diagnostics;
  GammaResult g;
  if (need_terms) g = gamma_from(u_hat_, state.r, work_, tau);
  if (mode != SteppingMode::standard) {
    if (!(g.gamma > 0.0)) {
      throw NonPositiveRelaxationError(
          fmt::format("relaxation coefficient gamma = {} <= 0 at tau = {}; "
                      "reduce the step size",
                      g.gamma, tau),
          g.gamma, tau);
    }
    gamma = g.gamma;
  }
  if (options_.gn_diagnostics) rec.gn_at_1 = g_n_quadratic(1.0, g, tau);

  double nt = 0.0;
  increment(work_, d_hat_, nt);

  SavState next;
  next.u.resize(k);
  next.r = state.r + gamma * tau * nt;
  for (int l = 0; l < k; ++l) {
    u_hat_[l].axpy(gamma * tau, d_hat_[l]);
    ctx.inverse_transform(u_hat_[l], next.u[l]);
  }
  next.t_hat = state.t_hat + (mode == SteppingMode::rt ? gamma * tau : tau);

  rec.gamma = gamma;
  rec.t_hat_after = next.t_hat;
  rec.r = next.r;
  rec.energy_modified = model_.modified_energy(u_hat_, next.r);
  {
    const double eps2 = model_.spec().epsilon * model_.spec().epsilon;
    double grad = 0.0;
    for (const auto& s : u_hat_) grad += ctx.grad_norm_sq(s);
    rec.energy_original = 0.5 * eps2 * grad + model_.e1(next.u);
  }
  rec.mass.resize(k);
  for (int l = 0; l < k; ++l) rec.mass[l] = integrate(next.u[l]);
  for (int i = 0; i < tableau_.stages(); ++i) {
    rec.stage_dissipation +=
        tableau_.b(i) * model_.dissipation_rate(work_.u_hat[i], work_.eval[i]);
  }

  if (!std::isfinite(rec.energy_modified) || !std::isfinite(next.r)) {
    throw Error(fmt::format("non-finite state after step at t_hat = {}", state.t_hat));
  }
  if (mode != SteppingMode::standard && options_.energy_check &&
      report_.dissipative_weights()) {
    const double e0 = rec.energy_modified_before;
    if (rec.energy_modified > e0 + options_.energy_tolerance * (1.0 + std::abs(e0))) {
      throw EnergyIncreaseError(fmt::format(
          "modified energy increased from {} to {} (gamma = {}, tau = {})", e0,
          rec.energy_modified, gamma, tau));
    }
  }
  return {std::move(next), std::move(rec)};
}

Trajectory Integrator::integrate_to(SavState state, double t_final, double tau,
                                    SteppingMode mode,
                                    const StepObserver& observer) {
  require_positive_tau(tau);
  Trajectory out;
  long n = 0;
  while (state.t_hat < t_final - 1e-9 * tau) {
    try {
      auto [next, rec] = step(state, tau, mode);
      rec.step = n + 1;
      state = std::move(next);
      if (observer) observer(rec, state);
      out.records.push_back(std::move(rec));
    } catch (const StepFailure&) {
      throw;
    } catch (const Error& e) {
      throw StepFailure(fmt::format("step {} at t_hat = {}: {}", n + 1,
                                    state.t_hat, e.what()),
                        n + 1, state.t_hat);
    }
    ++n;
  }
  out.state = std::move(state);
  return out;
}

}  // namespace imexrrk
