// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/harness.hpp"

#include "imexrrk/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <thread>

namespace imexrrk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> halvings(double tau0, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(tau0 / std::pow(2.0, i));
  return out;
}

ExperimentPreset allen_cahn_base() {
  ExperimentPreset p;
  p.model.op = FlowOperator::allen_cahn;
  p.model.epsilon = 0.5;
  p.model.grid = PeriodicGrid{128, 128, kTwoPi, kTwoPi, 0.0, 0.0};
  p.init.kind = "sin-product";
  p.init.amplitude = 0.5;
  p.t_final = 1.0;
  return p;
}

ExperimentPreset cahn_hilliard_base() {
  auto p = allen_cahn_base();
  p.model.op = FlowOperator::cahn_hilliard;
  p.model.epsilon = 1.0;
  return p;
}

// Slope fits need smaller steps than the convergence tables to be asymptotic
// at epsilon = 0.01.
std::vector<double> vector_slope_taus() { return halvings(1.0 / 40, 4); }

ExperimentPreset vector_base() {
  ExperimentPreset p;
  p.model.op = FlowOperator::allen_cahn;
  p.model.epsilon = 0.01;
  p.model.potential = Potential::multi_well();
  p.model.components = 3;
  p.model.grid = PeriodicGrid{128, 128, 1.0, 1.0, -0.5, -0.5};
  p.init.kind = "cos-product";
  p.init.amplitude = 0.5;
  p.t_final = 1.0;
  p.tau_ref = 1e-4;
  return p;
}

ExperimentPreset merge_base(double tau) {
  ExperimentPreset p;
  p.model.op = FlowOperator::allen_cahn;
  p.model.epsilon = 0.025;
  p.model.potential = Potential::multi_well();
  p.model.components = 3;
  p.model.grid = PeriodicGrid{256, 128, 2.0, 1.0, 0.0, 0.0};
  p.init.kind = "tanh-circles";
  p.init.radius = 0.25;
  p.init.width = 0.025;
  p.init.centers = {{1.26, 0.5}, {0.74, 0.5}};
  p.taus = {tau};
  p.t_final = 40.0;
  p.snapshot_times = {1.0, 10.0, 20.0, 40.0};
  p.composite = true;
  return p;
}

struct Entry {
  const char* name;
  ExperimentPreset (*make)();
};

const Entry kPresets[] = {
    {"ac-rrk32",
     [] {
       auto p = allen_cahn_base();
       p.description = "Allen-Cahn accuracy study, IMEX RRK(3,2)";
       p.taus = {1.0 / 100, 1.0 / 200, 1.0 / 400, 1.0 / 800};
       return p;
     }},
    {"ac-rrk43",
     [] {
       auto p = allen_cahn_base();
       p.description = "Allen-Cahn accuracy study, IMEX RRK(4,3)";
       p.tableau = "imex-rrk-4-3";
       p.taus = {1.0 / 100, 1.0 / 200, 1.0 / 400, 1.0 / 800};
       return p;
     }},
    {"ac-rrk64",
     [] {
       auto p = allen_cahn_base();
       p.description = "Allen-Cahn accuracy study, IMEX RRK(6,4)";
       p.tableau = "imex-rrk-6-4";
       p.taus = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
       return p;
     }},
    {"ac-energy",
     [] {
       auto p = allen_cahn_base();
       p.description = "Allen-Cahn modified energy trace";
       p.taus = {1e-3};
       p.t_final = 5.0;
       return p;
     }},
    {"ac-separation",
     [] {
       auto p = allen_cahn_base();
       p.description = "Allen-Cahn coarsening from small random data";
       p.model.epsilon = 0.005;
       p.init.kind = "random";
       p.init.amplitude = 0.001;
       p.init.offset = 0.0;
       p.init.seed = 20240601;
       p.taus = {1e-3};
       p.snapshot_times = {0.0, 5.0, 10.0, 20.0, 40.0, 80.0};
       p.t_final = 80.0;
       return p;
     }},
    {"ch-rrk32",
     [] {
       auto p = cahn_hilliard_base();
       p.description = "Cahn-Hilliard accuracy study, IMEX RRK(3,2)";
       p.slope_taus = halvings(1e-3, 4);
       p.taus = halvings(1e-3, 4);
       return p;
     }},
    {"ch-rrk43",
     [] {
       auto p = cahn_hilliard_base();
       p.description = "Cahn-Hilliard accuracy study, IMEX RRK(4,3)";
       p.slope_taus = halvings(1e-3, 4);
       p.tableau = "imex-rrk-4-3";
       p.taus = halvings(1e-3, 4);
       return p;
     }},
    {"ch-rrk64",
     [] {
       auto p = cahn_hilliard_base();
       p.description = "Cahn-Hilliard accuracy study, IMEX RRK(6,4)";
       p.slope_taus = halvings(1e-3, 4);
       p.tableau = "imex-rrk-6-4";
       p.taus = halvings(8e-3, 4);
       return p;
     }},
    {"ch-energy",
     [] {
       auto p = cahn_hilliard_base();
       p.description = "Cahn-Hilliard modified energy trace";
       p.taus = {1e-2};
       p.t_final = 5.0;
       return p;
     }},
    {"ch-separation",
     [] {
       auto p = cahn_hilliard_base();
       p.description = "Cahn-Hilliard off-critical quench";
       p.model.epsilon = 0.1;
       p.init.kind = "random";
       p.init.amplitude = 0.4;
       p.init.offset = 0.25;
       p.init.seed = 20240602;
       p.taus = {1e-5};
       p.snapshot_times = {0.0, 0.001, 0.005, 0.01, 0.02, 0.05};
       p.t_final = 0.05;
       return p;
     }},
    {"vac-rrk32",
     [] {
       auto p = vector_base();
       p.description = "Vector Allen-Cahn accuracy study, IMEX RRK(3,2)";
       p.slope_taus = vector_slope_taus();
       p.taus = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80};
       return p;
     }},
    {"vac-rrk43",
     [] {
       auto p = vector_base();
       p.description = "Vector Allen-Cahn accuracy study, IMEX RRK(4,3)";
       p.slope_taus = vector_slope_taus();
       p.tableau = "imex-rrk-4-3";
       p.taus = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80};
       return p;
     }},
    {"vac-rrk64",
     [] {
       auto p = vector_base();
       p.description = "Vector Allen-Cahn accuracy study, IMEX RRK(6,4)";
       p.slope_taus = vector_slope_taus();
       p.tableau = "imex-rrk-6-4";
       p.taus = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80};
       return p;
     }},
    {"vac-energy",
     [] {
       auto p = vector_base();
       p.description = "Vector Allen-Cahn modified energy trace";
       p.taus = {1e-2};
       p.t_final = 20.0;
       p.tau_ref.reset();
       return p;
     }},
    {"vac-merge",
     [] {
       auto p = merge_base(0.01);
       p.description = "Vector Allen-Cahn merging circles";
       return p;
     }},
    {"vac-merge-coarse",
     [] {
       auto p = merge_base(0.1);
       p.description = "Vector Allen-Cahn merging circles, coarse step";
       return p;
     }},
};

SavState initial_state(const ExperimentPreset& p) {
  GradientFlow flow(p.model);
  return flow.make_state(make_initial(p.init, p.model));
}

IntegratorOptions quiet_options(bool gn) {
  IntegratorOptions o;
  o.gn_diagnostics = gn;
  return o;
}

}  // namespace

void ExperimentPreset::check() const {
  model.check();
  init.check(model.components);
  (void)resolve_tableau(tableau);
  if (taus.empty()) throw ConfigurationError(fmt::format("preset '{}' has no step size", name));
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0) || !std::isfinite(taus[i])) {
      throw ConfigurationError(fmt::format("step size must be positive, got {}", taus[i]));
    }
    if (i > 0 && !(taus[i] < taus[i - 1])) {
      throw ConfigurationError("step sizes must be strictly decreasing");
    }
  }
  for (std::size_t i = 0; i < slope_taus.size(); ++i) {
    if (!(slope_taus[i] > 0.0) || !std::isfinite(slope_taus[i]) ||
        (i > 0 && !(slope_taus[i] < slope_taus[i - 1]))) {
      throw ConfigurationError("slope step sizes must be positive and strictly decreasing");
    }
  }
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw ConfigurationError(fmt::format("final time must be positive, got {}", t_final));
  }
  if (tau_ref && !(*tau_ref > 0.0)) {
    throw ConfigurationError(fmt::format("reference step must be positive, got {}", *tau_ref));
  }
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
    throw ConfigurationError("snapshot times must be sorted");
  }
}

double ExperimentPreset::reference_step() const {
  if (tau_ref) return *tau_ref;
  return *std::min_element(taus.begin(), taus.end()) / 16.0;
}

const std::vector<double>& ExperimentPreset::slope_step_sizes() const {
  return slope_taus.empty() ? taus : slope_taus;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& e : kPresets) out.emplace_back(e.name);
  return out;
}

ExperimentPreset preset(const std::string& name) {
  for (const auto& e : kPresets) {
    if (name == e.name) {
      auto p = e.make();
      p.name = name;
      return p;
    }
  }
  throw ConfigurationError(fmt::format("unknown preset '{}'; available: {}", name,
                                       fmt::join(preset_names(), ", ")));
}

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  if (count <= 0) return;
  const int workers = std::clamp(threads, 1, count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<SavState> reference_solutions(const ExperimentPreset& p, double tau_ref,
                                          const std::vector<double>& times) {
  if (!(tau_ref > 0.0)) {
    throw ConfigurationError(fmt::format("reference step must be positive, got {}", tau_ref));
  }
  Integrator integ(p.model, resolve_tableau(p.tableau), quiet_options(false));
  SavState s = initial_state(p);

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<SavState> out(times.size());
  const double t0 = s.t_hat;
  long n = 0;
  for (std::size_t idx : order) {
    const double target = times[idx];
    // Whole steps while they do not pass the target.
    while (t0 + (n + 1) * tau_ref <= target + 1e-12 * tau_ref) {
      s = integ.step(s, tau_ref, SteppingMode::standard).first;
      ++n;
      s.t_hat = t0 + n * tau_ref;
    }
    const double rest = target - s.t_hat;
    if (rest > 1e-12 * tau_ref) {
      auto landed = integ.step(s, rest, SteppingMode::standard).first;
      landed.t_hat = target;
      out[idx] = std::move(landed);
    } else {
      out[idx] = s;
      if (target >= t0) out[idx].t_hat = target;
    }
  }
  return out;
}

SavState reference_solution(const ExperimentPreset& p, double tau_ref, double t_final) {
  return reference_solutions(p, tau_ref, {t_final}).front();
}

std::vector<double> component_errors(const Fields& u, const Fields& ref) {
  if (u.size() != ref.size()) throw DimensionError("component count mismatch");
  std::vector<double> out;
  for (std::size_t l = 0; l < u.size(); ++l) out.push_back((u[l] - ref[l]).max_abs());
  return out;
}

double successive_order(double tau_prev, double e_prev, double tau_next, double e_next) {
  if (!(e_prev > 0.0) || !(e_next > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e_prev / e_next) / std::log(tau_prev / tau_next);
}

double loglog_slope(const std::vector<double>& taus, const std::vector<double>& values) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < taus.size() && i < values.size(); ++i) {
    if (values[i] > 0.0 && taus[i] > 0.0) {
      xs.push_back(std::log(taus[i]));
      ys.push_back(std::log(values[i]));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

namespace {

struct RunResult {
  SavState state;
  double max_gamma_deviation = 0.0;
  double max_gn = 0.0;
  std::string failure;
};

RunResult run_mode(const ExperimentPreset& p, const DoubleButcherTableau& tab,
                   const SavState& s0, double tau, SteppingMode mode, bool gn) {
  RunResult out;
  try {
    Integrator integ(p.model, tab, quiet_options(gn));
    auto traj = integ.integrate_to(s0, p.t_final, tau, mode,
                                   [&](const StepRecord& rec, const SavState&) {
                                     out.max_gamma_deviation = std::max(
                                         out.max_gamma_deviation, std::abs(rec.gamma - 1.0));
                                     if (rec.gn_at_1) {
                                       out.max_gn = std::max(out.max_gn, std::abs(*rec.gn_at_1));
                                     }
                                   });
    out.state = std::move(traj.state);
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

SlopeStudy make_slope(std::string quantity, const std::vector<double>& taus,
                      std::vector<double> values) {
  SlopeStudy s;
  s.quantity = std::move(quantity);
  s.taus = taus;
  s.values = std::move(values);
  s.degenerate = std::all_of(s.values.begin(), s.values.end(),
                             [](double v) { return !(v > 1e-15); });
  s.fitted_slope = loglog_slope(s.taus, s.values);
  return s;
}

}  // namespace

ConvergenceStudy convergence_study(const ExperimentPreset& p, const HarnessOptions& opts) {
  p.check();
  if (p.taus.size() < 3) {
    throw ConfigurationError("a convergence study needs at least three step sizes");
  }
  const auto tab = resolve_tableau(p.tableau);
  const SavState s0 = initial_state(p);
  const std::size_t n = p.taus.size();

  // Even jobs: idt, odd jobs: rt.
  std::vector<RunResult> runs(2 * n);
  parallel_for(static_cast<int>(2 * n), opts.threads, [&](int j) {
    const auto i = static_cast<std::size_t>(j) / 2;
    const bool rt = j % 2 == 1;
    runs[static_cast<std::size_t>(j)] =
        run_mode(p, tab, s0, p.taus[i], rt ? SteppingMode::rt : SteppingMode::idt, rt);
  });

  ConvergenceStudy study;
  study.preset = p.name;
  study.tableau = tab.name;
  study.order = tab.order;
  study.tau_ref = p.reference_step();

  // Reference times: T0 followed by each RT run's achieved time.
  std::vector<double> times{p.t_final};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rt = runs[2 * i + 1];
    times.push_back(rt.failure.empty() ? rt.state.t_hat : p.t_final);
  }

  auto measure = [&](const std::vector<SavState>& refs) {
    std::vector<ConvergenceRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& row = rows[i];
      row.tau = p.taus[i];
      const auto& idt = runs[2 * i];
      const auto& rt = runs[2 * i + 1];
      row.failure = idt.failure.empty() ? rt.failure : idt.failure;
      row.max_gamma_deviation = rt.max_gamma_deviation;
      row.max_gn_at_1 = rt.max_gn;
      if (idt.failure.empty()) {
        row.component_error_idt = component_errors(idt.state.u, refs[0].u);
        row.error_idt = *std::max_element(row.component_error_idt.begin(),
                                          row.component_error_idt.end());
      } else {
        row.error_idt = std::numeric_limits<double>::quiet_NaN();
      }
      if (rt.failure.empty()) {
        const auto& ref = refs[i + 1];
        row.t_hat_rt = rt.state.t_hat;
        row.component_error_rt = component_errors(rt.state.u, ref.u);
        row.error_rt = *std::max_element(row.component_error_rt.begin(),
                                         row.component_error_rt.end());
        row.error_r_rt = std::abs(rt.state.r - ref.r);
      } else {
        row.error_rt = std::numeric_limits<double>::quiet_NaN();
        row.error_r_rt = std::numeric_limits<double>::quiet_NaN();
      }
    }
    return rows;
  };

  study.rows = measure(reference_solutions(p, study.tau_ref, times));

  const std::size_t k = static_cast<std::size_t>(p.model.components);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = study.rows[i];
    row.component_order_idt.assign(k, std::numeric_limits<double>::quiet_NaN());
    row.component_order_rt.assign(k, std::numeric_limits<double>::quiet_NaN());
    if (i == 0) continue;
    const auto& prev = study.rows[i - 1];
    row.order_idt = successive_order(prev.tau, prev.error_idt, row.tau, row.error_idt);
    row.order_rt = successive_order(prev.tau, prev.error_rt, row.tau, row.error_rt);
    for (std::size_t l = 0; l < k; ++l) {
      if (prev.component_error_idt.size() == k && row.component_error_idt.size() == k) {
        row.component_order_idt[l] = successive_order(
            prev.tau, prev.component_error_idt[l], row.tau, row.component_error_idt[l]);
      }
      if (prev.component_error_rt.size() == k && row.component_error_rt.size() == k) {
        row.component_order_rt[l] = successive_order(
            prev.tau, prev.component_error_rt[l], row.tau, row.component_error_rt[l]);
      }
    }
  }

  std::vector<double> e_idt, e_rt, g, gn;
  for (const auto& row : study.rows) {
    e_idt.push_back(row.error_idt);
    e_rt.push_back(row.error_rt);
    g.push_back(row.max_gamma_deviation);
    gn.push_back(row.max_gn_at_1);
  }
  study.fitted_order_idt = loglog_slope(p.taus, e_idt);
  study.fitted_order_rt = loglog_slope(p.taus, e_rt);
  study.gamma_slope = make_slope("gamma", p.taus, g);
  study.gn_slope = make_slope("gn", p.taus, gn);

  if (opts.reference_gate) {
    const auto finer = measure(reference_solutions(p, study.tau_ref / 2.0, times));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (auto [a, b] : {std::pair{study.rows[i].error_idt, finer[i].error_idt},
                          std::pair{study.rows[i].error_rt, finer[i].error_rt}}) {
        if (a > 0.0 && b > 0.0) worst = std::max(worst, std::abs(a - b) / b);
      }
    }
    study.reference_change = worst;
  }
  return study;
}

std::pair<SlopeStudy, SlopeStudy> slope_studies(const ExperimentPreset& p,
                                                 const HarnessOptions& opts) {
  p.check();
  const auto tab = resolve_tableau(p.tableau);
  const SavState s0 = initial_state(p);
  const auto& taus = p.slope_step_sizes();
  std::vector<RunResult> runs(taus.size());
  parallel_for(static_cast<int>(runs.size()), opts.threads, [&](int i) {
    runs[static_cast<std::size_t>(i)] =
        run_mode(p, tab, s0, taus[static_cast<std::size_t>(i)], SteppingMode::rt, true);
  });
  std::vector<double> g, gn;
  for (const auto& r : runs) {
    if (!r.failure.empty()) throw Error(r.failure);
    g.push_back(r.max_gamma_deviation);
    gn.push_back(r.max_gn);
  }
  return {make_slope("gamma", taus, g), make_slope("gn", taus, gn)};
}

SlopeStudy gamma_slope_study(const ExperimentPreset& p, const HarnessOptions& opts) {
  return slope_studies(p, opts).first;
}

SlopeStudy gn_slope_study(const ExperimentPreset& p, const HarnessOptions& opts) {
  return slope_studies(p, opts).second;
}

EnergyTrace energy_trace(const ExperimentPreset& p, const StepObserver& observer) {
  p.check();
  IntegratorOptions o;
  o.energy_check = false;
  Integrator integ(p.model, resolve_tableau(p.tableau), o);
  EnergyTrace out;
  out.initial = initial_state(p);
  auto traj = integ.integrate_to(
      out.initial, p.t_final, p.taus.front(), p.mode,
      [&](const StepRecord& rec, const SavState& s) {
        const double e0 = rec.energy_modified_before;
        const double rise = rec.energy_modified - e0;
        if (rise > kEnergyTolerance * (1.0 + std::abs(e0))) {
          if (out.monotone) out.first_violation = rec.step;
          out.monotone = false;
        }
        out.max_increase = std::max(out.max_increase, rise);
        if (observer) observer(rec, s);
      });
  out.records = std::move(traj.records);
  out.final_state = std::move(traj.state);
  return out;
}

std::vector<Snapshot> phase_separation(const ExperimentPreset& p,
                                       const std::function<void(const Snapshot&)>& on_snapshot) {
  p.check();
  if (p.snapshot_times.empty()) throw ConfigurationError("no snapshot times configured");
  Integrator integ(p.model, resolve_tableau(p.tableau));
  const double tau = p.taus.front();
  SavState s0 = initial_state(p);

  std::vector<Snapshot> out;
  std::size_t next = 0;
  auto capture = [&](const SavState& s, long step) {
    while (next < p.snapshot_times.size() &&
           s.t_hat >= p.snapshot_times[next] - 1e-9 * tau) {
      Snapshot snap{p.snapshot_times[next], s.t_hat, step, s.u};
      if (on_snapshot) on_snapshot(snap);
      out.push_back(std::move(snap));
      ++next;
    }
  };
  capture(s0, 0);
  if (next < p.snapshot_times.size()) {
    integ.integrate_to(s0, p.snapshot_times.back(), tau, p.mode,
                       [&](const StepRecord& rec, const SavState& s) { capture(s, rec.step); });
  }
  return out;
}

}  // namespace imexrrk
