// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "imexrrk/initial_conditions.hpp"
#include "imexrrk/integrator.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace imexrrk {

/// Everything needed to reproduce one experiment.
struct ExperimentPreset {
  std::string name;
  std::string description;
  ModelSpec model;
  InitSpec init;
  std::string tableau = "imex-rrk-3-2";
  SteppingMode mode = SteppingMode::rt;
  /// Step sizes for studies (strictly decreasing) or a single step for runs.
  std::vector<double> taus;
  /// Step sizes for gamma and G_n(1) slope studies; empty means `taus`.
  std::vector<double> slope_taus;
  double t_final = 1.0;
  /// Reference step; defaults to min(taus) / 16.
  std::optional<double> tau_ref;
  std::vector<double> snapshot_times;
  /// Write u_1 + 2 u_2 alongside vector snapshots.
  bool composite = false;

  /// Throws ConfigurationError on inconsistent data.
  void check() const;
  double reference_step() const;
  const std::vector<double>& slope_step_sizes() const;
};

std::vector<std::string> preset_names();
/// Throws ConfigurationError listing the available names.
ExperimentPreset preset(const std::string& name);

struct HarnessOptions {
  /// Worker threads for independent runs.
  int threads = 1;
  /// Also compute a reference at tau_ref / 2 and report the largest relative
  /// change of the measured errors.
  bool reference_gate = false;
};

/// Runs `count` independent jobs on up to `threads` workers. Exceptions from
/// jobs are rethrown after all workers finish (first by index).
void parallel_for(int count, int threads, const std::function<void(int)>& job);

/// Standard-mode march at tau_ref that lands exactly on every requested time
/// with a shortened final step. The returned states follow the order of
/// `times`. The march itself continues from the unshortened state.
std::vector<SavState> reference_solutions(const ExperimentPreset& p, double tau_ref,
                                          const std::vector<double>& times);
SavState reference_solution(const ExperimentPreset& p, double tau_ref, double t_final);

/// l-infinity distance per component.
std::vector<double> component_errors(const Fields& u, const Fields& ref);

/// log2(e_prev / e_next) for a halving of tau; general ratio otherwise.
double successive_order(double tau_prev, double e_prev, double tau_next, double e_next);
/// Least-squares slope of log(values) against log(taus), skipping
/// non-positive values. NaN when fewer than two usable points.
double loglog_slope(const std::vector<double>& taus, const std::vector<double>& values);

struct ConvergenceRow {
  double tau = 0.0;
  double error_idt = 0.0;
  double order_idt = std::numeric_limits<double>::quiet_NaN();
  double error_rt = 0.0;
  double order_rt = std::numeric_limits<double>::quiet_NaN();
  double error_r_rt = 0.0;
  std::vector<double> component_error_idt;
  std::vector<double> component_error_rt;
  std::vector<double> component_order_idt;
  std::vector<double> component_order_rt;
  double t_hat_rt = 0.0;
  double max_gamma_deviation = 0.0;
  double max_gn_at_1 = 0.0;
  /// Non-empty when one of the runs failed.
  std::string failure;
};

struct SlopeStudy {
  std::string quantity;
  std::vector<double> taus;
  std::vector<double> values;
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
};

struct ConvergenceStudy {
  std::string preset;
  std::string tableau;
  int order = 0;
  double tau_ref = 0.0;
  std::vector<ConvergenceRow> rows;
  double fitted_order_idt = std::numeric_limits<double>::quiet_NaN();
  double fitted_order_rt = std::numeric_limits<double>::quiet_NaN();
  /// Largest relative change of a measured error when tau_ref is halved
  /// (only with HarnessOptions::reference_gate).
  std::optional<double> reference_change;
  /// By-products of the RT runs.
  SlopeStudy gamma_slope;
  SlopeStudy gn_slope;
};

ConvergenceStudy convergence_study(const ExperimentPreset& p,
                                   const HarnessOptions& opts = {});
/// max |gamma_n - 1| and max |G_n(1)| from one set of rt runs.
std::pair<SlopeStudy, SlopeStudy> slope_studies(const ExperimentPreset& p,
                                                const HarnessOptions& opts = {});
SlopeStudy gamma_slope_study(const ExperimentPreset& p, const HarnessOptions& opts = {});
SlopeStudy gn_slope_study(const ExperimentPreset& p, const HarnessOptions& opts = {});

struct EnergyTrace {
  std::vector<StepRecord> records;
  bool monotone = true;
  /// First step (1-based) whose modified energy rose beyond tolerance.
  long first_violation = 0;
  double max_increase = 0.0;
  SavState initial;
  SavState final_state;
};

inline constexpr double kEnergyTolerance = 1e-10;

/// Single run at taus.front() in the preset's mode with the integrator bug
/// trap disabled, so violations are reported instead of thrown.
EnergyTrace energy_trace(const ExperimentPreset& p, const StepObserver& observer = {});

struct Snapshot {
  double t_target = 0.0;
  double t_hat = 0.0;
  long step = 0;
  Fields u;
};

/// Runs to the last snapshot time and captures the state at the first step
/// whose t_hat reaches each snapshot time. A snapshot time <= t_hat_0 yields
/// the initial state.
std::vector<Snapshot> phase_separation(
    const ExperimentPreset& p,
    const std::function<void(const Snapshot&)>& on_snapshot = {});

}  // namespace imexrrk
