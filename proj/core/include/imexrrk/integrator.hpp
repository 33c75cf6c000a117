// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "imexrrk/model.hpp"
#include "imexrrk/tableau.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace imexrrk {

/// How the relaxed update is interpreted.
enum class SteppingMode {
  standard,  // gamma = 1, t_hat += tau (plain IMEX RK)
  idt,       // gamma relaxed, t_hat += tau
  rt,        // gamma relaxed, t_hat += gamma * tau
};

std::string_view to_string(SteppingMode mode);
SteppingMode stepping_mode_from_name(std::string_view name);

/// Stage values U_i, R_i and the operator evaluations at them.
struct StageData {
  std::vector<Fields> u;                     // [stage][component]
  std::vector<std::vector<Spectrum>> u_hat;  // [stage][component]
  std::vector<double> r;                     // R_i
  std::vector<SpectralEvaluation> eval;      // L, N, F', Ntilde at stage i

  int stages() const { return static_cast<int>(r.size()); }
  double ntilde(int i) const { return eval[static_cast<std::size_t>(i)].ntilde; }
};

struct GammaResult {
  double gamma = 1.0;
  /// (eps^2/2) sum_l |grad d_l|^2 + (sum_i bbar_i Ntilde_i)^2
  double denominator = 0.0;
  /// sum_i [eps^2 sum_l <u_l - U_li, Lap(b_i L_li + bbar_i N_li)>
  ///        - 2 (r - R_i) bbar_i Ntilde_i]
  double numerator = 0.0;
  /// False when the denominator fell below the floor and gamma was set to 1.
  bool relaxed = false;
};

struct StepRecord {
  long step = 0;
  double t_hat_before = 0.0;
  double t_hat_after = 0.0;
  double tau = 0.0;
  double gamma = 1.0;
  double energy_modified_before = 0.0;
  double energy_modified = 0.0;
  double energy_original = 0.0;
  /// G_n(1), only when IntegratorOptions::gn_diagnostics is set.
  std::optional<double> gn_at_1;
  /// sum_i b_i <mu_i, G mu_i>
  double stage_dissipation = 0.0;
  /// Integral of each component after the step.
  std::vector<double> mass;
  double r = 0.0;
};

struct IntegratorOptions {
  /// Evaluate G_n(1) every step.
  bool gn_diagnostics = false;
  /// Raise EnergyIncreaseError if a relaxed step raises the modified energy
  /// by more than energy_tolerance * (1 + |E|). Only active for tableaux with
  /// b = bbar >= 0.
  bool energy_check = true;
  double energy_tolerance = 1e-10;
  /// Relative floor for the gamma denominator.
  double denominator_floor = 1e-14;
};

/// Called once per accepted step. Receives the new state read-only.
using StepObserver = std::function<void(const StepRecord&, const SavState&)>;

struct Trajectory {
  SavState state;
  std::vector<StepRecord> records;
};

/// Diagonally implicit-explicit relaxation Runge-Kutta stepper for the SAV
/// reformulation of a gradient flow.
///
/// One instance owns its spectral context and is single threaded; run
/// independent instances for concurrent sweeps.
class Integrator {
 public:
  /// Throws ConfigurationError if the tableau fails validation.
  Integrator(ModelSpec spec, DoubleButcherTableau tableau,
             IntegratorOptions options = {});

  GradientFlow& model() { return model_; }
  const DoubleButcherTableau& tableau() const { return tableau_; }
  const ValidationReport& validation() const { return report_; }
  const IntegratorOptions& options() const { return options_; }
  void set_options(const IntegratorOptions& o) { options_ = o; }

  StageData compute_stages(const SavState& state, double tau);
  GammaResult compute_gamma(const SavState& state, const StageData& stages,
                            double tau);
  /// G_n(gamma) = E[u_gamma, r_gamma] - E[u, r] - gamma*tau*Diss, evaluated
  /// by forming the trial update at `gamma`.
  double g_n(double gamma, const SavState& state, const StageData& stages,
             double tau);
  /// Same quantity from the closed quadratic form
  /// -gamma*tau*numerator + gamma^2*tau^2*denominator, which avoids the
  /// cancellation in the energy difference.
  static double g_n_quadratic(double gamma, const GammaResult& g, double tau);

  /// One step. gamma = 1 in standard mode.
  std::pair<SavState, StepRecord> step(const SavState& state, double tau,
                                       SteppingMode mode);

  /// Steps until t_hat >= t_final - 1e-9*tau. The step size is never
  /// shortened, so in rt mode the achieved time generally differs from
  /// t_final.
  Trajectory integrate_to(SavState state, double t_final, double tau,
                          SteppingMode mode, const StepObserver& observer = {});

 private:
  void fill_stages(const SavState& state, const std::vector<Spectrum>& u_hat,
                   double tau, StageData& out);
  /// d_l = sum_i b_i L_li + bbar_i N_li and sum_i bbar_i Ntilde_i.
  void increment(const StageData& st, std::vector<Spectrum>& d,
                 double& nt) const;
  GammaResult gamma_from(const std::vector<Spectrum>& u_hat, double r,
                         const StageData& st, double tau) const;
  double dissipation_ur(const StageData& st) const;

  GradientFlow model_;
  DoubleButcherTableau tableau_;
  ValidationReport report_;
  IntegratorOptions options_;

  // Per-step workspace.
  StageData work_;
  std::vector<Spectrum> u_hat_;
  std::vector<Spectrum> d_hat_;
  Spectrum tmp_;
};

}  // namespace imexrrk
