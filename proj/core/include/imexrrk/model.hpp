// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "imexrrk/spectral.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace imexrrk {

/// Pointwise bulk energy density F and its derivative.
class Potential {
 public:
  enum class Kind {
    double_well,  // (u^2 - 1)^2 / 4,  F'(u) = u^3 - u
    multi_well,   // u^2 (1 - u)^2 / 4, F'(u) = u (1 - u)(1 - 2u) / 2
  };

  Potential() = default;
  explicit Potential(Kind kind) : kind_(kind) {}

  static Potential double_well() { return Potential(Kind::double_well); }
  static Potential multi_well() { return Potential(Kind::multi_well); }
  /// "double-well" or "multi-well".
  static Potential from_name(std::string_view name);

  Kind kind() const { return kind_; }
  std::string_view name() const;

  double value(double u) const {
    switch (kind_) {
      case Kind::double_well: {
        const double w = u * u - 1.0;
        return 0.25 * w * w;
      }
      case Kind::multi_well: {
        const double w = u * (1.0 - u);
        return 0.25 * w * w;
      }
    }
    return 0.0;
  }

  double derivative(double u) const {
    switch (kind_) {
      case Kind::double_well:
        return u * u * u - u;
      case Kind::multi_well:
        return 0.5 * u * (1.0 - u) * (1.0 - 2.0 * u);
    }
    return 0.0;
  }

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  Kind kind_ = Kind::double_well;
};

/// Mobility operator G of the gradient flow u_t = G mu.
enum class FlowOperator {
  allen_cahn,     // G = -I
  cahn_hilliard,  // G = Laplacian
};

std::string_view to_string(FlowOperator op);
FlowOperator flow_operator_from_name(std::string_view name);

struct ModelSpec {
  FlowOperator op = FlowOperator::allen_cahn;
  double epsilon = 0.5;
  /// SAV shift, r = sqrt(E1 + C0).
  double c0 = 0.0;
  Potential potential;
  int components = 1;
  PeriodicGrid grid;
  /// 2/3-rule filtering of the nonlinear term.
  bool dealias = false;

  /// Throws ConfigurationError if epsilon <= 0, c0 < 0, components < 1,
  /// components > 1 with Cahn-Hilliard, or an invalid grid.
  void check() const;
};

using Fields = std::vector<Field>;

/// Phase fields, auxiliary scalar r, and the (possibly relaxed) time t_hat.
struct SavState {
  Fields u;
  double r = 0.0;
  double t_hat = 0.0;
};

/// Stage-level evaluation of the SAV system in Fourier space.
struct SpectralEvaluation {
  std::vector<Spectrum> l_hat;       // L(U_l)
  std::vector<Spectrum> n_hat;       // N_l(U, R)
  std::vector<Spectrum> fprime_hat;  // F'(U_l)
  double e1 = 0.0;
  double q = 0.0;       // R / sqrt(E1 + C0)
  double ntilde = 0.0;  // Ntilde(U, R)
};

/// A gradient-flow model bound to a spectral context.
///
///   u_t = L(u) + N(u, r),  r_t = Ntilde(u, r)
///   L(u) = G(-eps^2 Lap u),  N(u, r) = G(r / sqrt(E1 + C0) F'(u))
///   Ntilde(u, r) = <F'(u), L(u) + N(u, r)> / (2 sqrt(E1 + C0))
///
/// Ntilde takes u_t from the first equation at the same arguments, so it is a
/// function of (u, r) alone. Vector models share a single r over all
/// components.
class GradientFlow {
 public:
  /// Floor below which E1 + C0 counts as degenerate.
  static constexpr double kSavFloor = 1e-14;

  explicit GradientFlow(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  SpectralContext& context() { return ctx_; }
  const PeriodicGrid& grid() const { return spec_.grid; }
  int components() const { return spec_.components; }

  /// Symbol of L: -eps^2 |k|^2 (AC) or -eps^2 |k|^4 (CH).
  const Symbol& linear_symbol() const { return linear_; }
  /// Symbol of G: -1 (AC) or -|k|^2 (CH).
  const Symbol& mobility_symbol() const { return mobility_; }

  double e1(const Fields& u) const;
  /// sqrt(E1 + C0). Throws SavDegeneracyError when E1 + C0 < 0.
  double init_r(const Fields& u) const;
  /// State with r consistent with u.
  SavState make_state(Fields u, double t_hat = 0.0) const;

  Field apply_L(const Field& u);
  Fields apply_N(const Fields& u, double r);
  double apply_Ntilde(const Fields& u, double r);
  /// mu_l = -eps^2 Lap u_l + r / sqrt(E1 + C0) F'(u_l)
  Fields chemical_potential(const Fields& u, double r);

  double modified_energy(const SavState& s);
  double original_energy(const SavState& s);
  /// sum_l <mu_l, G mu_l> at the given (u, r); non-positive.
  double dissipation_rate(const Fields& u, double r);

  // Spectral-space kernels used by the integrator.

  /// Evaluates L, N, Ntilde at (U, R) given U both physically and in Fourier
  /// space. `stage` tags degeneracy errors.
  void evaluate(const Fields& u, const std::vector<Spectrum>& u_hat, double r,
                SpectralEvaluation& out, int stage = -1);
  /// (eps^2/2) sum_l |grad u_l|^2 + r^2 - C0 from Fourier coefficients.
  double modified_energy(const std::vector<Spectrum>& u_hat, double r) const;
  /// sum_l <mu_l, G mu_l> for an already evaluated stage.
  double dissipation_rate(const std::vector<Spectrum>& u_hat,
                          const SpectralEvaluation& ev) const;

 private:
  void check_fields(const Fields& u) const;
  double sav_root(double e1, int stage) const;

  ModelSpec spec_;
  SpectralContext ctx_;
  Symbol laplacian_;
  Symbol linear_;
  Symbol mobility_;
  Field scratch_;
};

}  // namespace imexrrk
