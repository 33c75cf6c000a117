// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/model.hpp"

#include "imexrrk/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace imexrrk {

Potential Potential::from_name(std::string_view name) {
  if (name == "double-well") return double_well();
  if (name == "multi-well") return multi_well();
  throw ConfigurationError(fmt::format(
      "unknown potential '{}'; available: double-well, multi-well", name));
}

std::string_view Potential::name() const {
  switch (kind_) {
    case Kind::double_well:
      return "double-well";
    case Kind::multi_well:
      return "multi-well";
  }
  return "?";
}

std::string_view to_string(FlowOperator op) {
  return op == FlowOperator::allen_cahn ? "allen-cahn" : "cahn-hilliard";
}

FlowOperator flow_operator_from_name(std::string_view name) {
  if (name == "allen-cahn" || name == "allen_cahn" || name == "ac") {
    return FlowOperator::allen_cahn;
  }
  if (name == "cahn-hilliard" || name == "cahn_hilliard" || name == "ch") {
    return FlowOperator::cahn_hilliard;
  }
  throw ConfigurationError(fmt::format(
      "unknown operator '{}'; expected allen-cahn or cahn-hilliard", name));
}

void ModelSpec::check() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigurationError(fmt::format("epsilon must be positive, got {}", epsilon));
  }
  if (!(c0 >= 0.0) || !std::isfinite(c0)) {
    throw ConfigurationError(fmt::format("C0 must be non-negative, got {}", c0));
  }
  if (components < 1) {
    throw ConfigurationError(
        fmt::format("component count must be >= 1, got {}", components));
  }
  if (components > 1 && op != FlowOperator::allen_cahn) {
    throw ConfigurationError(
        "multi-component systems are only supported for allen-cahn");
  }
  grid.check();
}

GradientFlow::GradientFlow(ModelSpec spec)
    : spec_((spec.check(), std::move(spec))),
      ctx_(spec_.grid, spec_.dealias),
      laplacian_(ctx_.laplacian()),
      scratch_(spec_.grid) {
  const double eps2 = spec_.epsilon * spec_.epsilon;
  const auto& k2 = ctx_.k_squared();
  linear_.values.resize(k2.size());
  mobility_.values.resize(k2.size());
  for (std::size_t m = 0; m < k2.size(); ++m) {
    if (spec_.op == FlowOperator::allen_cahn) {
      linear_.values[m] = -eps2 * k2[m];
      mobility_.values[m] = -1.0;
    } else {
      linear_.values[m] = -eps2 * k2[m] * k2[m];
      mobility_.values[m] = -k2[m];
    }
  }
}

void GradientFlow::check_fields(const Fields& u) const {
  if (static_cast<int>(u.size()) != spec_.components) {
    throw DimensionError(fmt::format("expected {} component fields, got {}",
                                     spec_.components, u.size()));
  }
  for (const auto& f : u) {
    if (!(f.grid() == spec_.grid)) {
      throw DimensionError("field grid does not match the model grid");
    }
  }
}

double GradientFlow::sav_root(double e1, int stage) const {
  const double arg = e1 + spec_.c0;
  if (!(arg > kSavFloor)) {
    throw SavDegeneracyError(
        fmt::format("SAV degeneracy: E1 + C0 = {}{}", arg,
                    stage >= 0 ? fmt::format(" at stage {}", stage + 1) : ""),
        stage);
  }
  return std::sqrt(arg);
}

double GradientFlow::e1(const Fields& u) const {
  check_fields(u);
  double acc = 0.0;
  for (const auto& f : u) {
    for (double v : f.values()) acc += spec_.potential.value(v);
  }
  return acc * spec_.grid.hx() * spec_.grid.hy();
}

double GradientFlow::init_r(const Fields& u) const {
  const double arg = e1(u) + spec_.c0;
  if (arg < 0.0) {
    throw SavDegeneracyError(fmt::format(
        "invalid potential: E1 + C0 = {} < 0, r would be complex", arg));
  }
  return std::sqrt(arg);
}

SavState GradientFlow::make_state(Fields u, double t_hat) const {
  SavState s;
  s.r = init_r(u);
  s.u = std::move(u);
  s.t_hat = t_hat;
  return s;
}

void GradientFlow::evaluate(const Fields& u, const std::vector<Spectrum>& u_hat,
                            double r, SpectralEvaluation& out, int stage) {
  const auto k = static_cast<std::size_t>(spec_.components);
  out.l_hat.resize(k);
  out.n_hat.resize(k);
  out.fprime_hat.resize(k);

  out.e1 = e1(u);
  const double root = sav_root(out.e1, stage);
  out.q = r / root;

  double acc = 0.0;
  for (std::size_t l = 0; l < k; ++l) {
    out.l_hat[l] = u_hat[l];
    ctx_.apply_symbol(out.l_hat[l], linear_);

    const auto src = u[l].values();
    auto dst = scratch_.values();
    for (std::size_t p = 0; p < src.size(); ++p) {
      dst[p] = spec_.potential.derivative(src[p]);
    }
    ctx_.transform(scratch_.values(), out.fprime_hat[l]);
    ctx_.dealias(out.fprime_hat[l]);

    auto& n = out.n_hat[l];
    n = out.fprime_hat[l];
    const auto& g = mobility_.values;
    for (std::size_t m = 0; m < n.modes.size(); ++m) n.modes[m] *= out.q * g[m];

    // <F'(U), L + N>
    acc += ctx_.inner(out.fprime_hat[l], out.l_hat[l]) +
           ctx_.inner(out.fprime_hat[l], n);
  }
  out.ntilde = acc / (2.0 * root);
}

Field GradientFlow::apply_L(const Field& u) {
  return ctx_.apply_symbol(u, linear_);
}

Fields GradientFlow::apply_N(const Fields& u, double r) {
  check_fields(u);
  std::vector<Spectrum> u_hat;
  for (const auto& f : u) u_hat.push_back(ctx_.transform(f));
  SpectralEvaluation ev;
  evaluate(u, u_hat, r, ev);
  Fields out;
  for (const auto& n : ev.n_hat) out.push_back(ctx_.inverse_transform(n));
  return out;
}

double GradientFlow::apply_Ntilde(const Fields& u, double r) {
  check_fields(u);
  std::vector<Spectrum> u_hat;
  for (const auto& f : u) u_hat.push_back(ctx_.transform(f));
  SpectralEvaluation ev;
  evaluate(u, u_hat, r, ev);
  return ev.ntilde;
}

Fields GradientFlow::chemical_potential(const Fields& u, double r) {
  check_fields(u);
  const double q = r / sav_root(e1(u), -1);
  const double eps2 = spec_.epsilon * spec_.epsilon;
  Fields mu;
  for (const auto& f : u) {
    Field m = ctx_.apply_symbol(f, laplacian_);
    m *= -eps2;
    for (std::size_t p = 0; p < m.size(); ++p) {
      m[p] += q * spec_.potential.derivative(f[p]);
    }
    mu.push_back(std::move(m));
  }
  return mu;
}

double GradientFlow::dissipation_rate(const Fields& u, double r) {
  double acc = 0.0;
  for (const auto& m : chemical_potential(u, r)) {
    acc += ctx_.quadratic_form(ctx_.transform(m), mobility_);
  }
  return acc;
}

double GradientFlow::dissipation_rate(const std::vector<Spectrum>& u_hat,
                                      const SpectralEvaluation& ev) const {
  const double eps2 = spec_.epsilon * spec_.epsilon;
  const auto& k2 = ctx_.k_squared();
  double acc = 0.0;
  Spectrum mu(spec_.grid);
  for (std::size_t l = 0; l < u_hat.size(); ++l) {
    for (std::size_t m = 0; m < mu.modes.size(); ++m) {
      mu.modes[m] = eps2 * k2[m] * u_hat[l].modes[m] + ev.q * ev.fprime_hat[l].modes[m];
    }
    acc += ctx_.quadratic_form(mu, mobility_);
  }
  return acc;
}

double GradientFlow::modified_energy(const std::vector<Spectrum>& u_hat,
                                     double r) const {
  const double eps2 = spec_.epsilon * spec_.epsilon;
  double grad = 0.0;
  for (const auto& s : u_hat) grad += ctx_.grad_norm_sq(s);
  return 0.5 * eps2 * grad + r * r - spec_.c0;
}

double GradientFlow::modified_energy(const SavState& s) {
  check_fields(s.u);
  std::vector<Spectrum> u_hat;
  for (const auto& f : s.u) u_hat.push_back(ctx_.transform(f));
  return modified_energy(u_hat, s.r);
}

double GradientFlow::original_energy(const SavState& s) {
  check_fields(s.u);
  const double eps2 = spec_.epsilon * spec_.epsilon;
  double grad = 0.0;
  for (const auto& f : s.u) grad += ctx_.grad_norm_sq(f);
  return 0.5 * eps2 * grad + e1(s.u);
}

}  // namespace imexrrk
