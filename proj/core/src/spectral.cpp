// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/spectral.hpp"

#include "imexrrk/errors.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace imexrrk {

namespace {

// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool supported_length(int n) {
  if (n < 2 || n % 2 != 0) return false;
  for (int p : {2, 3, 5, 7}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b,
                       const char* what) {
  if (!(a == b)) {
    throw DimensionError(fmt::format(
        "{}: grid mismatch ({}x{} on {}x{} vs {}x{} on {}x{})", what, a.nx,
        a.ny, a.lx, a.ly, b.nx, b.ny, b.lx, b.ly));
  }
}

}  // namespace

void PeriodicGrid::check() const {
  if (!supported_length(nx) || !supported_length(ny)) {
    throw ConfigurationError(fmt::format(
        "unsupported grid {}x{}: sizes must be even with prime factors in "
        "{{2,3,5,7}}",
        nx, ny));
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly) ||
      !std::isfinite(x0) || !std::isfinite(y0)) {
    throw ConfigurationError(
        fmt::format("invalid domain lengths lx={} ly={}", lx, ly));
  }
}

// ---------------------------------------------------------------------------
// Field

Field::Field(const PeriodicGrid& grid, double value)
    : grid_(grid), values_(grid.size(), value) {}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(grid_, x.grid_, "Field axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
Field operator*(double s, Field f) { return f *= s; }

double inner(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * g[k];
  return acc * f.grid().hx() * f.grid().hy();
}

double norm_sq(const Field& f) { return inner(f, f); }

double integrate(const Field& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc * f.grid().hx() * f.grid().hy();
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(const PeriodicGrid& g)
    : grid(g), modes(static_cast<std::size_t>(g.ny) * (g.nx / 2 + 1)) {}

Spectrum& Spectrum::axpy(double a, const Spectrum& x) {
  require_same_grid(grid, x.grid, "Spectrum axpy");
  for (std::size_t k = 0; k < modes.size(); ++k) modes[k] += a * x.modes[k];
  return *this;
}

Spectrum& Spectrum::operator*=(double s) {
  for (auto& m : modes) m *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// SpectralContext

struct SpectralContext::Plans {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Plans(const PeriodicGrid& g, std::size_t modes) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(g.size());
    cplx = fftw_alloc_complex(modes);
    forward = fftw_plan_dft_r2c_2d(g.ny, g.nx, real, cplx, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(g.ny, g.nx, cplx, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(cplx);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

SpectralContext::SpectralContext(const PeriodicGrid& grid, bool dealias)
    : grid_(grid), dealias_(dealias) {
  grid_.check();
  const int hx = half_nx();
  const std::size_t n = static_cast<std::size_t>(grid_.ny) * hx;
  ksq_.resize(n);
  weight_.resize(n);
  keep_.resize(n);
  for (int jy = 0; jy < grid_.ny; ++jy) {
    for (int ix = 0; ix < hx; ++ix) {
      const std::size_t m = static_cast<std::size_t>(jy) * hx + ix;
      const double kxv = kx(ix);
      const double kyv = ky(jy);
      ksq_[m] = kxv * kxv + kyv * kyv;
      weight_[m] = (ix == 0 || ix == grid_.nx / 2) ? 1.0 : 2.0;
      // Integer wavenumber indices for the 2/3 rule.
      const int iy_signed = jy < grid_.ny / 2 ? jy : jy - grid_.ny;
      const bool inside = 3 * ix < grid_.nx && 3 * std::abs(iy_signed) < grid_.ny;
      keep_[m] = inside ? 1 : 0;
    }
  }
  plans_ = std::make_unique<Plans>(grid_, n);
}

SpectralContext::~SpectralContext() = default;
SpectralContext::SpectralContext(SpectralContext&&) noexcept = default;
SpectralContext& SpectralContext::operator=(SpectralContext&&) noexcept = default;

double SpectralContext::kx(int ix) const {
  // ix = nx/2 is the Nyquist column; its sign is irrelevant for even symbols.
  return 2.0 * std::numbers::pi * ix / grid_.lx;
}

double SpectralContext::ky(int jy) const {
  const int signed_index = jy < grid_.ny / 2 ? jy : jy - grid_.ny;
  return 2.0 * std::numbers::pi * signed_index / grid_.ly;
}

void SpectralContext::transform(std::span<const double> values, Spectrum& out) {
  if (values.size() != grid_.size()) {
    throw DimensionError("transform: input length does not match the grid");
  }
  if (out.modes.size() != mode_count() || !(out.grid == grid_)) out = Spectrum(grid_);
  std::copy(values.begin(), values.end(), plans_->real);
  fftw_execute_dft_r2c(plans_->forward, plans_->real, plans_->cplx);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t m = 0; m < out.modes.size(); ++m) {
    out.modes[m] = Complex(plans_->cplx[m][0], plans_->cplx[m][1]) * scale;
  }
}

Spectrum SpectralContext::transform(const Field& f) {
  require_same_grid(grid_, f.grid(), "transform");
  Spectrum s(grid_);
  transform(f.values(), s);
  return s;
}

void SpectralContext::inverse_transform(const Spectrum& s, Field& out) {
  require_same_grid(grid_, s.grid, "inverse_transform");
  if (!(out.grid() == grid_) || out.size() != grid_.size()) out = Field(grid_);
  // c2r overwrites its input, so always go through the scratch buffer.
  for (std::size_t m = 0; m < s.modes.size(); ++m) {
    plans_->cplx[m][0] = s.modes[m].real();
    plans_->cplx[m][1] = s.modes[m].imag();
  }
  fftw_execute_dft_c2r(plans_->backward, plans_->cplx, plans_->real);
  std::copy(plans_->real, plans_->real + grid_.size(), out.data());
}

Field SpectralContext::inverse_transform(const Spectrum& s) {
  Field f(grid_);
  inverse_transform(s, f);
  return f;
}

Symbol SpectralContext::laplacian() const {
  Symbol s;
  s.values.resize(ksq_.size());
  std::transform(ksq_.begin(), ksq_.end(), s.values.begin(),
                 [](double k2) { return -k2; });
  return s;
}

Symbol SpectralContext::biharmonic() const {
  Symbol s;
  s.values.resize(ksq_.size());
  std::transform(ksq_.begin(), ksq_.end(), s.values.begin(),
                 [](double k2) { return k2 * k2; });
  return s;
}

Symbol SpectralContext::constant(double value) const {
  return Symbol{std::vector<double>(ksq_.size(), value)};
}

void SpectralContext::apply_symbol(Spectrum& s, const Symbol& sigma) const {
  for (std::size_t m = 0; m < s.modes.size(); ++m) s.modes[m] *= sigma.values[m];
}

Field SpectralContext::apply_symbol(const Field& f, const Symbol& sigma) {
  auto s = transform(f);
  apply_symbol(s, sigma);
  return inverse_transform(s);
}

void SpectralContext::solve_diagonal(Spectrum& rhs, const Symbol& sigma,
                                     double coeff) const {
  if (coeff == 0.0) return;
  for (std::size_t m = 0; m < rhs.modes.size(); ++m) {
    const double denom = 1.0 - coeff * sigma.values[m];
    if (std::abs(denom) < 1e-14) {
      throw SingularSolveError(fmt::format(
          "singular diagonal solve: 1 - {}*sigma = {} at mode {}", coeff,
          denom, m));
    }
    rhs.modes[m] /= denom;
  }
}

Field SpectralContext::solve_diagonal(const Field& rhs, const Symbol& sigma,
                                      double coeff) {
  require_same_grid(grid_, rhs.grid(), "solve_diagonal");
  if (coeff == 0.0) return rhs;
  auto s = transform(rhs);
  solve_diagonal(s, sigma, coeff);
  return inverse_transform(s);
}

double SpectralContext::inner(const Spectrum& f, const Spectrum& g) const {
  require_same_grid(f.grid, g.grid, "inner");
  double acc = 0.0;
  for (std::size_t m = 0; m < f.modes.size(); ++m) {
    acc += weight_[m] * (f.modes[m].real() * g.modes[m].real() +
                         f.modes[m].imag() * g.modes[m].imag());
  }
  return acc * grid_.area();
}

double SpectralContext::quadratic_form(const Spectrum& f,
                                       const Symbol& sigma) const {
  double acc = 0.0;
  for (std::size_t m = 0; m < f.modes.size(); ++m) {
    acc += weight_[m] * sigma.values[m] * std::norm(f.modes[m]);
  }
  return acc * grid_.area();
}

double SpectralContext::grad_norm_sq(const Spectrum& s) const {
  double acc = 0.0;
  for (std::size_t m = 0; m < s.modes.size(); ++m) {
    acc += weight_[m] * ksq_[m] * std::norm(s.modes[m]);
  }
  return acc * grid_.area();
}

double SpectralContext::grad_norm_sq(const Field& f) {
  return grad_norm_sq(transform(f));
}

void SpectralContext::dealias(Spectrum& s) const {
  if (!dealias_) return;
  for (std::size_t m = 0; m < s.modes.size(); ++m) {
    if (!keep_[m]) s.modes[m] = 0.0;
  }
}

}  // namespace imexrrk
