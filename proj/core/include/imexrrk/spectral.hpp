// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace imexrrk {

/// Uniform grid on the periodic rectangle [x0, x0+lx) x [y0, y0+ly).
///
/// Samples sit at x_i = x0 + i*hx, y_j = y0 + j*hy. Point (i, j) is stored
/// at index j*nx + i (x fastest).
struct PeriodicGrid {
  int nx = 128;
  int ny = 128;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;
  double x0 = 0.0;
  double y0 = 0.0;

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double area() const { return lx * ly; }
  double x(int i) const { return x0 + i * hx(); }
  double y(int j) const { return y0 + j * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

  /// Throws ConfigurationError unless nx, ny are even, factor into 2,3,5,7,
  /// and the edge lengths are positive and finite.
  void check() const;

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;
};

/// Real grid function.
class Field {
 public:
  Field() = default;
  explicit Field(const PeriodicGrid& grid, double value = 0.0);

  template <class Fn>
  static Field from_function(const PeriodicGrid& grid, Fn&& fn) {
    Field f(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) f.at(i, j) = fn(grid.x(i), grid.y(j));
    return f;
  }

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * grid_.nx + i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  /// this += a * x
  Field& axpy(double a, const Field& x);

  double max_abs() const;
  bool all_finite() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

Field operator+(Field lhs, const Field& rhs);
Field operator-(Field lhs, const Field& rhs);
Field operator*(double s, Field f);

using Complex = std::complex<double>;

/// Half-plane Fourier coefficients of a real field.
///
/// Normalization: f(x, y) = sum_k fhat(k) exp(i k.x), so fhat(0) is the mean.
/// Mode (jy, ix) with 0 <= jy < ny, 0 <= ix <= nx/2 is stored at
/// jy*(nx/2+1) + ix; the conjugate half is implied.
struct Spectrum {
  PeriodicGrid grid;
  std::vector<Complex> modes;

  Spectrum() = default;
  explicit Spectrum(const PeriodicGrid& g);

  /// this += a * x
  Spectrum& axpy(double a, const Spectrum& x);
  Spectrum& operator*=(double s);
};

/// Real multiplier per half-plane mode representing a constant-coefficient
/// operator. The zero mode is stored like any other.
struct Symbol {
  std::vector<double> values;
};

/// FFT plans, wavenumbers and scratch space for one grid.
///
/// Not safe for concurrent use; create one per worker thread. Plan creation
/// is serialized internally so contexts may be built from several threads.
class SpectralContext {
 public:
  explicit SpectralContext(const PeriodicGrid& grid, bool dealias = false);
  ~SpectralContext();
  SpectralContext(const SpectralContext&) = delete;
  SpectralContext& operator=(const SpectralContext&) = delete;
  SpectralContext(SpectralContext&&) noexcept;
  SpectralContext& operator=(SpectralContext&&) noexcept;

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t mode_count() const { return ksq_.size(); }
  /// Columns of the half-plane layout, nx/2 + 1.
  int half_nx() const { return grid_.nx / 2 + 1; }
  double kx(int ix) const;
  double ky(int jy) const;
  /// |k|^2 per half-plane mode.
  const std::vector<double>& k_squared() const { return ksq_; }
  /// Multiplicity of each half-plane mode in the full spectrum (1 or 2).
  const std::vector<double>& mode_weights() const { return weight_; }
  bool dealiasing() const { return dealias_; }

  Spectrum transform(const Field& f);
  void transform(std::span<const double> values, Spectrum& out);
  Field inverse_transform(const Spectrum& s);
  void inverse_transform(const Spectrum& s, Field& out);

  /// Laplacian: -|k|^2.
  Symbol laplacian() const;
  /// Biharmonic: |k|^4.
  Symbol biharmonic() const;
  Symbol constant(double value) const;

  Field apply_symbol(const Field& f, const Symbol& sigma);
  void apply_symbol(Spectrum& s, const Symbol& sigma) const;

  /// Solves (I - coeff*sigma) U = rhs mode by mode.
  /// Throws SingularSolveError if any |1 - coeff*sigma(k)| < 1e-14.
  Field solve_diagonal(const Field& rhs, const Symbol& sigma, double coeff);
  void solve_diagonal(Spectrum& rhs, const Symbol& sigma, double coeff) const;

  /// sum over the full spectrum |k|^2 |fhat|^2, scaled by |Omega|.
  double grad_norm_sq(const Field& f);
  double grad_norm_sq(const Spectrum& s) const;
  /// L2 inner product through Parseval: |Omega| * sum fhat conj(ghat).
  double inner(const Spectrum& f, const Spectrum& g) const;
  double norm_sq(const Spectrum& s) const { return inner(s, s); }
  /// |Omega| * sum sigma |fhat|^2, i.e. <f, Op f> for a real symbol.
  double quadratic_form(const Spectrum& f, const Symbol& sigma) const;

  /// Zeroes modes outside the 2/3 band when dealiasing is enabled.
  void dealias(Spectrum& s) const;

 private:
  struct Plans;
  PeriodicGrid grid_;
  bool dealias_ = false;
  std::vector<double> ksq_;
  std::vector<double> weight_;
  std::vector<unsigned char> keep_;
  std::unique_ptr<Plans> plans_;
};

/// Discrete L2 inner product hx*hy*sum f_i g_i. Throws DimensionError on
/// grid mismatch.
double inner(const Field& f, const Field& g);
double norm_sq(const Field& f);
/// hx*hy*sum f_i
double integrate(const Field& f);

}  // namespace imexrrk
