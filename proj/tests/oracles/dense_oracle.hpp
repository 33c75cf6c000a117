// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference for one relaxed IMEX step on a small grid.
//
// The Laplacian is assembled as an explicit dense matrix from the
// trigonometric differentiation formula (no FFT), stage systems are solved by
// LU, and every inner product is a plain grid sum. Independent of the
// library's spectral kernels by construction.

#pragma once

#include "imexrrk/model.hpp"
#include "imexrrk/tableau.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace imexrrk::oracle {

/// Second-derivative matrix of trigonometric interpolation on n points of a
/// period-`len` interval.
inline Eigen::MatrixXd second_derivative(int n, double len) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double pi = std::numbers::pi;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int m = -n / 2 + 1; m <= n / 2; ++m) {
        const double k = 2.0 * pi * m / len;
        acc -= k * k * std::cos(2.0 * pi * m * (i - j) / n);
      }
      d(i, j) = acc / n;
    }
  }
  return d;
}

/// Laplacian on the row-major (y-major) grid vector.
inline Eigen::MatrixXd laplacian(const PeriodicGrid& g) {
  const Eigen::MatrixXd dx = second_derivative(g.nx, g.lx);
  const Eigen::MatrixXd dy = second_derivative(g.ny, g.ly);
  const int n = g.nx * g.ny;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int p = j * g.nx + i;
      for (int i2 = 0; i2 < g.nx; ++i2) lap(p, j * g.nx + i2) += dx(i, i2);
      for (int j2 = 0; j2 < g.ny; ++j2) lap(p, j2 * g.nx + i) += dy(j, j2);
    }
  }
  return lap;
}

using Vec = Eigen::VectorXd;

struct DenseStep {
  std::vector<std::vector<Vec>> u_stage;  // [stage][component]
  std::vector<double> r_stage;
  std::vector<double> ntilde_stage;
  double gamma = 1.0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::vector<Vec> u_new;
  double r_new = 0.0;
};

class DenseModel {
 public:
  explicit DenseModel(const ModelSpec& spec) : spec_(spec), lap_(laplacian(spec.grid)) {
    const double eps2 = spec.epsilon * spec.epsilon;
    if (spec.op == FlowOperator::allen_cahn) {
      lin_ = eps2 * lap_;
    } else {
      lin_ = -eps2 * lap_ * lap_;
    }
    w_ = spec.grid.hx() * spec.grid.hy();
  }

  const Eigen::MatrixXd& lap() const { return lap_; }
  const Eigen::MatrixXd& lin() const { return lin_; }

  double ip(const Vec& a, const Vec& b) const { return w_ * a.dot(b); }

  Vec apply_g(const Vec& v) const {
    return spec_.op == FlowOperator::allen_cahn ? Vec(-v) : Vec(lap_ * v);
  }

  Vec fprime(const Vec& u) const {
    Vec out(u.size());
    for (Eigen::Index p = 0; p < u.size(); ++p) out(p) = spec_.potential.derivative(u(p));
    return out;
  }

  double e1(const std::vector<Vec>& u) const {
    double acc = 0.0;
    for (const auto& v : u) {
      for (Eigen::Index p = 0; p < v.size(); ++p) acc += spec_.potential.value(v(p));
    }
    return acc * w_;
  }

  /// L, N per component and Ntilde at (U, R).
  void ops(const std::vector<Vec>& u, double r, std::vector<Vec>& l, std::vector<Vec>& n,
           double& nt) const {
    const double root = std::sqrt(e1(u) + spec_.c0);
    l.clear();
    n.clear();
    nt = 0.0;
    for (const auto& v : u) {
      const Vec fp = fprime(v);
      l.push_back(lin_ * v);
      n.push_back(apply_g((r / root) * fp));
      nt += ip(fp, l.back() + n.back());
    }
    nt /= 2.0 * root;
  }

  DenseStep step(const DoubleButcherTableau& t, const std::vector<Vec>& u, double r,
                 double tau, bool relax) const {
    const int s = t.stages();
    const std::size_t k = u.size();
    const double eps2 = spec_.epsilon * spec_.epsilon;
    const auto n = static_cast<Eigen::Index>(u.front().size());
    DenseStep out;
    std::vector<std::vector<Vec>> ls(s), ns(s);
    for (int i = 0; i < s; ++i) {
      std::vector<Vec> ui;
      double ri = r;
      const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - tau * t.a(i, i) * lin_;
      const auto lu = m.partialPivLu();
      for (std::size_t l = 0; l < k; ++l) {
        Vec rhs = u[l];
        for (int j = 0; j < i; ++j) rhs += tau * (t.a(i, j) * ls[j][l] + t.abar(i, j) * ns[j][l]);
        ui.push_back(lu.solve(rhs));
      }
      for (int j = 0; j < i; ++j) ri += tau * t.abar(i, j) * out.ntilde_stage[j];
      double nt = 0.0;
      ops(ui, ri, ls[i], ns[i], nt);
      out.u_stage.push_back(ui);
      out.r_stage.push_back(ri);
      out.ntilde_stage.push_back(nt);
    }

    std::vector<Vec> d(k, Vec::Zero(n));
    double ntsum = 0.0;
    for (int i = 0; i < s; ++i) {
      for (std::size_t l = 0; l < k; ++l) d[l] += t.b(i) * ls[i][l] + t.bbar(i) * ns[i][l];
      ntsum += t.bbar(i) * out.ntilde_stage[i];
    }
    double den = ntsum * ntsum;
    for (std::size_t l = 0; l < k; ++l) den += 0.5 * eps2 * (-ip(d[l], lap_ * d[l]));
    double num = 0.0;
    for (int i = 0; i < s; ++i) {
      for (std::size_t l = 0; l < k; ++l) {
        const Vec comb = t.b(i) * ls[i][l] + t.bbar(i) * ns[i][l];
        num += eps2 * ip(u[l] - out.u_stage[i][l], lap_ * comb);
      }
      num -= 2.0 * (r - out.r_stage[i]) * t.bbar(i) * out.ntilde_stage[i];
    }
    out.numerator = num;
    out.denominator = den;
    out.gamma = relax ? num / (tau * den) : 1.0;
    for (std::size_t l = 0; l < k; ++l) out.u_new.push_back(u[l] + out.gamma * tau * d[l]);
    out.r_new = r + out.gamma * tau * ntsum;
    return out;
  }

 private:
  ModelSpec spec_;
  Eigen::MatrixXd lap_;
  Eigen::MatrixXd lin_;
  double w_ = 0.0;
};

inline Vec to_vec(const Field& f) {
  Vec v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t p = 0; p < f.size(); ++p) v(static_cast<Eigen::Index>(p)) = f[p];
  return v;
}

/// max |a - b| / max(max |b|, floor)
inline double rel_diff(const Vec& a, const Vec& b, double floor = 1e-300) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), floor);
}

}  // namespace imexrrk::oracle
