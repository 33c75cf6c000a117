// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/tableau.hpp"

#include "imexrrk/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace imexrrk {

namespace {

// p/q rationals with |p|, |q| < 2^53 are exact in binary64, so the quotient
// carries a single rounding.
constexpr double ratio(long long p, long long q) {
  return static_cast<double>(p) / static_cast<double>(q);
}

DoubleButcherTableau make_empty(std::string name, int order, int s) {
  DoubleButcherTableau t;
  t.name = std::move(name);
  t.order = order;
  t.a = Eigen::MatrixXd::Zero(s, s);
  t.abar = Eigen::MatrixXd::Zero(s, s);
  t.b = Eigen::VectorXd::Zero(s);
  t.bbar = Eigen::VectorXd::Zero(s);
  t.c = Eigen::VectorXd::Zero(s);
  t.cbar = Eigen::VectorXd::Zero(s);
  return t;
}

DoubleButcherTableau imex_rrk_3_2() {
  constexpr double r2 = std::numbers::sqrt2;
  constexpr double g = 1.0 - r2 / 2.0;
  auto t = make_empty("imex-rrk-3-2", 2, 3);

  t.a(0, 0) = g;
  t.a(1, 0) = r2 - 1.0;
  t.a(1, 1) = g;
  t.a(2, 0) = r2 / 2.0 - 0.5;
  t.a(2, 2) = g;
  t.c << g, r2 / 2.0, 0.5;

  t.abar(1, 0) = 1.0;
  t.abar(2, 0) = 0.25;
  t.abar(2, 1) = 0.25;
  t.cbar << 0.0, 1.0, 0.5;

  t.b << ratio(1, 6), ratio(1, 6), ratio(2, 3);
  t.bbar = t.b;
  return t;
}

DoubleButcherTableau imex_rrk_4_3() {
  constexpr double alpha = 0.24169426078821;
  constexpr double beta = 0.06042356519705;
  constexpr double eta = 0.12915286960590;
  auto t = make_empty("imex-rrk-4-3", 3, 4);

  t.a(0, 0) = alpha;
  t.a(1, 0) = -alpha;
  t.a(1, 1) = alpha;
  t.a(2, 1) = 1.0 - alpha;
  t.a(2, 2) = alpha;
  t.a(3, 0) = beta;
  t.a(3, 1) = eta;
  t.a(3, 2) = 0.5 - alpha - beta - eta;
  t.a(3, 3) = alpha;
  t.c << alpha, 0.0, 1.0, 0.5;

  t.abar(2, 1) = 1.0;
  t.abar(3, 1) = 0.25;
  t.abar(3, 2) = 0.25;
  t.cbar << 0.0, 0.0, 1.0, 0.5;

  t.b << 0.0, ratio(1, 6), ratio(1, 6), ratio(2, 3);
  t.bbar = t.b;
  return t;
}

// Kennedy-Carpenter ARK4(3)6L[2]SA. a(2,1) is negative; the positive value
// breaks the row-sum condition c_3 = 83/250.
DoubleButcherTableau imex_rrk_6_4() {
  auto t = make_empty("imex-rrk-6-4", 4, 6);

  t.b << ratio(82889, 524892), 0.0, ratio(15625, 83664),
      ratio(69875, 102672), ratio(-2260, 8211), 0.25;
  t.bbar = t.b;

  t.a(1, 0) = 0.25;
  t.a(1, 1) = 0.25;
  t.a(2, 0) = ratio(8611, 62500);
  t.a(2, 1) = ratio(-1743, 31250);
  t.a(2, 2) = 0.25;
  t.a(3, 0) = ratio(5012029, 34652500);
  t.a(3, 1) = ratio(-654441, 2922500);
  t.a(3, 2) = ratio(174375, 388108);
  t.a(3, 3) = 0.25;
  t.a(4, 0) = ratio(15267082809, 155376265600);
  t.a(4, 1) = ratio(-71443401, 120774400);
  t.a(4, 2) = ratio(730878875, 902184768);
  t.a(4, 3) = ratio(2285395, 8070912);
  t.a(4, 4) = 0.25;
  for (int j = 0; j < 6; ++j) t.a(5, j) = t.b(j);

  t.abar(1, 0) = 0.5;
  t.abar(2, 0) = ratio(13861, 62500);
  t.abar(2, 1) = ratio(6889, 62500);
  t.abar(3, 0) = ratio(-116923316275, 2393684061468);
  t.abar(3, 1) = ratio(-2731218467317, 15368042101831);
  t.abar(3, 2) = ratio(9408046702089, 11113171139209);
  t.abar(4, 0) = ratio(-451086348788, 2902428689909);
  t.abar(4, 1) = ratio(-2682348792572, 7519795681897);
  t.abar(4, 2) = ratio(12662868775082, 11960479115383);
  t.abar(4, 3) = ratio(3355817975965, 11060851509271);
  t.abar(5, 0) = ratio(647845179188, 3216320057751);
  t.abar(5, 1) = ratio(73281519250, 8382639484533);
  t.abar(5, 2) = ratio(552539513391, 3454668386233);
  t.abar(5, 3) = ratio(3354512671639, 8306763924573);
  t.abar(5, 4) = ratio(4040, 17871);

  t.c << 0.0, 0.5, ratio(83, 250), ratio(31, 50), ratio(17, 20), 1.0;
  t.cbar = t.c;
  return t;
}

void check_structure(const DoubleButcherTableau& t) {
  const auto s = t.b.size();
  if (s < 1) throw StructuralError("tableau has no stages");
  auto square = [s](const Eigen::MatrixXd& m) {
    return m.rows() == s && m.cols() == s;
  };
  if (!square(t.a) || !square(t.abar) || t.bbar.size() != s ||
      t.c.size() != s || t.cbar.size() != s) {
    throw StructuralError(fmt::format(
        "tableau '{}': inconsistent dimensions (s={}, A {}x{}, Abar {}x{}, "
        "bbar {}, c {}, cbar {})",
        t.name, s, t.a.rows(), t.a.cols(), t.abar.rows(), t.abar.cols(),
        t.bbar.size(), t.c.size(), t.cbar.size()));
  }
}

}  // namespace

std::vector<std::string> builtin_tableau_names() {
  return {"imex-rrk-3-2", "imex-rrk-4-3", "imex-rrk-6-4"};
}

DoubleButcherTableau builtin_tableau(std::string_view name) {
  if (name == "imex-rrk-3-2") return imex_rrk_3_2();
  if (name == "imex-rrk-4-3") return imex_rrk_4_3();
  if (name == "imex-rrk-6-4") return imex_rrk_6_4();
  throw UnknownTableauError(
      fmt::format("unknown tableau '{}'; available: {}", name,
                  fmt::join(builtin_tableau_names(), ", ")));
}

const std::array<std::string_view, 8>& ValidationReport::order2_labels() {
  static const std::array<std::string_view, 8> labels = {
      "sum a_ij b_i",           "sum abar_ij b_i",
      "sum a_ij bbar_i",        "sum abar_ij bbar_i",
      "sum (b_j - a_ij) b_i",   "sum (bbar_j - abar_ij) b_i",
      "sum (b_j - a_ij) bbar_i", "sum (bbar_j - abar_ij) bbar_i"};
  return labels;
}

bool ValidationReport::order2_satisfied() const {
  return std::all_of(order2.begin(), order2.end(),
                     [](double r) { return r <= kTolerance; });
}

bool ValidationReport::passed() const {
  return implicit_lower_triangular && explicit_strictly_lower &&
         row_sum_residual <= kTolerance &&
         row_sum_residual_explicit <= kTolerance &&
         weight_sum_residual <= kTolerance &&
         weight_sum_residual_explicit <= kTolerance &&
         weight_mismatch <= kTolerance && order2_satisfied();
}

bool ValidationReport::dissipative_weights() const {
  return weight_mismatch == 0.0 && weights_nonnegative;
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  auto flag = [](bool ok) { return ok ? "ok" : "FAIL"; };
  os << fmt::format("  A lower triangular          : {}\n",
                    flag(implicit_lower_triangular));
  os << fmt::format("  Abar strictly lower         : {}\n",
                    flag(explicit_strictly_lower));
  os << fmt::format("  |c - rowsum(A)|             : {:.3e}\n",
                    row_sum_residual);
  os << fmt::format("  |cbar - rowsum(Abar)|       : {:.3e}\n",
                    row_sum_residual_explicit);
  os << fmt::format("  |sum b - 1|                 : {:.3e}\n",
                    weight_sum_residual);
  os << fmt::format("  |sum bbar - 1|              : {:.3e}\n",
                    weight_sum_residual_explicit);
  os << fmt::format("  max |b - bbar|              : {:.3e}\n",
                    weight_mismatch);
  os << fmt::format("  b >= 0                      : {}\n",
                    weights_nonnegative ? "yes" : "no");
  for (std::size_t k = 0; k < order2.size(); ++k) {
    os << fmt::format("  |{:<28}- 1/2| : {:.3e}\n", order2_labels()[k],
                      order2[k]);
  }
  os << fmt::format("  order-2 + consistency       : {}\n", flag(passed()));
  os << fmt::format("  b = bbar >= 0 (dissipative) : {}\n",
                    flag(dissipative_weights()));
  return os.str();
}

ValidationReport validate(const DoubleButcherTableau& t) {
  check_structure(t);
  const int s = t.stages();
  ValidationReport r;

  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (j > i && t.a(i, j) != 0.0) r.implicit_lower_triangular = false;
      if (j >= i && t.abar(i, j) != 0.0) r.explicit_strictly_lower = false;
    }
    r.row_sum_residual =
        std::max(r.row_sum_residual, std::abs(t.c(i) - t.a.row(i).sum()));
    r.row_sum_residual_explicit = std::max(
        r.row_sum_residual_explicit, std::abs(t.cbar(i) - t.abar.row(i).sum()));
    r.weight_mismatch = std::max(r.weight_mismatch, std::abs(t.b(i) - t.bbar(i)));
    if (t.b(i) < 0.0 || t.bbar(i) < 0.0) r.weights_nonnegative = false;
  }
  r.weight_sum_residual = std::abs(t.b.sum() - 1.0);
  r.weight_sum_residual_explicit = std::abs(t.bbar.sum() - 1.0);

  // sum_ij m_ij w_i for a coefficient matrix m and weight vector w.
  auto weighted = [](const Eigen::MatrixXd& m, const Eigen::VectorXd& w) {
    return w.dot(m.rowwise().sum());
  };
  // sum_ij (v_j - m_ij) w_i
  auto complement = [s](const Eigen::MatrixXd& m, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& w) {
    double acc = 0.0;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) acc += (v(j) - m(i, j)) * w(i);
    return acc;
  };
  const std::array<double, 8> sums = {
      weighted(t.a, t.b),           weighted(t.abar, t.b),
      weighted(t.a, t.bbar),        weighted(t.abar, t.bbar),
      complement(t.a, t.b, t.b),    complement(t.abar, t.bbar, t.b),
      complement(t.a, t.b, t.bbar), complement(t.abar, t.bbar, t.bbar)};
  for (std::size_t k = 0; k < sums.size(); ++k) {
    r.order2[k] = std::abs(sums[k] - 0.5);
  }
  return r;
}

DissipationMatrices dissipation_matrices(const DoubleButcherTableau& t) {
  check_structure(t);
  const int s = t.stages();
  DissipationMatrices d;
  d.b_diag = t.b.asDiagonal();
  d.bbar_diag = t.bbar.asDiagonal();
  const auto& B = d.b_diag;
  const auto& Bb = d.bbar_diag;
  const auto& A = t.a;
  const auto& Ab = t.abar;

  d.m.resize(2 * s, 2 * s);
  d.m.topLeftCorner(s, s) = B * A + A.transpose() * B - t.b * t.b.transpose();
  d.m.topRightCorner(s, s) =
      A.transpose() * Bb + B * Ab - t.b * t.bbar.transpose();
  d.m.bottomLeftCorner(s, s) =
      Bb * A + Ab.transpose() * B - t.bbar * t.b.transpose();
  d.m.bottomRightCorner(s, s) =
      Bb * Ab + Ab.transpose() * Bb - t.bbar * t.bbar.transpose();
  d.stilde = Bb * Ab + Ab.transpose() * Bb - t.bbar * t.bbar.transpose();

  auto min_eig = [](const Eigen::MatrixXd& m) {
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  d.min_eigenvalue_m = min_eig(d.m);
  d.min_eigenvalue_stilde = min_eig(d.stilde);
  return d;
}

}  // namespace imexrrk
