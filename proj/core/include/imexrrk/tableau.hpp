// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace imexrrk {

/// Paired implicit (A, b, c) and explicit (Abar, bbar, cbar) coefficients of
/// a diagonally implicit-explicit Runge-Kutta method.
///
/// A is lower triangular (diagonal allowed), Abar strictly lower triangular.
/// Instances are immutable once built and may be shared between threads.
struct DoubleButcherTableau {
  std::string name;
  /// Designed order p. Only used to set slope expectations.
  int order = 2;

  Eigen::MatrixXd a;
  Eigen::MatrixXd abar;
  Eigen::VectorXd b;
  Eigen::VectorXd bbar;
  Eigen::VectorXd c;
  Eigen::VectorXd cbar;

  int stages() const { return static_cast<int>(b.size()); }
};

/// Names accepted by builtin_tableau().
std::vector<std::string> builtin_tableau_names();

/// Returns one of the builtin IMEX RRK(s,p) tableaux.
/// Throws UnknownTableauError listing the available names.
DoubleButcherTableau builtin_tableau(std::string_view name);

/// Residuals of the consistency and order-2 conditions of a tableau.
struct ValidationReport {
  static constexpr double kTolerance = 1e-12;

  /// Labels of the eight second-order sums, in the order of `order2`.
  static const std::array<std::string_view, 8>& order2_labels();

  bool implicit_lower_triangular = true;
  bool explicit_strictly_lower = true;
  double row_sum_residual = 0.0;           // max_i |c_i - sum_j a_ij|
  double row_sum_residual_explicit = 0.0;  // max_i |cbar_i - sum_j abar_ij|
  double weight_sum_residual = 0.0;        // |sum b - 1|
  double weight_sum_residual_explicit = 0.0;
  double weight_mismatch = 0.0;            // max_i |b_i - bbar_i|
  bool weights_nonnegative = true;
  /// |sum - 1/2| for each second-order sum.
  std::array<double, 8> order2{};

  bool order2_satisfied() const;
  /// Structure, row sums, weight sums and b = bbar within kTolerance, and
  /// the order-2 conditions hold. Sign of the weights is not part of it.
  bool passed() const;
  /// b = bbar >= 0, the hypothesis of the energy-decay theorem.
  bool dissipative_weights() const;
  /// Pretty multi-line report.
  std::string describe() const;
};

/// Throws StructuralError when dimensions are inconsistent.
ValidationReport validate(const DoubleButcherTableau& t);

/// The 2s x 2s matrix M and the s x s matrix Stilde governing the quadratic
/// remainder of the discrete energy expansion of the unrelaxed method.
struct DissipationMatrices {
  Eigen::MatrixXd m;
  Eigen::MatrixXd stilde;
  Eigen::MatrixXd b_diag;
  Eigen::MatrixXd bbar_diag;
  /// Smallest eigenvalue of the symmetric part, diagnostic only.
  double min_eigenvalue_m = 0.0;
  double min_eigenvalue_stilde = 0.0;
};

DissipationMatrices dissipation_matrices(const DoubleButcherTableau& t);

/// Reads a tableau from the sectioned text format:
///
///     name = my-method
///     order = 2
///     [A]
///     0.5   0
///     1/2   1/2
///     [Abar]
///     ...
///     [b]   [bbar]   [c] (optional)   [cbar] (optional)
///
/// Entries are decimals or p/q rationals. Missing c/cbar default to row sums.
DoubleButcherTableau parse_tableau(std::istream& in);
DoubleButcherTableau load_tableau(const std::filesystem::path& path);

/// Builtin name, or a path to a tableau file when no builtin matches.
DoubleButcherTableau resolve_tableau(const std::string& name_or_path);

}  // namespace imexrrk
