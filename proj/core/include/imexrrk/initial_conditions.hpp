// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "imexrrk/model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace imexrrk {

/// Initial data recipe.
///
/// Kinds:
///   sin-product   u_l = amplitude * sin(x) sin(y)
///   cos-product   u_l = amplitude * cos(pi x) cos(pi y) for l < k, and the
///                 last component closes the partition 1 - sum (if k > 1)
///   random        u_l = offset + amplitude * Rand, Rand iid uniform on [-1, 1]
///   tanh-circles  u_l = (1 + tanh((radius - |x - c_l|) / width)) / 2 for the
///                 given centers, last component closes the partition
///   constant      u_l = offset
struct InitSpec {
  std::string kind = "sin-product";
  double amplitude = 0.5;
  double offset = 0.0;
  std::uint64_t seed = 1;
  double radius = 0.25;
  double width = 0.025;
  std::vector<std::array<double, 2>> centers;

  /// Throws ConfigurationError for an unknown kind or inconsistent data.
  void check(int components) const;
};

std::vector<std::string> init_kind_names();

/// Counter-based uniform sample on [-1, 1] for (seed, index).
double uniform_sample(std::uint64_t seed, std::uint64_t index);

Fields make_initial(const InitSpec& init, const ModelSpec& model);

}  // namespace imexrrk
