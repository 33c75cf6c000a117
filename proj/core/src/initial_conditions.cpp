// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/initial_conditions.hpp"

#include "imexrrk/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imexrrk {

namespace {

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void close_partition(Fields& u, const PeriodicGrid& g) {
  Field last(g, 1.0);
  for (std::size_t l = 0; l + 1 < u.size(); ++l) last -= u[l];
  u.back() = std::move(last);
}

}  // namespace

std::vector<std::string> init_kind_names() {
  return {"sin-product", "cos-product", "random", "tanh-circles", "constant"};
}

void InitSpec::check(int components) const {
  const auto names = init_kind_names();
  if (std::find(names.begin(), names.end(), kind) == names.end()) {
    throw ConfigurationError(fmt::format(
        "unknown initial condition '{}'; available: {}", kind, fmt::join(names, ", ")));
  }
  if (!std::isfinite(amplitude) || !std::isfinite(offset)) {
    throw ConfigurationError("initial amplitude and offset must be finite");
  }
  if (kind == "tanh-circles") {
    const auto need = static_cast<std::size_t>(components > 1 ? components - 1 : 1);
    if (centers.size() != need) {
      throw ConfigurationError(fmt::format(
          "tanh-circles needs {} centers for {} components, got {}", need,
          components, centers.size()));
    }
    if (!(width > 0.0) || !(radius > 0.0)) {
      throw ConfigurationError("tanh-circles needs positive radius and width");
    }
  }
}

double uniform_sample(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t bits = mix(mix(seed) ^ index);
  // 53 random mantissa bits -> [0, 1) -> [-1, 1)
  const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

Fields make_initial(const InitSpec& init, const ModelSpec& model) {
  init.check(model.components);
  const auto& g = model.grid;
  const int k = model.components;
  Fields u;
  u.reserve(static_cast<std::size_t>(k));
  const double pi = std::numbers::pi;

  if (init.kind == "sin-product") {
    for (int l = 0; l < k; ++l) {
      u.push_back(Field::from_function(g, [&](double x, double y) {
        return init.amplitude * std::sin(x) * std::sin(y);
      }));
    }
  } else if (init.kind == "cos-product") {
    for (int l = 0; l < k; ++l) {
      u.push_back(Field::from_function(g, [&](double x, double y) {
        return init.amplitude * std::cos(pi * x) * std::cos(pi * y);
      }));
    }
    if (k > 1) close_partition(u, g);
  } else if (init.kind == "random") {
    const std::uint64_t n = g.size();
    for (int l = 0; l < k; ++l) {
      Field f(g);
      for (std::uint64_t p = 0; p < n; ++p) {
        f[p] = init.offset +
               init.amplitude * uniform_sample(init.seed, static_cast<std::uint64_t>(l) * n + p);
      }
      u.push_back(std::move(f));
    }
  } else if (init.kind == "tanh-circles") {
    for (int l = 0; l < k; ++l) {
      const auto& c = init.centers[static_cast<std::size_t>(std::min(l, static_cast<int>(init.centers.size()) - 1))];
      u.push_back(Field::from_function(g, [&](double x, double y) {
        const double d = std::hypot(x - c[0], y - c[1]);
        return 0.5 * (1.0 + std::tanh((init.radius - d) / init.width));
      }));
    }
    if (k > 1) close_partition(u, g);
  } else {
    for (int l = 0; l < k; ++l) u.emplace_back(g, init.offset);
  }
  return u;
}

}  // namespace imexrrk
