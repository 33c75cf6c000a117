// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/errors.hpp"
#include "imexrrk/tableau.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace imexrrk {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& tok, int line) {
  auto to_double = [&](std::string_view v) {
    double x = 0.0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end) {
      throw ConfigurationError(
          fmt::format("tableau line {}: cannot parse entry '{}'", line, tok));
    }
    return x;
  };
  const auto slash = tok.find('/');
  if (slash == std::string::npos) return to_double(tok);
  const std::string_view sv(tok);
  const double den = to_double(sv.substr(slash + 1));
  if (den == 0.0) {
    throw ConfigurationError(
        fmt::format("tableau line {}: zero denominator in '{}'", line, tok));
  }
  return to_double(sv.substr(0, slash)) / den;
}

}  // namespace

DoubleButcherTableau parse_tableau(std::istream& in) {
  DoubleButcherTableau t;
  t.name = "user";
  std::map<std::string, std::vector<std::vector<double>>> sections;
  std::string current;
  std::string raw;
  int line = 0;

  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string text = trim(raw);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigurationError(
            fmt::format("tableau line {}: unterminated section header", line));
      }
      current = trim(std::string_view(text).substr(1, text.size() - 2));
      static const std::array<std::string_view, 6> known = {
          "A", "Abar", "b", "bbar", "c", "cbar"};
      if (std::find(known.begin(), known.end(), current) == known.end()) {
        throw ConfigurationError(
            fmt::format("tableau line {}: unknown section [{}]", line, current));
      }
      if (sections.count(current)) {
        throw ConfigurationError(
            fmt::format("tableau line {}: duplicate section [{}]", line, current));
      }
      sections[current];
      continue;
    }

    if (const auto eq = text.find('='); eq != std::string::npos) {
      const auto key = trim(std::string_view(text).substr(0, eq));
      const auto value = trim(std::string_view(text).substr(eq + 1));
      if (key == "name") {
        t.name = value;
      } else if (key == "order") {
        t.order = static_cast<int>(parse_number(value, line));
      } else {
        throw ConfigurationError(
            fmt::format("tableau line {}: unknown key '{}'", line, key));
      }
      continue;
    }

    if (current.empty()) {
      throw ConfigurationError(
          fmt::format("tableau line {}: entries outside of a section", line));
    }
    std::istringstream row(text);
    std::vector<double> values;
    for (std::string tok; row >> tok;) values.push_back(parse_number(tok, line));
    sections[current].push_back(std::move(values));
  }

  for (const char* required : {"A", "Abar", "b", "bbar"}) {
    if (!sections.count(required)) {
      throw StructuralError(
          fmt::format("tableau '{}': missing section [{}]", t.name, required));
    }
  }

  auto as_matrix = [&](const std::string& key) {
    const auto& rows = sections[key];
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(r.size()) != n) {
        throw StructuralError(fmt::format(
            "tableau '{}': [{}] row {} has {} entries, expected {}", t.name,
            key, i + 1, r.size(), n));
      }
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = r[static_cast<std::size_t>(j)];
    }
    return m;
  };
  // Vectors may be written on one line or one entry per line.
  auto as_vector = [&](const std::string& key) {
    std::vector<double> flat;
    for (const auto& r : sections[key]) flat.insert(flat.end(), r.begin(), r.end());
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(
        flat.data(), static_cast<Eigen::Index>(flat.size())));
  };

  t.a = as_matrix("A");
  t.abar = as_matrix("Abar");
  t.b = as_vector("b");
  t.bbar = as_vector("bbar");
  t.c = sections.count("c") ? as_vector("c") : Eigen::VectorXd(t.a.rowwise().sum());
  t.cbar = sections.count("cbar") ? as_vector("cbar")
                                  : Eigen::VectorXd(t.abar.rowwise().sum());
  // Dimension consistency is checked here so that malformed files fail early.
  (void)validate(t);
  return t;
}

DoubleButcherTableau load_tableau(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigurationError(
        fmt::format("cannot open tableau file '{}'", path.string()));
  }
  return parse_tableau(in);
}

DoubleButcherTableau resolve_tableau(const std::string& name_or_path) {
  const auto names = builtin_tableau_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return builtin_tableau(name_or_path);
  }
  if (std::filesystem::is_regular_file(name_or_path)) {
    return load_tableau(name_or_path);
  }
  return builtin_tableau(name_or_path);  // throws with the list of builtins
}

}  // namespace imexrrk
