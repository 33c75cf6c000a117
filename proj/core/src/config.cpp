// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/config.hpp"

#include "imexrrk/output.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace imexrrk {

namespace fs = std::filesystem;

ExitCode exit_code_for(const std::exception& e) {
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) return c->code();
  if (dynamic_cast<const UnknownTableauError*>(&e)) return ExitCode::unknown_tableau;
  if (dynamic_cast<const ConfigurationError*>(&e)) return ExitCode::invalid_value;
  return ExitCode::runtime;
}

namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return "config";
  return fmt::format("line {}, column {}", m.line + 1, m.column + 1);
}

[[noreturn]] void invalid(const YAML::Node& n, const std::string& what) {
  throw ConfigError(ExitCode::invalid_value, fmt::format("{}: {}", where(n), what));
}

void check_keys(const YAML::Node& section, const std::string& name,
                const std::set<std::string>& allowed) {
  if (!section.IsMap()) invalid(section, fmt::format("section '{}' must be a mapping", name));
  for (const auto& kv : section) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      std::vector<std::string> list(allowed.begin(), allowed.end());
      throw ConfigError(ExitCode::unknown_key,
                        fmt::format("{}: unknown key '{}{}'; allowed: {}", where(kv.first),
                                    name.empty() ? "" : name + ".", key,
                                    fmt::join(list, ", ")));
    }
  }
}

double parse_plain(std::string_view s, bool& ok) {
  double x = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  ok = ec == std::errc{} && ptr == end;
  return x;
}

double to_number(const YAML::Node& n) {
  if (!n.IsScalar()) invalid(n, "expected a number");
  std::string s = n.Scalar();
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  bool ok = false;
  double v = 0.0;
  if (s.size() >= 2 && s.ends_with("pi")) {
    std::string coeff = s.substr(0, s.size() - 2);
    if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
    double c = 1.0;
    if (coeff == "-") {
      c = -1.0;
      ok = true;
    } else if (coeff.empty()) {
      ok = true;
    } else {
      c = parse_plain(coeff, ok);
    }
    v = c * std::numbers::pi;
  } else if (const auto slash = s.find('/'); slash != std::string::npos) {
    bool ok2 = false;
    const double num = parse_plain(std::string_view(s).substr(0, slash), ok);
    const double den = parse_plain(std::string_view(s).substr(slash + 1), ok2);
    ok = ok && ok2 && den != 0.0;
    v = num / den;
  } else {
    v = parse_plain(s, ok);
  }
  if (!ok || !std::isfinite(v)) invalid(n, fmt::format("'{}' is not a finite number", n.Scalar()));
  return v;
}

long to_integer(const YAML::Node& n) {
  const double v = to_number(n);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) invalid(n, fmt::format("'{}' is not an integer", n.Scalar()));
  return static_cast<long>(v);
}

bool to_bool(const YAML::Node& n) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    invalid(n, fmt::format("'{}' is not a boolean", n.IsScalar() ? n.Scalar() : "?"));
  }
}

std::string to_string_value(const YAML::Node& n) {
  if (!n.IsScalar()) invalid(n, "expected a string");
  return n.Scalar();
}

std::vector<double> to_number_list(const YAML::Node& n) {
  if (!n.IsSequence()) invalid(n, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& e : n) out.push_back(to_number(e));
  return out;
}

void require(const YAML::Node& section, const char* key, const char* path) {
  if (!section || !section[key]) {
    throw ConfigError(ExitCode::missing_key, fmt::format("missing required key '{}'", path));
  }
}

void apply_model(const YAML::Node& m, ModelSpec& spec) {
  check_keys(m, "model", {"operator", "epsilon", "c0", "potential", "components", "dealias"});
  try {
    if (m["operator"]) spec.op = flow_operator_from_name(to_string_value(m["operator"]));
  } catch (const ConfigError&) {
    throw;
  } catch (const ConfigurationError& e) {
    invalid(m["operator"], e.what());
  }
  if (m["epsilon"]) {
    spec.epsilon = to_number(m["epsilon"]);
    if (!(spec.epsilon > 0.0)) invalid(m["epsilon"], "epsilon must be positive");
  }
  if (m["c0"]) {
    spec.c0 = to_number(m["c0"]);
    if (!(spec.c0 >= 0.0)) invalid(m["c0"], "c0 must be non-negative");
  }
  if (m["potential"]) {
    try {
      spec.potential = Potential::from_name(to_string_value(m["potential"]));
    } catch (const ConfigError&) {
      throw;
    } catch (const ConfigurationError& e) {
      invalid(m["potential"], e.what());
    }
  }
  if (m["components"]) {
    const long k = to_integer(m["components"]);
    if (k < 1 || k > 64) invalid(m["components"], "components must be in [1, 64]");
    spec.components = static_cast<int>(k);
  }
  if (m["dealias"]) spec.dealias = to_bool(m["dealias"]);
}

void apply_grid(const YAML::Node& g, PeriodicGrid& grid) {
  check_keys(g, "grid", {"nx", "ny", "lx", "ly", "x0", "y0"});
  auto size = [&](const char* key, int& out) {
    if (!g[key]) return;
    const long v = to_integer(g[key]);
    if (v < 2 || v > (1 << 16)) invalid(g[key], fmt::format("{} out of range", key));
    out = static_cast<int>(v);
  };
  size("nx", grid.nx);
  size("ny", grid.ny);
  auto length = [&](const char* key, double& out) {
    if (!g[key]) return;
    out = to_number(g[key]);
    if (!(out > 0.0)) invalid(g[key], fmt::format("{} must be positive", key));
  };
  length("lx", grid.lx);
  length("ly", grid.ly);
  if (g["x0"]) grid.x0 = to_number(g["x0"]);
  if (g["y0"]) grid.y0 = to_number(g["y0"]);
  try {
    grid.check();
  } catch (const ConfigurationError& e) {
    invalid(g, e.what());
  }
}

void apply_time(const YAML::Node& t, ExperimentPreset& p, const fs::path& base_dir) {
  check_keys(t, "time",
             {"tau", "tau_list", "slope_tau_list", "t_final", "tableau", "mode", "tau_ref"});
  if (t["tau"] && t["tau_list"]) invalid(t, "give either tau or tau_list, not both");
  auto positive = [&](const YAML::Node& n) {
    const double v = to_number(n);
    if (!(v > 0.0)) invalid(n, "step sizes and times must be positive");
    return v;
  };
  if (t["tau"]) p.taus = {positive(t["tau"])};
  if (t["tau_list"]) {
    p.taus.clear();
    for (const auto& e : t["tau_list"]) p.taus.push_back(positive(e));
    if (!t["tau_list"].IsSequence() || p.taus.empty()) invalid(t["tau_list"], "expected a non-empty list");
    for (std::size_t i = 1; i < p.taus.size(); ++i) {
      if (!(p.taus[i] < p.taus[i - 1])) invalid(t["tau_list"], "tau_list must be strictly decreasing");
    }
  }
  // Explicit step sizes replace a preset's slope steps unless those are given too.
  if (t["tau"] || t["tau_list"]) p.slope_taus.clear();
  if (t["slope_tau_list"]) {
    const auto& n = t["slope_tau_list"];
    if (!n.IsSequence() || n.size() == 0) invalid(n, "expected a non-empty list");
    p.slope_taus.clear();
    for (const auto& e : n) p.slope_taus.push_back(positive(e));
    for (std::size_t i = 1; i < p.slope_taus.size(); ++i) {
      if (!(p.slope_taus[i] < p.slope_taus[i - 1])) invalid(n, "slope_tau_list must be strictly decreasing");
    }
  }
  if (t["t_final"]) p.t_final = positive(t["t_final"]);
  if (t["tau_ref"]) p.tau_ref = positive(t["tau_ref"]);
  if (t["mode"]) {
    try {
      p.mode = stepping_mode_from_name(to_string_value(t["mode"]));
    } catch (const ConfigError&) {
      throw;
    } catch (const ConfigurationError& e) {
      invalid(t["mode"], e.what());
    }
  }
  if (t["tableau"]) {
    std::string name = to_string_value(t["tableau"]);
    const auto names = builtin_tableau_names();
    if (std::find(names.begin(), names.end(), name) == names.end() && !base_dir.empty() &&
        fs::path(name).is_relative() && fs::is_regular_file(base_dir / name)) {
      name = (base_dir / name).string();
    }
    try {
      resolve_tableau(name);
    } catch (const UnknownTableauError& e) {
      throw ConfigError(ExitCode::unknown_tableau, fmt::format("{}: {}", where(t["tableau"]), e.what()));
    } catch (const ConfigurationError& e) {
      invalid(t["tableau"], e.what());
    }
    p.tableau = name;
  }
}

void apply_init(const YAML::Node& n, InitSpec& init) {
  check_keys(n, "init", {"kind", "amplitude", "offset", "seed", "radius", "width", "centers"});
  if (n["kind"]) init.kind = to_string_value(n["kind"]);
  if (n["amplitude"]) init.amplitude = to_number(n["amplitude"]);
  if (n["offset"]) init.offset = to_number(n["offset"]);
  if (n["seed"]) {
    const long s = to_integer(n["seed"]);
    if (s < 0) invalid(n["seed"], "seed must be non-negative");
    init.seed = static_cast<std::uint64_t>(s);
  }
  if (n["radius"]) init.radius = to_number(n["radius"]);
  if (n["width"]) init.width = to_number(n["width"]);
  if (n["centers"]) {
    if (!n["centers"].IsSequence()) invalid(n["centers"], "centers must be a list of [x, y] pairs");
    init.centers.clear();
    for (const auto& c : n["centers"]) {
      const auto xy = to_number_list(c);
      if (xy.size() != 2) invalid(c, "each center needs two coordinates");
      init.centers.push_back({xy[0], xy[1]});
    }
  }
}

void apply_output(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, "output", {"directory", "energy_csv", "gn_diagnostics", "snapshot_times", "composite"});
  if (n["directory"]) cfg.output.directory = to_string_value(n["directory"]);
  if (n["energy_csv"]) cfg.output.energy_csv = to_bool(n["energy_csv"]);
  if (n["gn_diagnostics"]) cfg.output.gn_diagnostics = to_bool(n["gn_diagnostics"]);
  if (n["composite"]) cfg.experiment.composite = to_bool(n["composite"]);
  if (n["snapshot_times"]) {
    auto times = to_number_list(n["snapshot_times"]);
    for (double t : times) {
      if (t < 0.0) invalid(n["snapshot_times"], "snapshot times must be non-negative");
    }
    if (!std::is_sorted(times.begin(), times.end())) invalid(n["snapshot_times"], "snapshot times must be sorted");
    cfg.experiment.snapshot_times = std::move(times);
  }
}

}  // namespace

RunConfig config_from_preset(const std::string& name) {
  RunConfig cfg;
  cfg.experiment = preset(name);
  return cfg;
}

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(ExitCode::syntax, fmt::format("syntax error at line {}, column {}: {}",
                                                    e.mark.line + 1, e.mark.column + 1, e.msg));
  }
  if (!root.IsMap()) {
    throw ConfigError(ExitCode::syntax, "configuration must be a mapping of sections");
  }
  check_keys(root, "", {"preset", "model", "grid", "time", "init", "output"});

  RunConfig cfg;
  const bool from_preset = static_cast<bool>(root["preset"]);
  if (from_preset) {
    try {
      cfg = config_from_preset(to_string_value(root["preset"]));
    } catch (const ConfigError&) {
      throw;
    } catch (const ConfigurationError& e) {
      invalid(root["preset"], e.what());
    }
  } else {
    require(root["model"], "operator", "model.operator");
    require(root["model"], "epsilon", "model.epsilon");
    require(root["grid"], "nx", "grid.nx");
    require(root["grid"], "ny", "grid.ny");
    if (!root["time"] || (!root["time"]["tau"] && !root["time"]["tau_list"])) {
      throw ConfigError(ExitCode::missing_key, "missing required key 'time.tau' (or 'time.tau_list')");
    }
    require(root["time"], "t_final", "time.t_final");
    require(root["time"], "tableau", "time.tableau");
    cfg.experiment.name = "run";
  }

  auto& p = cfg.experiment;
  if (root["model"]) apply_model(root["model"], p.model);
  if (root["grid"]) apply_grid(root["grid"], p.model.grid);
  if (root["time"]) apply_time(root["time"], p, base_dir);
  if (root["init"]) apply_init(root["init"], p.init);
  if (root["output"]) apply_output(root["output"], cfg);

  try {
    p.check();
  } catch (const ConfigurationError& e) {
    throw ConfigError(ExitCode::invalid_value, e.what());
  }
  return cfg;
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ExitCode::missing_file,
                      fmt::format("cannot read config file '{}'", path.string()));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config_text(ss.str(), base);
}

std::string emit_config(const RunConfig& cfg) {
  const auto& p = cfg.experiment;
  const auto& m = p.model;
  const auto& g = m.grid;
  auto num = [](double v) { return format_number(v); };

  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "operator" << YAML::Value << std::string(to_string(m.op));
  out << YAML::Key << "epsilon" << YAML::Value << num(m.epsilon);
  out << YAML::Key << "c0" << YAML::Value << num(m.c0);
  out << YAML::Key << "potential" << YAML::Value << std::string(m.potential.name());
  out << YAML::Key << "components" << YAML::Value << m.components;
  out << YAML::Key << "dealias" << YAML::Value << m.dealias;
  out << YAML::EndMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "nx" << YAML::Value << g.nx;
  out << YAML::Key << "ny" << YAML::Value << g.ny;
  out << YAML::Key << "lx" << YAML::Value << num(g.lx);
  out << YAML::Key << "ly" << YAML::Value << num(g.ly);
  out << YAML::Key << "x0" << YAML::Value << num(g.x0);
  out << YAML::Key << "y0" << YAML::Value << num(g.y0);
  out << YAML::EndMap;

  out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
  if (p.taus.size() == 1) {
    out << YAML::Key << "tau" << YAML::Value << num(p.taus.front());
  } else {
    out << YAML::Key << "tau_list" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double t : p.taus) out << num(t);
    out << YAML::EndSeq;
  }
  if (!p.slope_taus.empty()) {
    out << YAML::Key << "slope_tau_list" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double t : p.slope_taus) out << num(t);
    out << YAML::EndSeq;
  }
  out << YAML::Key << "t_final" << YAML::Value << num(p.t_final);
  out << YAML::Key << "tableau" << YAML::Value << p.tableau;
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(p.mode));
  if (p.tau_ref) out << YAML::Key << "tau_ref" << YAML::Value << num(*p.tau_ref);
  out << YAML::EndMap;

  out << YAML::Key << "init" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << p.init.kind;
  out << YAML::Key << "amplitude" << YAML::Value << num(p.init.amplitude);
  out << YAML::Key << "offset" << YAML::Value << num(p.init.offset);
  out << YAML::Key << "seed" << YAML::Value << p.init.seed;
  out << YAML::Key << "radius" << YAML::Value << num(p.init.radius);
  out << YAML::Key << "width" << YAML::Value << num(p.init.width);
  out << YAML::Key << "centers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& c : p.init.centers) {
    out << YAML::Flow << YAML::BeginSeq << num(c[0]) << num(c[1]) << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << cfg.output.directory;
  out << YAML::Key << "energy_csv" << YAML::Value << cfg.output.energy_csv;
  out << YAML::Key << "gn_diagnostics" << YAML::Value << cfg.output.gn_diagnostics;
  out << YAML::Key << "snapshot_times" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double t : p.snapshot_times) out << num(t);
  out << YAML::EndSeq;
  out << YAML::Key << "composite" << YAML::Value << p.composite;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return fmt::format("# imexrrk {}\n# preset: {}\n{}\n", version(), p.name, out.c_str());
}

}  // namespace imexrrk
