// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "imexrrk/errors.hpp"
#include "imexrrk/harness.hpp"

#include <exception>
#include <filesystem>
#include <string>

namespace imexrrk {

/// Process exit codes of the command-line tool.
enum class ExitCode : int {
  success = 0,
  assertion_failed = 1,
  missing_file = 2,
  syntax = 3,
  unknown_key = 4,
  invalid_value = 5,
  unknown_tableau = 6,
  missing_key = 7,
  usage = 8,
  runtime = 9,
};

class ConfigError : public ConfigurationError {
 public:
  ConfigError(ExitCode code, const std::string& what)
      : ConfigurationError(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Exit code for an exception escaping a command.
ExitCode exit_code_for(const std::exception& e);

struct OutputOptions {
  std::string directory = "out";
  bool energy_csv = true;
  bool gn_diagnostics = false;
};

struct RunConfig {
  ExperimentPreset experiment;
  OutputOptions output;
};

/// Strict YAML parse.
///
///   preset: <name>          optional starting point, sections override it
///   model:  operator, epsilon, c0 (0), potential (double-well),
///           components (1), dealias (false)
///   grid:   nx, ny, lx (2pi), ly (2pi), x0 (0), y0 (0)
///   time:   tau | tau_list, t_final, tableau, mode (rt), tau_ref
///   init:   kind (sin-product), amplitude (0.5), offset (0), seed (1),
///           radius, width, centers
///   output: directory (out), energy_csv (true), gn_diagnostics (false),
///           snapshot_times, composite (false)
///
/// Without a preset, model.operator, model.epsilon, grid.nx, grid.ny,
/// time.tau or time.tau_list, time.t_final and time.tableau are required.
/// Numbers may be written as multiples of pi ("2pi").
RunConfig parse_config(const std::filesystem::path& path);
/// `base_dir` resolves relative tableau file paths.
RunConfig parse_config_text(const std::string& text,
                            const std::filesystem::path& base_dir = {});
RunConfig config_from_preset(const std::string& name);

/// Effective configuration as YAML, parseable by parse_config_text.
std::string emit_config(const RunConfig& cfg);

}  // namespace imexrrk
