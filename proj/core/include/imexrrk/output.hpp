// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "imexrrk/harness.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace imexrrk {

/// Library version string.
std::string version();

/// Shortest representation that round-trips; "nan"/"inf" for non-finite.
std::string format_number(double v);

/// Writes to a temporary sibling and renames it into place. Creates parent
/// directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// tau,error_idt,order_idt,error_rt,order_rt,error_r_rt
std::string convergence_csv(const ConvergenceStudy& study);
/// Same columns restricted to component `l` (error_r_rt kept).
std::string convergence_component_csv(const ConvergenceStudy& study, std::size_t l);
/// tau,value
std::string slope_csv(const SlopeStudy& study);
/// step,t_hat,tau,gamma,energy_modified,energy_original,stage_dissipation,r,
/// mass_1..mass_k[,gn_at_1]
std::string energy_csv(const std::vector<StepRecord>& records);
/// i,j,x,y,u_1..u_k[,composite]  with composite = u_1 + 2 u_2.
std::string field_csv(const Fields& u, bool composite);
/// Binary 8-bit PGM of `f` scaled to its own range, with the range recorded
/// in a comment line.
std::string field_pgm(const Field& f);
/// key=value per line.
std::string summary_text(const std::vector<std::pair<std::string, std::string>>& entries);

/// "{preset}_{t:.4f}"
std::string snapshot_stem(const std::string& preset, double t);

/// CSV and PGM for one snapshot. Vector snapshots image the composite when
/// requested, else the first component.
void write_snapshot(const std::filesystem::path& dir, const std::string& preset,
                    const Snapshot& snap, bool composite);

}  // namespace imexrrk
