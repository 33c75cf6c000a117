// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#include "imexrrk/output.hpp"

#include "imexrrk/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace imexrrk {

namespace fs = std::filesystem;

std::string version() {
#ifdef IMEXRRK_VERSION
  return IMEXRRK_VERSION;
#else
  return "unknown";
#endif
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(fmt::format("rename to '{}' failed: {}", path.string(), ec.message()));
}

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_number(v);
    first = false;
  }
  out += '\n';
}

double at_or_nan(const std::vector<double>& v, std::size_t l) {
  return l < v.size() ? v[l] : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string convergence_csv(const ConvergenceStudy& study) {
  std::string out = "tau,error_idt,order_idt,error_rt,order_rt,error_r_rt\n";
  for (const auto& r : study.rows) {
    append_row(out, {r.tau, r.error_idt, r.order_idt, r.error_rt, r.order_rt, r.error_r_rt});
  }
  return out;
}

std::string convergence_component_csv(const ConvergenceStudy& study, std::size_t l) {
  std::string out = "tau,error_idt,order_idt,error_rt,order_rt,error_r_rt\n";
  for (const auto& r : study.rows) {
    append_row(out, {r.tau, at_or_nan(r.component_error_idt, l),
                     at_or_nan(r.component_order_idt, l), at_or_nan(r.component_error_rt, l),
                     at_or_nan(r.component_order_rt, l), r.error_r_rt});
  }
  return out;
}

std::string slope_csv(const SlopeStudy& study) {
  std::string out = "tau,value\n";
  for (std::size_t i = 0; i < study.taus.size(); ++i) {
    append_row(out, {study.taus[i], study.values[i]});
  }
  return out;
}

std::string energy_csv(const std::vector<StepRecord>& records) {
  const std::size_t k = records.empty() ? 1 : records.front().mass.size();
  const bool gn = !records.empty() && records.front().gn_at_1.has_value();
  std::string out = "step,t_hat,tau,gamma,energy_modified,energy_original,stage_dissipation,r";
  for (std::size_t l = 0; l < k; ++l) out += fmt::format(",mass_{}", l + 1);
  if (gn) out += ",gn_at_1";
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},", r.step);
    out += format_number(r.t_hat_after) + ',' + format_number(r.tau) + ',' +
           format_number(r.gamma) + ',' + format_number(r.energy_modified) + ',' +
           format_number(r.energy_original) + ',' + format_number(r.stage_dissipation) +
           ',' + format_number(r.r);
    for (double m : r.mass) out += ',' + format_number(m);
    if (gn) out += ',' + format_number(r.gn_at_1.value_or(std::nan("")));
    out += '\n';
  }
  return out;
}

std::string field_csv(const Fields& u, bool composite) {
  if (u.empty()) return {};
  const auto& g = u.front().grid();
  const bool comp = composite && u.size() >= 2;
  std::string out = "i,j,x,y";
  for (std::size_t l = 0; l < u.size(); ++l) out += fmt::format(",u_{}", l + 1);
  if (comp) out += ",composite";
  out += '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      out += fmt::format("{},{},", i, j);
      out += format_number(g.x(i)) + ',' + format_number(g.y(j));
      for (const auto& f : u) out += ',' + format_number(f.at(i, j));
      if (comp) out += ',' + format_number(u[0].at(i, j) + 2.0 * u[1].at(i, j));
      out += '\n';
    }
  }
  return out;
}

std::string field_pgm(const Field& f) {
  const auto& g = f.grid();
  const auto v = f.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  std::string out = fmt::format("P5\n# min={} max={}\n{} {}\n255\n", format_number(lo),
                                format_number(hi), g.nx, g.ny);
  // Top row of the image is the largest y.
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      const double s = (f.at(i, j) - lo) / span;
      out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(s, 0.0, 1.0))));
    }
  }
  return out;
}

std::string summary_text(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) out += k + '=' + v + '\n';
  return out;
}

std::string snapshot_stem(const std::string& preset, double t) {
  return fmt::format("{}_{:.4f}", preset, t);
}

void write_snapshot(const fs::path& dir, const std::string& preset, const Snapshot& snap,
                    bool composite) {
  const auto stem = snapshot_stem(preset, snap.t_target);
  write_file_atomic(dir / (stem + ".csv"), field_csv(snap.u, composite));
  if (composite && snap.u.size() >= 2) {
    Field c = snap.u[0];
    c.axpy(2.0, snap.u[1]);
    write_file_atomic(dir / (stem + ".pgm"), field_pgm(c));
  } else {
    write_file_atomic(dir / (stem + ".pgm"), field_pgm(snap.u.front()));
  }
}

}  // namespace imexrrk
