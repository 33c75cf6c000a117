// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imexrrk/config.hpp"
#include "imexrrk/output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

using namespace imexrrk;
namespace fs = std::filesystem;

namespace {

ExitCode code_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.code();
  }
  return ExitCode::success;
}

const char* kMinimal = R"(model:
  operator: allen-cahn
  epsilon: 0.5
grid:
  nx: 32
  ny: 32
time:
  tau: 0.01
  t_final: 1
  tableau: imex-rrk-3-2
)";

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("imexrrk_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const auto cfg = parse_config_text(kMinimal);
  const auto& p = cfg.experiment;
  CHECK(p.model.op == FlowOperator::allen_cahn);
  CHECK(p.model.c0 == 0.0);
  CHECK(p.model.potential == Potential::double_well());
  CHECK(p.model.components == 1);
  CHECK(p.model.grid.lx == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(p.mode == SteppingMode::rt);
  CHECK(p.taus == std::vector<double>{0.01});
  CHECK(p.init.kind == "sin-product");
  CHECK(cfg.output.directory == "out");
  CHECK(cfg.output.energy_csv);
  CHECK_FALSE(cfg.output.gn_diagnostics);
}

TEST_CASE("numbers with pi and fractions") {
  std::string text = kMinimal;
  text.replace(text.find("tau: 0.01"), 9, "tau_list: [1/100, 1/200]");
  CHECK(parse_config_text(text).experiment.taus == std::vector<double>{0.01, 0.005});
  // tau and tau_list together are ambiguous.
  CHECK(code_of(std::string(kMinimal) + "  tau_list: [0.1]\n") == ExitCode::invalid_value);
  const auto cfg = parse_config_text(std::string(kMinimal).replace(
      std::string(kMinimal).find("nx: 32"), 6, "nx: 32\n  lx: 2pi\n  ly: pi"));
  CHECK(cfg.experiment.model.grid.lx == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(cfg.experiment.model.grid.ly == doctest::Approx(std::numbers::pi));
}

TEST_CASE("exit codes") {
  CHECK(code_of("model: [unclosed\n") == ExitCode::syntax);
  CHECK(code_of(std::string(kMinimal) + "extra: 1\n") == ExitCode::unknown_key);
  {
    std::string t = kMinimal;
    t.replace(t.find("epsilon: 0.5"), 12, "epsilon: 0.5\n  epsilom: 1");
    CHECK(code_of(t) == ExitCode::unknown_key);
  }
  {
    std::string t = kMinimal;
    t.replace(t.find("epsilon: 0.5"), 12, "epsilon: -1");
    CHECK(code_of(t) == ExitCode::invalid_value);
  }
  {
    std::string t = kMinimal;
    t.replace(t.find("nx: 32"), 6, "nx: 33");
    CHECK(code_of(t) == ExitCode::invalid_value);
  }
  {
    std::string t = kMinimal;
    t.replace(t.find("epsilon: 0.5"), 12, "epsilon: abc");
    CHECK(code_of(t) == ExitCode::invalid_value);
  }
  {
    std::string t = kMinimal;
    t.replace(t.find("imex-rrk-3-2"), 12, "imex-rrk-5-9");
    CHECK(code_of(t) == ExitCode::unknown_tableau);
  }
  {
    std::string t = kMinimal;
    t.replace(t.find("  t_final: 1\n"), 13, "");
    CHECK(code_of(t) == ExitCode::missing_key);
  }
  {
    std::string t = kMinimal;
    t.replace(t.find("  tau: 0.01\n"), 12, "");
    CHECK(code_of(t) == ExitCode::missing_key);
  }
  CHECK(code_of("preset: ac-rrk99\n") == ExitCode::invalid_value);
  try {
    parse_config("/nonexistent/imexrrk.yaml");
    FAIL("expected a missing-file error");
  } catch (const ConfigError& e) {
    CHECK(e.code() == ExitCode::missing_file);
  }
  CHECK(exit_code_for(UnknownTableauError("x")) == ExitCode::unknown_tableau);
  CHECK(exit_code_for(ConfigurationError("x")) == ExitCode::invalid_value);
  CHECK(exit_code_for(std::runtime_error("x")) == ExitCode::runtime);
  CHECK(exit_code_for(ConfigError(ExitCode::missing_key, "x")) == ExitCode::missing_key);
}

TEST_CASE("errors carry the location") {
  std::string t = kMinimal;
  t.replace(t.find("epsilon: 0.5"), 12, "epsilon: abc");
  try {
    parse_config_text(t);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("preset with overrides") {
  const auto cfg = parse_config_text("preset: ac-rrk43\ntime:\n  mode: idt\ngrid:\n  nx: 64\n");
  CHECK(cfg.experiment.name == "ac-rrk43");
  CHECK(cfg.experiment.tableau == "imex-rrk-4-3");
  CHECK(cfg.experiment.mode == SteppingMode::idt);
  CHECK(cfg.experiment.model.grid.nx == 64);
  CHECK(cfg.experiment.model.grid.ny == 128);
}

TEST_CASE("slope step sizes") {
  const auto base = parse_config_text("preset: ch-rrk64\n").experiment;
  CHECK(base.slope_step_sizes() == std::vector<double>{1e-3, 5e-4, 2.5e-4, 1.25e-4});
  CHECK(base.taus.front() == 8e-3);
  // Explicit step sizes drop the preset's slope steps.
  const auto own = parse_config_text("preset: ch-rrk64\ntime:\n  tau_list: [0.1, 0.05]\n").experiment;
  CHECK(own.slope_taus.empty());
  CHECK(own.slope_step_sizes() == std::vector<double>{0.1, 0.05});
  const auto both = parse_config_text(
      "preset: ch-rrk64\ntime:\n  tau_list: [0.1, 0.05]\n  slope_tau_list: [1/50, 1/100]\n");
  CHECK(both.experiment.slope_step_sizes() == std::vector<double>{0.02, 0.01});
  CHECK(code_of("preset: ch-rrk64\ntime:\n  slope_tau_list: [0.01, 0.02]\n") == ExitCode::invalid_value);
  CHECK(code_of("preset: ch-rrk64\ntime:\n  slope_tau_list: []\n") == ExitCode::invalid_value);
}

TEST_CASE("emitted config parses back to the same experiment") {
  for (const auto& name : {"ac-rrk32", "vac-merge", "ch-separation", "vac-rrk43"}) {
    CAPTURE(name);
    const auto a = config_from_preset(name);
    const auto text = emit_config(a);
    CHECK(text.find(version()) != std::string::npos);
    const auto b = parse_config_text(text);
    const auto& pa = a.experiment;
    const auto& pb = b.experiment;
    CHECK(pb.model.op == pa.model.op);
    CHECK(pb.model.epsilon == pa.model.epsilon);
    CHECK(pb.model.components == pa.model.components);
    CHECK(pb.model.grid == pa.model.grid);
    CHECK(pb.taus == pa.taus);
    CHECK(pb.slope_taus == pa.slope_taus);
    CHECK(pb.t_final == pa.t_final);
    CHECK(pb.tau_ref == pa.tau_ref);
    CHECK(pb.init.kind == pa.init.kind);
    CHECK(pb.init.seed == pa.init.seed);
    CHECK(pb.init.centers == pa.init.centers);
    CHECK(pb.snapshot_times == pa.snapshot_times);
    CHECK(pb.composite == pa.composite);
    const auto body = [](const std::string& t) { return t.substr(t.find("\nmodel:")); };
    CHECK(body(emit_config(b)) == body(text));
  }
}

TEST_CASE("number formatting round trips") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-3) == "0.001");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  for (double v : {std::numbers::pi, 1.0 / 3.0, 4.3957e-7, -2260.0 / 8211.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("atomic writes") {
  const auto dir = scratch_dir("atomic");
  const auto file = dir / "nested" / "a.txt";
  write_file_atomic(file, "first\n");
  write_file_atomic(file, "second\n");
  CHECK(read(file) == "second\n");
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
  fs::remove_all(dir);
}

TEST_CASE("csv and image writers") {
  PeriodicGrid g;
  g.nx = 4;
  g.ny = 2;
  Field f(g);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 4; ++i) f.at(i, j) = i + 10 * j;

  const auto csv = field_csv({f}, false);
  CHECK(csv.rfind("i,j,x,y,u_1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  const auto pgm = field_pgm(f);
  CHECK(pgm.rfind("P5\n", 0) == 0);
  CHECK(pgm.find("# min=0 max=13") != std::string::npos);
  CHECK(pgm.find("4 2\n255\n") != std::string::npos);
  // Top row of the image is the largest y: value 10 maps to byte 196.
  const auto body = pgm.substr(pgm.size() - 8);
  CHECK(static_cast<unsigned char>(body[0]) == static_cast<unsigned char>(std::lround(255.0 * 10 / 13)));
  CHECK(static_cast<unsigned char>(body[7]) == 0x3b);

  CHECK(snapshot_stem("ac-separation", 5.0) == "ac-separation_5.0000");
  CHECK(summary_text({{"a", "1"}, {"b", "x"}}) == "a=1\nb=x\n");

  StepRecord r;
  r.step = 1;
  r.mass = {0.5};
  r.gn_at_1 = 1e-9;
  const auto e = energy_csv({r});
  CHECK(e.rfind("step,t_hat,tau,gamma,energy_modified,energy_original,stage_dissipation,r,mass_1,gn_at_1\n", 0) == 0);

  ConvergenceStudy s;
  s.rows.resize(1);
  s.rows[0].tau = 0.01;
  CHECK(convergence_csv(s).rfind("tau,error_idt,order_idt,error_rt,order_rt,error_r_rt\n", 0) == 0);
}
