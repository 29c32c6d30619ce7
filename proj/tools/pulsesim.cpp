// Copyright 2026 The pulsesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pulsesim: benchmark driver for the three two-transmon models.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pulsesim/benchmarks.hpp"
#include "pulsesim/errors.hpp"

namespace fs = std::filesystem;
using namespace pulsesim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCalibration = 3;
constexpr int kExitNumerical = 4;

struct Options {
  std::string config;
  std::string out;
  std::optional<double> flux_min;
  std::optional<double> flux_max;
  std::optional<int> flux_points;
  std::optional<double> dt;
  std::optional<std::string> frame;
};

RunConfig resolve_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.out.empty()) c.output.directory = o.out;
  if (o.flux_min) c.sweep.flux_min = *o.flux_min;
  if (o.flux_max) c.sweep.flux_max = *o.flux_max;
  if (o.flux_points) c.sweep.flux_points = *o.flux_points;
  if (o.dt) c.dt = *o.dt;
  if (o.frame) {
    try {
      c.rx.frame = parse_drive_frame(*o.frame);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  c.validate();
  return c;
}

fs::path artifact_path(const RunConfig& c) { return c.output.directory / "calibration.json"; }

bool artifact_matches(const CalibrationArtifact& a, const RunConfig& c) {
  const auto& t = a.truncation;
  const auto& u = c.truncation;
  return t.n_q == u.n_q && t.n_eq == u.n_eq && t.n_ec == u.n_ec && t.n_duff == u.n_duff &&
         t.n_duff_coupler == u.n_duff_coupler && a.flux_grid == c.flux_grid() &&
         a.harmonic_order == c.sweep.harmonic_order;
}

// Reuses a stored calibration when it was made for the same device and grid.
void ensure_calibration(Session& s) {
  const fs::path path = artifact_path(s.config());
  if (fs::exists(path)) {
    CalibrationArtifact a = load_artifact(path, s.config().device);
    if (artifact_matches(a, s.config())) {
      s.set_calibration(std::move(a));
      return;
    }
    std::cerr << "stored calibration does not match the config; recalibrating\n";
  }
  save_artifact(s.calibration(), path);
}

void write_all(const std::vector<Table>& tables, Session& s) {
  for (const auto& t : tables) write_table(t, s.config().output.directory, s.config_hash());
}

void cmd_calibrate(Session& s) {
  const CalibrateResult r = run_calibrate(s);
  fs::create_directories(s.config().output.directory);
  save_artifact(r.artifact, artifact_path(s.config()));
  write_all(r.tables, s);
  std::cout << "calibration written to " << artifact_path(s.config()).string() << " ("
            << r.artifact.flags.size() << " flags)\n";
}

void cmd_static(Session& s) {
  ensure_calibration(s);
  const StaticSweepResult r = run_static_sweep(s);
  write_all({r.table}, s);
  std::cout << "static sweep: mean rmse effective " << r.mean_rmse_effective << " GHz, duffing "
            << r.mean_rmse_duffing << " GHz; circuit zeta extremum " << r.zeta_extremum_value
            << " GHz at phi " << r.zeta_extremum_phi << "\n";
}

void cmd_truncation(Session& s) {
  const TruncationResult r = run_truncation_study(s);
  write_all(r.tables, s);
  for (const auto& row : r.rows) {
    std::cout << "truncation " << row.axis << "=" << row.value << ": rmse " << row.rmse
              << " dJ " << row.dj << " dzeta " << row.dzeta << "\n";
  }
}

void report_failures(const std::vector<std::string>& failures) {
  for (const auto& f : failures) std::cerr << f << "\n";
}

int cmd_rx(Session& s) {
  ensure_calibration(s);
  const RxResult r = run_rx_benchmark(s);
  write_all(r.tables, s);
  std::vector<std::string> failures;
  for (const auto& m : r.models) {
    if (!m.failure.empty()) {
      failures.push_back(std::string(to_string(m.kind)) + ": " + m.failure);
      continue;
    }
    std::cout << "rx " << to_string(m.kind) << ": transfer " << m.transfer.transfer_spectator0.back()
              << " / " << m.transfer.transfer_spectator1.back() << "\n";
  }
  report_failures(failures);
  return failures.empty() ? 0 : kExitNumerical;
}

int cmd_cz(Session& s) {
  ensure_calibration(s);
  const CzResult r = run_cz_benchmark(s);
  write_all(r.tables, s);
  std::vector<std::string> failures;
  std::cout << "cz: zeta " << r.zeta_target << " GHz, hold " << r.hold << " ns\n";
  for (const auto& m : r.models) {
    if (!m.failure.empty()) {
      failures.push_back(std::string(to_string(m.kind)) + ": " + m.failure);
      continue;
    }
    std::cout << "cz " << to_string(m.kind) << ": phi_cz final " << m.phi_cz_final << " rad\n";
  }
  report_failures(failures);
  return failures.empty() ? 0 : kExitNumerical;
}

int cmd_leakage(Session& s) {
  ensure_calibration(s);
  const LeakageResult r = run_leakage_analysis(s);
  write_all(r.tables, s);
  std::vector<std::string> failures;
  for (const auto& m : r.models) {
    if (!m.failure.empty()) {
      failures.push_back(std::string(to_string(m.kind)) + ": " + m.failure);
      continue;
    }
    std::cout << "leakage " << to_string(m.kind) << ": " << m.record.tracked.size()
              << " tracked states, early partner " << m.early_partner.to_string() << "\n";
  }
  report_failures(failures);
  return failures.empty() ? 0 : kExitNumerical;
}

void cmd_runtime(Session& s) {
  ensure_calibration(s);
  const RuntimeResult r = run_runtime_benchmark(s);
  write_all({r.table}, s);
  for (const auto& row : r.rows) {
    std::cout << "runtime " << to_string(row.kind) << " " << row.truncation << ": build "
              << row.build_seconds << " s, propagation " << row.propagation_seconds << " s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-level benchmarks for a two-transmon device with a fixed bus"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--flux-min", o.flux_min, "lower end of the flux grid");
  app.add_option("--flux-max", o.flux_max, "upper end of the flux grid");
  app.add_option("--flux-points", o.flux_points, "number of flux grid points");
  app.add_option("--dt", o.dt, "time step [ns]");
  app.add_option("--drive-frame", o.frame, "drive frame for the R_X benchmark")
      ->check(CLI::IsMember({"lab", "envelope"}));

  const std::vector<std::pair<std::string, std::string>> commands{
      {"calibrate", "circuit sweep and reduced-model calibration"},
      {"static-sweep", "static spectra, J and zeta across flux"},
      {"truncation", "truncation convergence study"},
      {"rx", "driven single-qubit benchmark"},
      {"cz", "flux-pulse conditional phase benchmark"},
      {"leakage", "leakage populations and currents from |1,0,1>"},
      {"runtime", "build and propagation timing"},
      {"all", "every benchmark in sequence"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Session session(resolve_config(o));
    fs::create_directories(session.config().output.directory);
    int status = 0;
    auto run = [&](const std::string& name) {
      if (name == "calibrate") cmd_calibrate(session);
      if (name == "static-sweep") cmd_static(session);
      if (name == "truncation") cmd_truncation(session);
      if (name == "rx") status = std::max(status, cmd_rx(session));
      if (name == "cz") status = std::max(status, cmd_cz(session));
      if (name == "leakage") status = std::max(status, cmd_leakage(session));
      if (name == "runtime") cmd_runtime(session);
    };
    if (command == "all") {
      for (const auto& [name, help] : commands) {
        if (name != "all") run(name);
      }
    } else {
      run(command);
    }
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n";
    return kExitCalibration;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
