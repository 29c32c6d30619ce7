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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "pulsesim/benchmarks.hpp"
#include "pulsesim/errors.hpp"

using namespace pulsesim;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit = 0.0;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double max_abs_gap(const std::vector<double>& coarse, const std::vector<double>& fine) {
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.size() && 2 * k < fine.size(); ++k) {
    worst = std::max(worst, std::abs(coarse[k] - fine[2 * k]));
  }
  return worst;
}

// Largest norm and unitarity defects over every propagation in the run.
struct Defects {
  double norm = 0.0;
  double unitarity = 0.0;
  int runs = 0;
  void add(double n, double u) {
    norm = std::max(norm, n);
    unitarity = std::max(unitarity, u);
    ++runs;
  }
  void add(const Trajectory& t) { add(t.max_norm_defect, t.max_unitarity_defect); }
  template <typename R>
  void add_models(const R& result) {
    for (const auto& m : result.models) {
      if (m.failure.empty()) add(m.max_norm_defect, m.max_unitarity_defect);
    }
  }
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename R>
const auto& model(const R& result, ModelKind kind) {
  for (const auto& m : result.models) {
    if (m.kind == kind) return m;
  }
  throw std::runtime_error("model missing from result");
}

std::string label(const BasisLabel& l) { return l.to_string(); }

Verdict transmon_oracle(const DeviceParams& device) {
  Verdict v;
  double worst_rel = 0.0;
  double worst_oracle = 0.0;
  std::string freqs;
  for (int j : {1, 0}) {
    const double ec = device.ec[j];
    const double ej = ej_of_flux(device, j, 0.0);
    const Spectrum s = eigh(transmon_charge_hamiltonian(ec, ej, device.n_g[j], 23).hamiltonian);
    const double exact = s.energies(1) - s.energies(0);
    const double asymptotic = std::sqrt(8.0 * ec * ej) - ec;
    worst_rel = std::max(worst_rel, std::abs(exact - asymptotic) / asymptotic);
    freqs += fmt("q%d %.4f GHz (asymptotic %.4f) ", j, exact, asymptotic);
    for (int n_q : {9, 23}) {
      const RealVector mine =
          eigh(transmon_charge_hamiltonian(ec, ej, device.n_g[j], n_q).hamiltonian).energies;
      const oracle::RVec ref = oracle::jacobi_eigenvalues(oracle::transmon_matrix(ec, ej, device.n_g[j], n_q));
      worst_oracle = std::max(worst_oracle, (mine - ref).cwiseAbs().maxCoeff());
    }
  }
  v.pass = worst_rel <= 0.02 && worst_oracle <= 1e-10;
  v.detail = freqs + fmt("max rel dev %.3g, oracle dev %.2g", worst_rel, worst_oracle);
  return v;
}

Verdict decoupled_limit(double production_hold, Defects& defects) {
  RunConfig c;
  c.device.g = {0.0, 0.0};
  Session s(c);
  const StaticSweepResult sweep = run_static_sweep(s);
  const CzResult cz = run_cz_benchmark(s, CzOptions{production_hold});
  const RxResult rx = run_rx_benchmark(s);
  defects.add_models(cz);
  defects.add_models(rx);
  double cz_leak = 0.0;
  bool failed = sweep.flagged_points > 0;
  for (const auto& m : cz.models) {
    failed |= !m.failure.empty();
    cz_leak = std::max(cz_leak, max_of(m.leakage));
  }
  double mismatch = 0.0;
  double rx_multilevel_leak = 0.0;
  for (const auto& m : rx.models) {
    failed |= !m.failure.empty();
    mismatch = std::max(mismatch, max_of(m.transfer.mismatch));
    if (m.kind != ModelKind::kEffective) {
      rx_multilevel_leak = std::max({rx_multilevel_leak, max_of(m.leakage_spectator0),
                                     max_of(m.leakage_spectator1)});
    }
  }
  const auto& eff = model(rx, ModelKind::kEffective);
  const double eff_leak = std::max(max_of(eff.leakage_spectator0), max_of(eff.leakage_spectator1));
  Verdict v;
  v.pass = !failed && sweep.max_abs_j <= 1e-8 && sweep.max_abs_zeta <= 1e-8 && cz_leak <= 1e-10 &&
           eff_leak <= 1e-10 && mismatch <= 1e-9;
  v.detail = fmt("|J| %.2g, |zeta| %.2g GHz; CZ leakage %.2g; effective R_X leakage %.2g; "
                 "mismatch %.2g (driven-transmon R_X leakage %.2g reported only)",
                 sweep.max_abs_j, sweep.max_abs_zeta, cz_leak, eff_leak, mismatch, rx_multilevel_leak);
  return v;
}

Verdict effective_cz(Session& s, Defects& defects) {
  const double target = s.config().cz.target_flux;
  const double zeta = evaluate(s.calibration().effective.zz, target);
  const double hold = cz_duration(zeta);
  const ModelFamily f = s.family(ModelKind::kEffective);
  const PulseSchedule sched = make_flux_pulse(target, target, 0.0, hold, s.config().dt);
  const auto plus = std::array<Complex, 4>{0.5, 0.5, 0.5, 0.5};
  const Trajectory t = propagate(f, sched, computational_state(computational_frame(f, target), plus));
  defects.add(t);
  const std::vector<double> phi = conditional_phase(t).phi_cz;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    num += phi[k] * t.times[k];
    den += t.times[k] * t.times[k];
  }
  const double slope = num / den;
  const double ideal = 2.0 * kPi * std::abs(zeta);
  double line_dev = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    line_dev = std::max(line_dev, std::abs(std::abs(phi[k]) - ideal * t.times[k]));
  }
  std::size_t k = 0;
  while (k + 1 < t.times.size() && t.times[k + 1] < hold) ++k;
  const double w = (hold - t.times[k]) / (t.times[k + 1] - t.times[k]);
  const double at_hold = std::abs((1.0 - w) * phi[k] + w * phi[k + 1]);
  Verdict v;
  const double slope_err = std::abs(std::abs(slope) - ideal) / ideal;
  const double end_err = std::abs(at_hold - kPi) / kPi;
  v.pass = slope_err <= 1e-3 && line_dev <= 1e-3 * kPi && end_err <= 1e-3;
  v.detail = fmt("zeta* %.5g GHz, slope rel err %.2g, max line dev %.2g rad, "
                 "|phi_CZ(1/2|zeta|)| = %.8f", zeta, slope_err, line_dev, at_hold);
  return v;
}

Verdict effective_rx(Session& s, Defects& defects) {
  const RxConfig& rx = s.config().rx;
  const ModelFamily f = s.family(ModelKind::kEffective);
  const ComputationalFrame frame = computational_frame(f, rx.idle_flux);
  const double carrier = frame.energies[1] - frame.energies[0];
  const PulseSchedule sched =
      make_drive_pulse(rx.amp, rx.ramp, rx.flat(), carrier, rx.theta, s.config().dt, 0, rx.idle_flux);
  PropagationOptions o;
  o.frame = DriveFrame::kEnvelope;
  const Trajectory t =
      propagate(f, sched, computational_state(frame, basis_coefficients(0, 0)), o);
  defects.add(t);
  const double transfer = std::norm(t.amplitudes.back()[1]);
  const double leak = max_of(leakage_series(t));
  Verdict v;
  v.pass = transfer >= 0.999 && leak == 0.0;
  v.detail = fmt("carrier %.6f GHz, area %.9f, transfer %.8f, leakage %g", carrier,
                 pulse_area(sched), transfer, leak);
  return v;
}

Verdict step_halving(Session& s, const RxResult& rx, const CzResult& cz, Defects& defects) {
  RunConfig half_cfg = s.config();
  half_cfg.dt = 0.5 * s.config().dt;
  Session half(half_cfg);
  half.set_calibration(s.calibration());
  const RxResult rx2 = run_rx_benchmark(half);
  const CzResult cz2 = run_cz_benchmark(half);
  defects.add_models(rx2);
  defects.add_models(cz2);
  double rx_gap = 0.0;
  double cz_gap = 0.0;
  std::string worst;
  bool failed = false;
  auto note = [&](double gap, double& slot, const std::string& what) {
    if (gap > slot) slot = gap;
    if (gap > 1e-4) worst += " " + what;
  };
  for (ModelKind k : kAllModels) {
    const auto& a = model(rx, k);
    const auto& b = model(rx2, k);
    failed |= !a.failure.empty() || !b.failure.empty();
    const std::string m(to_string(k));
    note(max_abs_gap(a.transfer.transfer_spectator0, b.transfer.transfer_spectator0), rx_gap, m + ":P00->01");
    note(max_abs_gap(a.transfer.transfer_spectator1, b.transfer.transfer_spectator1), rx_gap, m + ":P10->11");
    note(max_abs_gap(a.transfer.mismatch, b.transfer.mismatch), rx_gap, m + ":mismatch");
    note(max_abs_gap(a.leakage_spectator0, b.leakage_spectator0), rx_gap, m + ":leak0");
    note(max_abs_gap(a.leakage_spectator1, b.leakage_spectator1), rx_gap, m + ":leak1");
    const auto& c = model(cz, k);
    const auto& d = model(cz2, k);
    failed |= !c.failure.empty() || !d.failure.empty();
    note(max_abs_gap(c.phi_cz, d.phi_cz), cz_gap, m + ":phi_cz");
    note(max_abs_gap(c.phi_cz_target_frame, d.phi_cz_target_frame), cz_gap, m + ":phi_cz_target");
    note(max_abs_gap(c.leakage, d.leakage), cz_gap, m + ":leakage");
  }
  Verdict v;
  v.pass = !failed && rx_gap <= 1e-4 && cz_gap <= 1e-4;
  v.detail = fmt("max change R_X %.2g, CZ %.2g", rx_gap, cz_gap) +
             (worst.empty() ? "" : "; above bound:" + worst);
  return v;
}

Verdict continuity(const LeakageResult& leak) {
  Verdict v;
  v.pass = true;
  for (const auto& m : leak.models) {
    v.pass &= m.failure.empty() && m.continuity.ok();
    v.detail += fmt("%s error %.2g (tol %.2g) ", std::string(to_string(m.kind)).c_str(),
                    m.continuity.max_error, m.continuity.tolerance);
  }
  return v;
}

Verdict truncation_plateau(const TruncationResult& r) {
  std::map<std::string, std::vector<ConvergenceRow>> axes;
  for (const auto& row : r.rows) {
    if (row.axis != "reference") axes[row.axis].push_back(row);
  }
  const std::map<std::string, int> production{{"n_q", 23}, {"n_eq", 9}, {"n_ec", 6}};
  Verdict v;
  v.pass = !axes.empty();
  for (auto& [axis, rows] : axes) {
    std::sort(rows.begin(), rows.end(),
              [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.value < b.value; });
    double worst_rise = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      v.pass &= rows[i].failures == 0;
      if (i > 0) worst_rise = std::max(worst_rise, rows[i].rmse - rows[i - 1].rmse);
    }
    v.pass &= worst_rise <= 1e-9;
    v.detail += fmt("%s rise %.1e", axis.c_str(), worst_rise);
    if (auto p = production.find(axis); p != production.end()) {
      const auto row = std::find_if(rows.begin(), rows.end(),
                                    [&](const ConvergenceRow& x) { return x.value == p->second; });
      const bool present = row != rows.end();
      v.pass &= present && row->rmse < 1e-3;
      v.detail += present ? fmt(" rmse(%d) %.2g", p->second, row->rmse) : " production missing";
    }
    v.detail += "; ";
  }
  return v;
}

Verdict model_ordering(const StaticSweepResult& r, double target) {
  Verdict v;
  const double offset = std::abs(r.zeta_extremum_phi - target);
  v.pass = r.mean_rmse_duffing < r.mean_rmse_effective && r.zeta_extremum_value < 0.0 &&
           offset <= 0.01 + 1e-9;
  v.detail = fmt("RMSE duffing %.3g < effective %.3g GHz; zeta extremum %.4g GHz at %.4f "
                 "(|d| = %.4f)", r.mean_rmse_duffing, r.mean_rmse_effective,
                 r.zeta_extremum_value, r.zeta_extremum_phi, offset);
  return v;
}

Verdict leakage_structure(const LeakageResult& leak) {
  const auto& circuit = model(leak, ModelKind::kCircuit);
  const auto& duffing = model(leak, ModelKind::kDuffing);
  const BasisLabel partner{0, 1, 1};
  const BasisLabel second_excited{2, 0, 0};
  const std::set<BasisLabel> c(circuit.record.tracked.begin(), circuit.record.tracked.end());
  const std::set<BasisLabel> d(duffing.record.tracked.begin(), duffing.record.tracked.end());
  const bool superset = std::includes(c.begin(), c.end(), d.begin(), d.end());
  const bool tracks_200 = d.count(second_excited) > 0;
  double peak_200 = 0.0;
  for (std::size_t i = 0; i < duffing.record.tracked.size(); ++i) {
    if (duffing.record.tracked[i] == second_excited) peak_200 = max_of(duffing.record.populations[i]);
  }
  Verdict v;
  const bool early = circuit.failure.empty() && duffing.failure.empty() &&
                     circuit.early_partner == partner && duffing.early_partner == partner;
  v.pass = early && tracks_200 && superset;
  v.detail = fmt("early partner circuit %s, duffing %s; duffing tracks |2,0,0> %s; "
                 "circuit set ⊇ duffing set %s (%zu vs %zu states)",
                 label(circuit.early_partner).c_str(), label(duffing.early_partner).c_str(),
                 tracks_200 ? "yes" : "no", superset ? "yes" : "no", c.size(), d.size());
  if (tracks_200) v.detail += fmt("; duffing |2,0,0> peak %.5f", peak_200);
  return v;
}

Verdict runtime_ordering(const RuntimeResult& r) {
  std::map<ModelKind, std::map<int, double>> total;
  for (const auto& row : r.rows) total[row.kind][row.truncation] = row.build_seconds + row.propagation_seconds;
  Verdict v;
  v.pass = total.count(ModelKind::kCircuit) && total.count(ModelKind::kDuffing);
  int compared = 0;
  for (const auto& [level, t] : total[ModelKind::kCircuit]) {
    const auto d = total[ModelKind::kDuffing].find(level);
    if (d == total[ModelKind::kDuffing].end()) continue;
    ++compared;
    v.pass &= t >= d->second;
    v.detail += fmt("N=%d circuit %.3gs duffing %.3gs; ", level, t, d->second);
  }
  v.pass &= compared > 0;
  for (ModelKind k : {ModelKind::kCircuit, ModelKind::kDuffing}) {
    double prev = 0.0;
    for (const auto& [level, t] : total[k]) {
      if (t < 0.9 * prev) {
        v.pass = false;
        v.detail += fmt("%s drops at N=%d; ", std::string(to_string(k)).c_str(), level);
      }
      prev = t;
    }
  }
  return v;
}

Verdict calibration_round_trip(Session& s) {
  double worst = 0.0;
  int checked = 0;
  for (const auto& p : s.sweep()) {
    if (!p.extraction) continue;
    const StaticExtraction& e = *p.extraction;
    const StaticExtraction back =
        analyze_static(densify(assemble_effective(e.omega_tilde, e.j_coupling, e.zeta, e.phi))).extraction;
    worst = std::max({worst, std::abs(back.omega_tilde[0] - e.omega_tilde[0]),
                      std::abs(back.omega_tilde[1] - e.omega_tilde[1]),
                      std::abs(back.j_coupling - e.j_coupling), std::abs(back.zeta - e.zeta)});
    ++checked;
  }
  const std::string text = serialize_artifact(s.calibration());
  const bool reparse = serialize_artifact(deserialize_artifact(text)) == text;
  const auto dir = std::filesystem::temp_directory_path() / "pulsesim_acceptance";
  std::filesystem::create_directories(dir);
  save_artifact(s.calibration(), dir / "a.json");
  save_artifact(load_artifact(dir / "a.json", s.config().device), dir / "b.json");
  auto bytes = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
  };
  const bool stable = bytes(dir / "a.json") == bytes(dir / "b.json");
  Session fresh(s.config());
  const bool deterministic = serialize_artifact(fresh.calibration()) == text;
  Verdict v;
  v.pass = checked > 0 && worst <= 1e-10 && reparse && stable && deterministic;
  v.detail = fmt("%d extractions, max re-extraction error %.2g GHz; reparse %s, save/load %s, "
                 "recalibration %s", checked, worst, reparse ? "identical" : "differs",
                 stable ? "byte-stable" : "differs", deterministic ? "identical" : "differs");
  return v;
}

}  // namespace

int main() {
  const char* names[13] = {"",
                           "unitarity suite",
                           "transmon spectrum oracle",
                           "decoupled limit",
                           "effective CZ analytic",
                           "effective R_X analytic",
                           "propagator step halving",
                           "continuity equation",
                           "truncation plateau",
                           "model ordering",
                           "leakage structure",
                           "runtime ordering",
                           "calibration round trip"};
  const double limits[13] = {0, 60, 10, 120, 60, 30, 300, 120, 600, 300, 180, 600, 60};
  std::map<int, Verdict> verdicts;
  Defects defects;

  auto run = [&](int id, const std::function<Verdict()>& body) {
    Timer timer;
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    v.seconds = timer.seconds();
    v.limit = limits[id];
    verdicts[id] = v;
    std::fprintf(stderr, "# criterion %d done in %.1f s\n", id, v.seconds);
  };

  Session session{RunConfig{}};
  Timer setup;
  session.calibration();
  std::printf("# shared production calibration: %.1f s\n", setup.seconds());

  run(2, [&] { return transmon_oracle(session.config().device); });
  run(12, [&] { return calibration_round_trip(session); });
  run(4, [&] { return effective_cz(session, defects); });
  run(5, [&] { return effective_rx(session, defects); });
  run(9, [&] { return model_ordering(run_static_sweep(session), session.config().cz.target_flux); });
  RxResult rx;
  CzResult cz;
  run(6, [&] {
    rx = run_rx_benchmark(session);
    cz = run_cz_benchmark(session);
    defects.add_models(rx);
    defects.add_models(cz);
    return step_halving(session, rx, cz, defects);
  });
  run(3, [&] { return decoupled_limit(cz.hold, defects); });
  LeakageResult leak;
  Timer leak_timer;
  try {
    leak = run_leakage_analysis(session);
    defects.add_models(leak);
  } catch (const std::exception& e) {
    std::printf("# leakage analysis failed: %s\n", e.what());
  }
  const double leak_seconds = leak_timer.seconds();
  run(7, [&] { return continuity(leak); });
  run(10, [&] { return leakage_structure(leak); });
  verdicts[7].seconds += leak_seconds;
  verdicts[10].seconds += leak_seconds;
  run(8, [&] { return truncation_plateau(run_truncation_study(session)); });
  run(11, [&] { return runtime_ordering(run_runtime_benchmark(session)); });
  run(1, [&] {
    Verdict v;
    v.pass = defects.runs > 0 && defects.norm <= 1e-9 && defects.unitarity <= 1e-9;
    v.detail = fmt("%d propagations: max norm defect %.2g, max unitarity defect %.2g",
                   defects.runs, defects.norm, defects.unitarity);
    return v;
  });

  int passed = 0;
  for (int id = 1; id <= 12; ++id) {
    Verdict& v = verdicts[id];
    const bool in_time = v.seconds < v.limit;
    const bool ok = v.pass && in_time;
    passed += ok;
    std::printf("%s %2d %-26s %s [%.1f s of %.0f s%s]\n", ok ? "PASS" : "FAIL", id, names[id],
                v.detail.c_str(), v.seconds, v.limit, in_time ? "" : ", over budget");
  }
  std::printf("# %d/12 criteria passed\n", passed);
  return passed == 12 ? 0 : 1;
}
