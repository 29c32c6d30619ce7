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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "pulsesim/benchmarks.hpp"

namespace pulsesim {
namespace {

constexpr double kPi = std::numbers::pi;

// Production device and truncation with one shared calibration.
class Production : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    session_ = std::make_unique<Session>(RunConfig{});
    session_->calibration();
  }
  static void TearDownTestSuite() { session_.reset(); }

  static Session& session() { return *session_; }

  static const RxResult& rx() {
    static const RxResult r = run_rx_benchmark(session());
    return r;
  }
  static const CzResult& cz() {
    static const CzResult r = run_cz_benchmark(session());
    return r;
  }

  static const RxModelResult& rx_model(ModelKind k) {
    for (const auto& m : rx().models) {
      if (m.kind == k) return m;
    }
    throw std::runtime_error("missing model");
  }
  static const CzModelResult& cz_model(ModelKind k) {
    for (const auto& m : cz().models) {
      if (m.kind == k) return m;
    }
    throw std::runtime_error("missing model");
  }

  static inline std::unique_ptr<Session> session_;
};

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

TEST_F(Production, ZetaFitPeakTracksSweepPeak) {
  double data_phi = 0.0;
  double data_min = 0.0;
  double data_abs = 0.0;
  for (const auto& p : session().sweep()) {
    ASSERT_TRUE(p.extraction) << p.failure;
    if (p.extraction->zeta < data_min) data_min = p.extraction->zeta, data_phi = p.phi;
    data_abs = std::max(data_abs, std::abs(p.extraction->zeta));
  }
  const FluxCurve& zz = session().calibration().effective.zz;
  double fit_phi = 0.0;
  double fit_min = 0.0;
  for (double phi = 0.0; phi <= 0.45; phi += 1e-4) {
    const double z = evaluate(zz, phi);
    if (z < fit_min) fit_min = z, fit_phi = phi;
  }
  EXPECT_LE(std::abs(fit_phi - data_phi), 0.01);
  EXPECT_LT(data_min, 0.0);
  EXPECT_LT(rms_residual(zz), 0.1 * data_abs);
}

TEST_F(Production, DuffingRefinementReducesZetaError) {
  const auto& details = session().duffing_details();
  ASSERT_TRUE(details);
  const RunConfig& c = session().config();
  const int levels = c.truncation.n_duff;
  const int bus = c.truncation.duffing_coupler_levels();
  double before = 0.0;
  double after = 0.0;
  for (std::size_t i = 0; i < details->refined.size(); ++i) {
    const auto& s1 = details->stage1[i];
    const auto& r = details->refined[i];
    ASSERT_EQ(s1.phi, r.phi);
    EXPECT_LE(r.objective, s1.objective + 1e-15);
    const auto ref = std::find_if(session().sweep().begin(), session().sweep().end(),
                                  [&](const SweepPoint& p) { return p.phi == r.phi; });
    ASSERT_NE(ref, session().sweep().end());
    auto zeta = [&](const DuffingPointEstimate& e) {
      return analyze_static(densify(assemble_duffing(c.device, e.omega, e.alpha, levels, bus, e.phi)))
          .extraction.zeta;
    };
    before += std::abs(zeta(s1) - ref->extraction->zeta);
    after += std::abs(zeta(r) - ref->extraction->zeta);
  }
  EXPECT_LT(after, before);
}

TEST_F(Production, StaticSpectraOrderModels) {
  const StaticSweepResult r = run_static_sweep(session());
  EXPECT_LT(r.mean_rmse_duffing, r.mean_rmse_effective);
  EXPECT_EQ(r.flagged_points, 0);
}

TEST_F(Production, RxCircuitCrosstalkExceedsEffective) {
  const auto& circuit = rx_model(ModelKind::kCircuit);
  const auto& effective = rx_model(ModelKind::kEffective);
  ASSERT_TRUE(circuit.failure.empty() && effective.failure.empty());
  EXPECT_GT(max_of(circuit.transfer.mismatch), max_of(effective.transfer.mismatch));
  EXPECT_GT(effective.transfer.transfer_spectator0.back(), 0.999);
  EXPECT_LT(max_of(effective.transfer.mismatch), 1e-3);
  for (const auto& m : rx().models) EXPECT_LE(m.max_norm_defect, 1e-9) << to_string(m.kind);
}

TEST_F(Production, RxCircuitLeakageLargerWithExcitedSpectator) {
  const auto& circuit = rx_model(ModelKind::kCircuit);
  ASSERT_TRUE(circuit.failure.empty());
  EXPECT_GE(max_of(circuit.leakage_spectator1), max_of(circuit.leakage_spectator0));
}

TEST_F(Production, CzConditionalPhase) {
  const auto& effective = cz_model(ModelKind::kEffective);
  const auto& circuit = cz_model(ModelKind::kCircuit);
  EXPECT_NEAR(std::abs(effective.phi_cz_final), kPi, 0.02 * kPi);
  EXPECT_NEAR(std::abs(circuit.phi_cz_final), kPi, 0.15 * kPi);
  for (const auto& m : cz().models) {
    ASSERT_TRUE(m.failure.empty()) << m.failure;
    EXPECT_LE(m.linear_deviation, 0.05 * kPi) << to_string(m.kind);
    EXPECT_LE(m.max_norm_defect, 1e-9);
  }
  EXPECT_EQ(max_of(effective.leakage), 0.0);
}

TEST_F(Production, DuffingLeakageFromDoubleExcitation) {
  const LeakageResult r = run_leakage_analysis(session());
  for (const auto& m : r.models) {
    ASSERT_TRUE(m.failure.empty()) << m.failure;
    if (m.kind != ModelKind::kDuffing) continue;
    EXPECT_GT(m.max_leakage, 0.01);
    EXPECT_EQ(m.early_partner, (BasisLabel{0, 1, 1}));
    EXPECT_GT(m.early_transfer, 0.0);
  }
}

}  // namespace
}  // namespace pulsesim
