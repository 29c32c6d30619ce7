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

#pragma once

#include <array>
#include <variant>
#include <vector>

namespace pulsesim {

/// c0 + sum_k (a_k cos 2 pi k phi + b_k sin 2 pi k phi), 1-periodic in phi.
struct HarmonicFit {
  double c0 = 0.0;
  std::vector<double> cos_coeffs;  // a_1..a_K
  std::vector<double> sin_coeffs;  // b_1..b_K
  double rms_residual = 0.0;

  int order() const { return static_cast<int>(cos_coeffs.size()); }
  double evaluate(double phi) const;
};

/// offset + amplitude / sqrt(delta(phi)^2 + epsilon^2), with
/// delta(phi) = detuning_curve(phi) - detuning_reference.
/// kEven: 1 / sqrt(D^2 + eps^2).  kOdd: D / (D^2 + eps^2), for quantities
/// that change sign across the resonance.
enum class SurrogateForm { kEven, kOdd };

struct SurrogateFit {
  SurrogateForm form = SurrogateForm::kEven;
  double amplitude = 0.0;
  double epsilon = 0.1;
  double offset = 0.0;
  double detuning_reference = 0.0;
  HarmonicFit detuning_curve;
  double rms_residual = 0.0;

  double detuning(double phi) const;
  double evaluate(double phi) const;
  static double shape(SurrogateForm form, double delta, double epsilon);
};

using FluxCurve = std::variant<HarmonicFit, SurrogateFit>;

double evaluate(const FluxCurve& curve, double phi);
double rms_residual(const FluxCurve& curve);

/// Flux dependence of the four-level effective model parameters.
struct EffectiveCurves {
  std::array<HarmonicFit, 2> omega_tilde;  // indexed by qubit j
  FluxCurve exchange;                      // J(phi)
  FluxCurve zz;                            // zeta(phi)
};

/// Flux dependence of the Duffing mode frequencies and anharmonicities.
struct DuffingCurves {
  std::array<HarmonicFit, 2> omega;
  std::array<HarmonicFit, 2> alpha;
};

}  // namespace pulsesim
