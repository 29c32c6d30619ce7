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

#include "pulsesim/curves.hpp"

#include <cmath>
#include <numbers>

namespace pulsesim {

double HarmonicFit::evaluate(double phi) const {
  double value = c0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * phi;
    value += cos_coeffs[k] * std::cos(arg) + sin_coeffs[k] * std::sin(arg);
  }
  return value;
}

double SurrogateFit::detuning(double phi) const {
  return detuning_curve.evaluate(phi) - detuning_reference;
}

double SurrogateFit::evaluate(double phi) const {
  return offset + amplitude * shape(form, detuning(phi), epsilon);
}

double SurrogateFit::shape(SurrogateForm form, double delta, double epsilon) {
  if (form == SurrogateForm::kOdd) return delta / (delta * delta + epsilon * epsilon);
  return 1.0 / std::sqrt(delta * delta + epsilon * epsilon);
}

double evaluate(const FluxCurve& curve, double phi) {
  return std::visit([phi](const auto& fit) { return fit.evaluate(phi); }, curve);
}

double rms_residual(const FluxCurve& curve) {
  return std::visit([](const auto& fit) { return fit.rms_residual; }, curve);
}

}  // namespace pulsesim
