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

#include <functional>
#include <span>
#include <vector>

namespace pulsesim {

using Objective = std::function<double(std::span<const double>)>;

struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

/// Derivative-free simplex search restricted to a box. Trial points are
/// clamped into the box before evaluation and the distance to the box is
/// penalised, so the returned point always lies inside it. The start point
/// is never worse than the result.
MinimizeResult minimize_in_box(const Objective& f, std::vector<double> start,
                               std::vector<double> step, const BoxBounds& box,
                               int max_iterations = 400, double size_tolerance = 1e-7);

}  // namespace pulsesim
