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

#include "pulsesim/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "pulsesim/errors.hpp"

namespace pulsesim {

namespace {

struct Problem {
  const Objective* f;
  const BoxBounds* box;
  std::vector<double> scratch;
  std::vector<double> best_x;
  double best_value;
};

double clamp_and_eval(const gsl_vector* v, void* params) {
  auto* p = static_cast<Problem*>(params);
  double outside = 0.0;
  for (std::size_t i = 0; i < p->scratch.size(); ++i) {
    const double raw = gsl_vector_get(v, i);
    const double clamped = std::clamp(raw, p->box->lower[i], p->box->upper[i]);
    outside += (raw - clamped) * (raw - clamped);
    p->scratch[i] = clamped;
  }
  const double value = (*p->f)(p->scratch);
  if (std::isfinite(value) && value < p->best_value) {
    p->best_value = value;
    p->best_x = p->scratch;
  }
  if (!std::isfinite(value)) return 1e300;
  return value + 1e6 * outside;
}

}  // namespace

MinimizeResult minimize_in_box(const Objective& f, std::vector<double> start,
                               std::vector<double> step, const BoxBounds& box,
                               int max_iterations, double size_tolerance) {
  const std::size_t n = start.size();
  if (n == 0 || step.size() != n || box.lower.size() != n || box.upper.size() != n) {
    throw InvalidArgument("minimize_in_box: inconsistent dimensions");
  }
  for (std::size_t i = 0; i < n; ++i) start[i] = std::clamp(start[i], box.lower[i], box.upper[i]);

  Problem problem{&f, &box, std::vector<double>(n), start, f(start)};
  if (!std::isfinite(problem.best_value)) problem.best_value = HUGE_VAL;

  gsl_set_error_handler_off();
  gsl_multimin_function fn{&clamp_and_eval, n, &problem};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), gsl_vector_free);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, start[i]);
    gsl_vector_set(ss.get(), i, step[i]);
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n),
      gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), ss.get());

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, size_tolerance) == GSL_SUCCESS) break;
  }
  return {problem.best_x, problem.best_value, iter};
}

}  // namespace pulsesim
