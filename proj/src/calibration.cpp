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

#include "pulsesim/calibration.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pulsesim/errors.hpp"
#include "pulsesim/optimize.hpp"

namespace pulsesim {

namespace {

std::array<Index, 4> computational_indices(const Dims& dims) {
  std::array<Index, 4> idx{};
  for (std::size_t r = 0; r < 4; ++r) idx[r] = label_index(dims, kComputationalLabels[r]);
  return idx;
}

double sample_rms(const Eigen::VectorXd& residual) {
  return residual.size() == 0 ? 0.0 : std::sqrt(residual.squaredNorm() / residual.size());
}

}  // namespace

AssignmentMap assign_dressed_states(const Spectrum& spectrum, const Dims& dims, double phi) {
  const auto rows = computational_indices(dims);
  const Index n = spectrum.energies.size();
  if (spectrum.vectors.rows() != total_dim(dims) || n < 4) {
    throw InvalidArgument("spectrum does not match the model dimensions");
  }
  Eigen::Matrix<double, 4, Eigen::Dynamic> overlap(4, n);
  for (std::size_t r = 0; r < 4; ++r) {
    overlap.row(static_cast<Index>(r)) = spectrum.vectors.row(rows[r]).cwiseAbs2();
  }

  // The optimum only ever uses one of each label's four best candidates:
  // with four labels, at least one of them is always free to swap in.
  std::array<std::array<Index, 4>, 4> candidates{};
  for (Index r = 0; r < 4; ++r) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + 4, order.end(),
                      [&](Index a, Index b) { return overlap(r, a) > overlap(r, b); });
    for (int k = 0; k < 4; ++k) candidates[r][k] = order[k];
  }

  double best_total = -1.0;
  std::array<Index, 4> best{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) {
          const std::array<Index, 4> pick{candidates[0][a], candidates[1][b], candidates[2][c],
                                          candidates[3][d]};
          bool distinct = true;
          for (int i = 0; i < 4 && distinct; ++i) {
            for (int j = i + 1; j < 4; ++j) distinct = distinct && pick[i] != pick[j];
          }
          if (!distinct) continue;
          double total = 0.0;
          for (int i = 0; i < 4; ++i) total += overlap(i, pick[i]);
          if (total > best_total + 1e-14) {
            best_total = total;
            best = pick;
          }
        }
      }
    }
  }

  AssignmentMap map;
  map.eigen_index = best;
  for (std::size_t r = 0; r < 4; ++r) {
    map.overlap[r] = std::sqrt(overlap(static_cast<Index>(r), best[r]));
    if (map.overlap[r] < 0.5) {
      std::ostringstream msg;
      msg << "assignment ambiguous at flux " << phi << " (label "
          << kComputationalLabels[r].to_string() << ", overlap " << map.overlap[r] << ")";
      throw CalibrationError(msg.str());
    }
    if (map.overlap[r] < 0.7) map.low_overlap = true;
  }
  return map;
}

ProjectedHamiltonian project_computational(const Spectrum& spectrum, const AssignmentMap& map,
                                           const Dims& dims) {
  const auto rows = computational_indices(dims);
  ComplexMatrix restricted(4, 4);
  std::array<double, 4> energies{};
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t r = 0; r < 4; ++r) {
      restricted(static_cast<Index>(r), static_cast<Index>(c)) =
          spectrum.vectors(rows[r], map.eigen_index[c]);
    }
    energies[c] = spectrum.energies(map.eigen_index[c]) - spectrum.energies(0);
  }
  const ComplexMatrix w = lowdin_orthonormalize(restricted);
  const Eigen::Vector4d e(energies[0], energies[1], energies[2], energies[3]);
  ComplexMatrix h4 = w * e.cast<Complex>().asDiagonal() * w.adjoint();
  return {HermitianOperator(h4), energies};
}

StaticExtraction extract_static_quantities(const ProjectedHamiltonian& projected, double phi) {
  const auto& e = projected.energies;
  const ComplexMatrix& h = projected.h4.matrix();
  StaticExtraction out;
  out.phi = phi;
  out.energies = e;
  out.zeta = e[0] - e[1] - e[2] + e[3];
  out.j_coupling = 0.5 * h(1, 2).real();
  // Single-excitation energies are read in the orthonormalised computational
  // frame; they coincide with the assigned eigenvalues when J = 0.
  const double base = h(0, 0).real();
  out.omega_tilde[0] = h(1, 1).real() - base + 0.5 * out.zeta;
  out.omega_tilde[1] = h(2, 2).real() - base + 0.5 * out.zeta;
  return out;
}

StaticAnalysis analyze_static(const ModelHamiltonian& model) {
  StaticAnalysis out{eigh(model.drift), {}, {}};
  out.assignment = assign_dressed_states(out.spectrum, model.dims, model.flux);
  out.extraction = extract_static_quantities(
      project_computational(out.spectrum, out.assignment, model.dims), model.flux);
  return out;
}

HarmonicFit fit_harmonic(std::span<const FluxSample> samples, int order) {
  if (order < 0) throw InvalidArgument("harmonic order must be non-negative");
  const Index n = static_cast<Index>(samples.size());
  const Index cols = 2 * order + 1;
  if (n < cols) throw CalibrationError("insufficient flux coverage for harmonic fit");

  Eigen::MatrixXd design(n, cols);
  Eigen::VectorXd target(n);
  for (Index i = 0; i < n; ++i) {
    const double phi = samples[static_cast<std::size_t>(i)].phi;
    target(i) = samples[static_cast<std::size_t>(i)].value;
    design(i, 0) = 1.0;
    for (int k = 1; k <= order; ++k) {
      const double arg = 2.0 * std::numbers::pi * k * phi;
      design(i, 2 * k - 1) = std::cos(arg);
      design(i, 2 * k) = std::sin(arg);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) throw CalibrationError("insufficient flux coverage for harmonic fit");
  const Eigen::VectorXd coeffs = qr.solve(target);

  HarmonicFit fit;
  fit.c0 = coeffs(0);
  for (int k = 1; k <= order; ++k) {
    fit.cos_coeffs.push_back(coeffs(2 * k - 1));
    fit.sin_coeffs.push_back(coeffs(2 * k));
  }
  fit.rms_residual = sample_rms(design * coeffs - target);
  return fit;
}

namespace {

struct LinearPart {
  double offset;
  double amplitude;
  double rms;
};

// For fixed epsilon the surrogate is linear in (offset, amplitude).
std::optional<LinearPart> solve_linear_part(const Eigen::VectorXd& delta,
                                            const Eigen::VectorXd& target, double epsilon,
                                            SurrogateForm form) {
  Eigen::MatrixXd design(delta.size(), 2);
  design.col(0).setOnes();
  for (Index i = 0; i < delta.size(); ++i) {
    design(i, 1) = SurrogateFit::shape(form, delta(i), epsilon);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < 2) return std::nullopt;
  const Eigen::Vector2d c = qr.solve(target);
  return LinearPart{c(0), c(1), sample_rms(design * c - target)};
}

struct FormFit {
  double offset;
  double amplitude;
  double epsilon;
  double rms;
};

double shape_eps_derivative(SurrogateForm form, double delta, double epsilon) {
  const double q = delta * delta + epsilon * epsilon;
  return form == SurrogateForm::kEven ? -epsilon / (q * std::sqrt(q))
                                      : -2.0 * epsilon * delta / (q * q);
}

// Joint Gauss-Newton refinement of (offset, amplitude, epsilon); steps that do
// not lower the residual are halved and finally rejected.
FormFit polish(const Eigen::VectorXd& delta, const Eigen::VectorXd& target, SurrogateForm form,
               FormFit fit, double eps_min, double eps_max) {
  const Index n = delta.size();
  auto residual = [&](const FormFit& f) {
    Eigen::VectorXd r(n);
    for (Index i = 0; i < n; ++i) {
      r(i) = f.offset + f.amplitude * SurrogateFit::shape(form, delta(i), f.epsilon) - target(i);
    }
    return r;
  };
  for (int iter = 0; iter < 30; ++iter) {
    const Eigen::VectorXd r = residual(fit);
    Eigen::MatrixXd jac(n, 3);
    for (Index i = 0; i < n; ++i) {
      jac(i, 0) = 1.0;
      jac(i, 1) = SurrogateFit::shape(form, delta(i), fit.epsilon);
      jac(i, 2) = fit.amplitude * shape_eps_derivative(form, delta(i), fit.epsilon);
    }
    const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(-r);
    bool improved = false;
    for (double scale = 1.0; scale > 1e-4; scale *= 0.5) {
      FormFit trial = fit;
      trial.offset += scale * step(0);
      trial.amplitude += scale * step(1);
      trial.epsilon += scale * step(2);
      if (!(trial.epsilon >= eps_min && trial.epsilon <= eps_max)) continue;
      trial.rms = sample_rms(residual(trial));
      if (trial.rms < fit.rms) {
        improved = fit.rms - trial.rms > 1e-15 * std::max(1.0, fit.rms);
        fit = trial;
        break;
      }
    }
    if (!improved) break;
  }
  return fit;
}

// Variable projection: the residual is minimised over log(epsilon) only.
std::optional<FormFit> fit_surrogate_form(const Eigen::VectorXd& delta,
                                          const Eigen::VectorXd& target, SurrogateForm form) {
  constexpr double kEpsMin = 1e-4;
  constexpr double kEpsMax = 5.0;
  auto rms_at = [&](double log_eps) {
    const auto part = solve_linear_part(delta, target, std::exp(log_eps), form);
    return part ? part->rms : HUGE_VAL;
  };

  // Multi-start: a log-spaced scan seeds a bracketed Brent refinement around
  // every local minimum of the scan.
  constexpr int kScan = 41;
  std::vector<double> log_grid(kScan);
  std::vector<double> scan(kScan);
  for (int i = 0; i < kScan; ++i) {
    log_grid[i] = std::log(kEpsMin) + (std::log(kEpsMax) - std::log(kEpsMin)) * i / (kScan - 1);
    scan[i] = rms_at(log_grid[i]);
  }
  double best_log = std::log(0.1);
  double best_rms = rms_at(best_log);
  for (int i = 0; i < kScan; ++i) {
    const bool left_ok = i == 0 || scan[i] <= scan[i - 1];
    const bool right_ok = i == kScan - 1 || scan[i] <= scan[i + 1];
    if (!(left_ok && right_ok)) continue;
    if (scan[i] < best_rms) {
      best_rms = scan[i];
      best_log = log_grid[i];
    }
    const double lo = log_grid[std::max(i - 1, 0)];
    const double hi = log_grid[std::min(i + 1, kScan - 1)];
    boost::uintmax_t iterations = 200;
    const auto [x, value] = boost::math::tools::brent_find_minima(rms_at, lo, hi, 52, iterations);
    if (value < best_rms) {
      best_rms = value;
      best_log = x;
    }
  }
  const auto part = solve_linear_part(delta, target, std::exp(best_log), form);
  if (!part) return std::nullopt;
  return polish(delta, target, form,
                FormFit{part->offset, part->amplitude, std::exp(best_log), part->rms}, kEpsMin,
                kEpsMax);
}

}  // namespace

SurrogateFit fit_surrogate(std::span<const FluxSample> samples, const HarmonicFit& omega_tilde_q1,
                           double omega_c) {
  const Index n = static_cast<Index>(samples.size());
  if (n < 8) throw CalibrationError("surrogate fit needs at least 8 flux samples");
  Eigen::VectorXd delta(n);
  Eigen::VectorXd target(n);
  for (Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    delta(i) = omega_tilde_q1.evaluate(s.phi) - omega_c;
    target(i) = s.value;
  }

  SurrogateFit fit;
  fit.detuning_reference = omega_c;
  fit.detuning_curve = omega_tilde_q1;

  const double mean = target.mean();
  const double baseline = sample_rms(target.array() - mean);
  if (baseline <= 1e-14 * std::max(1.0, std::abs(mean))) {
    fit.offset = mean;
    fit.amplitude = 0.0;
    fit.epsilon = 0.1;
    fit.rms_residual = baseline;
    return fit;
  }

  std::optional<SurrogateFit> best;
  for (SurrogateForm form : {SurrogateForm::kEven, SurrogateForm::kOdd}) {
    const auto candidate = fit_surrogate_form(delta, target, form);
    if (candidate && candidate->rms < baseline &&
        (!best || candidate->rms < best->rms_residual)) {
      best = fit;
      best->form = form;
      best->offset = candidate->offset;
      best->amplitude = candidate->amplitude;
      best->epsilon = candidate->epsilon;
      best->rms_residual = candidate->rms;
    }
  }
  if (!best) throw CalibrationError("surrogate fit failed");
  return *best;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 1) throw InvalidArgument("flux grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  }
  return grid;
}

std::vector<SweepPoint> circuit_sweep(const DeviceParams& params, const TruncationConfig& trunc,
                                      std::span<const double> grid) {
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (double phi : grid) {
    SweepPoint point;
    point.phi = phi;
    try {
      const StaticAnalysis analysis =
          analyze_static(build_hamiltonian(ModelKind::kCircuit, params, {}, trunc, phi));
      point.extraction = analysis.extraction;
      point.assignment = analysis.assignment;
    } catch (const CalibrationError& e) {
      point.failure = e.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

EffectiveCalibration calibrate_effective(std::span<const StaticExtraction> sweep, int order,
                                         double omega_c) {
  EffectiveCalibration out;
  std::array<std::vector<FluxSample>, 2> omega;
  std::vector<FluxSample> exchange;
  std::vector<FluxSample> zz;
  for (const auto& s : sweep) {
    omega[0].push_back({s.phi, s.omega_tilde[0]});
    omega[1].push_back({s.phi, s.omega_tilde[1]});
    exchange.push_back({s.phi, s.j_coupling});
    zz.push_back({s.phi, s.zeta});
  }
  for (std::size_t j = 0; j < 2; ++j) out.curves.omega_tilde[j] = fit_harmonic(omega[j], order);

  auto surrogate_or_harmonic = [&](const std::vector<FluxSample>& samples,
                                   const char* name) -> FluxCurve {
    try {
      return fit_surrogate(samples, out.curves.omega_tilde[1], omega_c);
    } catch (const CalibrationError& e) {
      out.flags.push_back(std::string(name) + ": " + e.what() + "; using harmonic fit");
      return fit_harmonic(samples, order);
    }
  };
  out.curves.exchange = surrogate_or_harmonic(exchange, "J");
  out.curves.zz = surrogate_or_harmonic(zz, "zeta");
  return out;
}

std::pair<double, double> transmon_frequency_and_anharmonicity(const DeviceParams& params, int j,
                                                               double phi, int n_q) {
  const auto js = static_cast<std::size_t>(j);
  const ChargeBasisTransmon t =
      transmon_charge_hamiltonian(params.ec[js], ej_of_flux(params, j, phi), params.n_g[js], n_q);
  const RealVector e = eigh(t.hamiltonian).energies;
  return {e(1) - e(0), e(2) - 2.0 * e(1) + e(0)};
}

double spectral_rmse(const StaticExtraction& a, const StaticExtraction& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double d = a.energies[k] - b.energies[k];
    sum += d * d;
  }
  return std::sqrt(sum / 4.0);
}

double duffing_mismatch(const StaticExtraction& duffing, const StaticExtraction& reference) {
  const double rmse = spectral_rmse(duffing, reference);
  const double dj = duffing.j_coupling - reference.j_coupling;
  const double dz = duffing.zeta - reference.zeta;
  return rmse * rmse + dj * dj + dz * dz;
}

namespace {

constexpr double kRefineWindow = 0.15;  // GHz around the stage-1 estimate

double duffing_objective(const DeviceParams& params, const TruncationConfig& trunc, double phi,
                         const std::array<double, 2>& omega, const std::array<double, 2>& alpha,
                         const StaticExtraction& reference) {
  try {
    const ModelHamiltonian model = densify(assemble_duffing(
        params, omega, alpha, trunc.n_duff, trunc.duffing_coupler_levels(), phi));
    return duffing_mismatch(analyze_static(model).extraction, reference);
  } catch (const CalibrationError&) {
    return 1e3;
  }
}

}  // namespace

DuffingCalibration calibrate_duffing(const DeviceParams& params, const TruncationConfig& trunc,
                                     std::span<const SweepPoint> reference, int order) {
  trunc.validate();
  DuffingCalibration out;
  for (const SweepPoint& point : reference) {
    DuffingPointEstimate first;
    first.phi = point.phi;
    for (int j = 0; j < 2; ++j) {
      const auto [w, a] =
          transmon_frequency_and_anharmonicity(params, j, j == 1 ? point.phi : 0.0, trunc.n_q);
      first.omega[static_cast<std::size_t>(j)] = w;
      first.alpha[static_cast<std::size_t>(j)] = a;
    }
    DuffingPointEstimate refined = first;
    if (!point.extraction) {
      first.objective = refined.objective = HUGE_VAL;
      out.flags.push_back("phi=" + std::to_string(point.phi) +
                          ": no circuit reference, stage-1 estimate kept");
    } else {
      const StaticExtraction& ref = *point.extraction;
      first.objective = duffing_objective(params, trunc, point.phi, first.omega, first.alpha, ref);
      const std::vector<double> start{first.omega[1], first.alpha[1], first.omega[0],
                                      first.alpha[0]};
      BoxBounds box;
      for (double v : start) {
        box.lower.push_back(v - kRefineWindow);
        box.upper.push_back(v + kRefineWindow);
      }
      const Objective f = [&](std::span<const double> x) {
        return duffing_objective(params, trunc, point.phi, {x[2], x[0]}, {x[3], x[1]}, ref);
      };
      const MinimizeResult r =
          minimize_in_box(f, start, std::vector<double>(4, 0.02), box, 600, 1e-8);
      if (r.value <= first.objective) {
        refined.omega = {r.x[2], r.x[0]};
        refined.alpha = {r.x[3], r.x[1]};
        refined.objective = r.value;
      } else {
        refined.objective = first.objective;
        out.flags.push_back("phi=" + std::to_string(point.phi) +
                            ": refinement did not improve, stage-1 estimate kept");
      }
    }
    out.stage1.push_back(first);
    out.refined.push_back(refined);
  }

  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<FluxSample> omega;
    std::vector<FluxSample> alpha;
    for (const auto& p : out.refined) {
      omega.push_back({p.phi, p.omega[j]});
      alpha.push_back({p.phi, p.alpha[j]});
    }
    out.curves.omega[j] = fit_harmonic(omega, order);
    out.curves.alpha[j] = fit_harmonic(alpha, order);
  }
  return out;
}

DuffingCalibration calibrate_duffing(const DeviceParams& params, const TruncationConfig& trunc,
                                     std::span<const double> grid, int order) {
  const std::vector<SweepPoint> reference = circuit_sweep(params, trunc, grid);
  return calibrate_duffing(params, trunc, reference, order);
}

}  // namespace pulsesim
