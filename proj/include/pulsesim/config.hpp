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

#include <filesystem>
#include <string>
#include <vector>

#include "pulsesim/device.hpp"
#include "pulsesim/dynamics.hpp"

namespace pulsesim {

struct SweepConfig {
  double flux_min = 0.0;
  double flux_max = 0.45;
  int flux_points = 101;
  int harmonic_order = 4;
};

struct ConvergenceConfig {
  TruncationConfig reference{31, 11, 8, 5, 0};
  std::vector<int> n_q{9, 11, 13, 15, 17, 19, 21, 23, 27};
  std::vector<int> n_eq{3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> n_ec{2, 3, 4, 5, 6, 7};
  std::vector<int> n_duff{2, 3, 4, 5};
  std::vector<double> flux{0.0, 0.1, 0.2, 0.3, 0.4};
};

struct RxConfig {
  double amp = 0.02;        // GHz
  double ramp = 2.0;        // ns
  double area = 0.5;        // flat length is chosen so the envelope integral equals this
  double carrier = 0.0;     // GHz; 0 selects the circuit-model dressed q0 frequency at idle
  double theta = 0.0;
  double idle_flux = 0.0;  // the drive acts on q0, q1 is the spectator
  DriveFrame frame = DriveFrame::kLab;

  double flat() const { return area / amp - ramp; }
};

struct CzConfig {
  double idle_flux = 0.0;
  double target_flux = 0.233;
  double ramp = 2.0;
};

struct LeakageConfig {
  double window = 60.0;  // ns
  double threshold = kTrackedPopulationThreshold;
};

struct RuntimeConfig {
  std::vector<int> truncations{3, 5, 7, 9};
  int repetitions = 3;
};

struct OutputConfig {
  std::filesystem::path directory = "results";
  int stride = 10;  // time-series rows written every stride steps
};

struct RunConfig {
  DeviceParams device;
  TruncationConfig truncation;
  ConvergenceConfig convergence;
  SweepConfig sweep;
  RxConfig rx;
  CzConfig cz;
  LeakageConfig leakage;
  RuntimeConfig runtime;
  OutputConfig output;
  double dt = 0.002;  // ns
  unsigned long seed = 0;

  void validate() const;
  std::vector<double> flux_grid() const;
};

/// Parses an INI document; unknown sections or keys raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form, stable across runs; hashed into output metadata.
std::string canonical_config(const RunConfig& config);

}  // namespace pulsesim
