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

#include "pulsesim/calibration.hpp"
#include "pulsesim/curves.hpp"
#include "pulsesim/device.hpp"

namespace pulsesim {

inline constexpr int kArtifactVersion = 1;

/// Everything the reduced models need, plus provenance.
struct CalibrationArtifact {
  DeviceParams device;
  TruncationConfig truncation;
  std::vector<double> flux_grid;
  int harmonic_order = 4;
  EffectiveCurves effective;
  DuffingCurves duffing;
  std::vector<std::string> flags;

  ModelCurves curves() const { return {effective, duffing}; }
};

std::string device_hash(const DeviceParams& params);

std::string serialize_artifact(const CalibrationArtifact& artifact);
CalibrationArtifact deserialize_artifact(const std::string& text);

void save_artifact(const CalibrationArtifact& artifact, const std::filesystem::path& path);

/// Verifies checksum and device provenance; throws CalibrationError on any mismatch.
CalibrationArtifact load_artifact(const std::filesystem::path& path);
CalibrationArtifact load_artifact(const std::filesystem::path& path, const DeviceParams& expected);

std::string sha256_hex(const std::string& data);

}  // namespace pulsesim
