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

#include "pulsesim/artifact.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pulsesim/errors.hpp"

namespace pulsesim {

using nlohmann::json;

namespace {

json to_json(const DeviceParams& p) {
  return {{"ej_max", p.ej_max}, {"ec", p.ec},           {"d", p.d},         {"n_g", p.n_g},
          {"g", p.g},           {"omega_c", p.omega_c}, {"kappa", p.kappa}};
}

DeviceParams device_from_json(const json& j) {
  DeviceParams p;
  j.at("ej_max").get_to(p.ej_max);
  j.at("ec").get_to(p.ec);
  j.at("d").get_to(p.d);
  j.at("n_g").get_to(p.n_g);
  j.at("g").get_to(p.g);
  j.at("omega_c").get_to(p.omega_c);
  j.at("kappa").get_to(p.kappa);
  return p;
}

json to_json(const TruncationConfig& t) {
  return {{"n_q", t.n_q},
          {"n_eq", t.n_eq},
          {"n_ec", t.n_ec},
          {"n_duff", t.n_duff},
          {"n_duff_coupler", t.n_duff_coupler}};
}

TruncationConfig truncation_from_json(const json& j) {
  TruncationConfig t;
  j.at("n_q").get_to(t.n_q);
  j.at("n_eq").get_to(t.n_eq);
  j.at("n_ec").get_to(t.n_ec);
  j.at("n_duff").get_to(t.n_duff);
  j.at("n_duff_coupler").get_to(t.n_duff_coupler);
  return t;
}

json to_json(const HarmonicFit& f) {
  return {{"form", "harmonic"},
          {"order", f.order()},
          {"c0", f.c0},
          {"cos", f.cos_coeffs},
          {"sin", f.sin_coeffs},
          {"rms_residual", f.rms_residual}};
}

HarmonicFit harmonic_from_json(const json& j) {
  HarmonicFit f;
  j.at("c0").get_to(f.c0);
  j.at("cos").get_to(f.cos_coeffs);
  j.at("sin").get_to(f.sin_coeffs);
  j.at("rms_residual").get_to(f.rms_residual);
  if (f.cos_coeffs.size() != f.sin_coeffs.size() ||
      static_cast<int>(f.cos_coeffs.size()) != j.at("order").get<int>()) {
    throw CalibrationError("artifact harmonic fit is inconsistent");
  }
  return f;
}

json to_json(const FluxCurve& curve) {
  if (const auto* h = std::get_if<HarmonicFit>(&curve)) return to_json(*h);
  const auto& s = std::get<SurrogateFit>(curve);
  return {{"form", s.form == SurrogateForm::kOdd ? "surrogate_odd" : "surrogate"},
          {"amplitude", s.amplitude},
          {"epsilon", s.epsilon},
          {"offset", s.offset},
          {"detuning_reference", s.detuning_reference},
          {"detuning_curve", to_json(s.detuning_curve)},
          {"rms_residual", s.rms_residual}};
}

FluxCurve curve_from_json(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  if (form == "harmonic") return harmonic_from_json(j);
  if (form != "surrogate" && form != "surrogate_odd") {
    throw CalibrationError("artifact curve has unknown form " + form);
  }
  SurrogateFit s;
  s.form = form == "surrogate_odd" ? SurrogateForm::kOdd : SurrogateForm::kEven;
  j.at("amplitude").get_to(s.amplitude);
  j.at("epsilon").get_to(s.epsilon);
  j.at("offset").get_to(s.offset);
  j.at("detuning_reference").get_to(s.detuning_reference);
  s.detuning_curve = harmonic_from_json(j.at("detuning_curve"));
  j.at("rms_residual").get_to(s.rms_residual);
  if (!(s.epsilon > 0.0)) throw CalibrationError("artifact surrogate has non-positive epsilon");
  return s;
}

json body_json(const CalibrationArtifact& a) {
  json eff = {{"omega_tilde", {to_json(a.effective.omega_tilde[0]),
                               to_json(a.effective.omega_tilde[1])}},
              {"exchange", to_json(a.effective.exchange)},
              {"zz", to_json(a.effective.zz)}};
  json duff = {{"omega", {to_json(a.duffing.omega[0]), to_json(a.duffing.omega[1])}},
               {"alpha", {to_json(a.duffing.alpha[0]), to_json(a.duffing.alpha[1])}}};
  return {{"format", "pulsesim-calibration"},
          {"version", kArtifactVersion},
          {"device", to_json(a.device)},
          {"device_hash", device_hash(a.device)},
          {"truncation", to_json(a.truncation)},
          {"flux_grid", a.flux_grid},
          {"harmonic_order", a.harmonic_order},
          {"effective", eff},
          {"duffing", duff},
          {"flags", a.flags}};
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string device_hash(const DeviceParams& params) { return sha256_hex(to_json(params).dump()); }

std::string serialize_artifact(const CalibrationArtifact& artifact) {
  json doc = body_json(artifact);
  doc["checksum"] = sha256_hex(doc.dump());
  return doc.dump(2) + "\n";
}

CalibrationArtifact deserialize_artifact(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CalibrationError(std::string("artifact is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "pulsesim-calibration") throw CalibrationError("not a calibration artifact");
    if (doc.at("version").get<int>() != kArtifactVersion) {
      throw CalibrationError("unsupported artifact version");
    }
    const std::string checksum = doc.at("checksum").get<std::string>();
    json body = doc;
    body.erase("checksum");
    if (sha256_hex(body.dump()) != checksum) throw CalibrationError("artifact checksum mismatch");

    CalibrationArtifact a;
    a.device = device_from_json(doc.at("device"));
    if (device_hash(a.device) != doc.at("device_hash").get<std::string>()) {
      throw CalibrationError("artifact device hash mismatch");
    }
    a.truncation = truncation_from_json(doc.at("truncation"));
    doc.at("flux_grid").get_to(a.flux_grid);
    doc.at("harmonic_order").get_to(a.harmonic_order);
    const json& eff = doc.at("effective");
    for (std::size_t j = 0; j < 2; ++j) {
      a.effective.omega_tilde[j] = harmonic_from_json(eff.at("omega_tilde").at(j));
      a.duffing.omega[j] = harmonic_from_json(doc.at("duffing").at("omega").at(j));
      a.duffing.alpha[j] = harmonic_from_json(doc.at("duffing").at("alpha").at(j));
    }
    a.effective.exchange = curve_from_json(eff.at("exchange"));
    a.effective.zz = curve_from_json(eff.at("zz"));
    doc.at("flags").get_to(a.flags);
    return a;
  } catch (const json::exception& e) {
    throw CalibrationError(std::string("malformed artifact: ") + e.what());
  }
}

void save_artifact(const CalibrationArtifact& artifact, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_artifact(artifact);
}

CalibrationArtifact load_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CalibrationError("cannot read calibration artifact " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return deserialize_artifact(text.str());
}

CalibrationArtifact load_artifact(const std::filesystem::path& path, const DeviceParams& expected) {
  CalibrationArtifact a = load_artifact(path);
  if (device_hash(a.device) != device_hash(expected)) {
    throw CalibrationError("calibration artifact was produced for a different device");
  }
  return a;
}

}  // namespace pulsesim
