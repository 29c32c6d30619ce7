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

#include "pulsesim/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>

#include "pulsesim/calibration.hpp"
#include "pulsesim/errors.hpp"

namespace pulsesim {

namespace {

namespace pt = boost::property_tree;

template <typename T>
T parse_scalar(const std::string& key, const std::string& raw) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(raw));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("invalid value '" + raw + "' for " + key);
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(","));
  std::vector<T> out;
  for (const auto& part : parts) out.push_back(parse_scalar<T>(key, part));
  return out;
}

// Per-qubit lists are written in the order (q1, q0).
std::array<double, 2> parse_pair(const std::string& key, const std::string& raw) {
  const auto v = parse_list<double>(key, raw);
  if (v.size() != 2) throw ConfigError(key + " needs two values (q1, q0)");
  return {v[1], v[0]};
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& raw)>;

template <typename T>
Setter scalar(T RunConfig::*section_member, auto field) {
  return [=](RunConfig& c, const std::string& key, const std::string& raw) {
    (c.*section_member).*field = parse_scalar<std::remove_cvref_t<decltype((c.*section_member).*field)>>(key, raw);
  };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"device",
       {{"ej_max", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.device.ej_max = parse_pair(k, v);
         }},
        {"ec", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.device.ec = parse_pair(k, v);
         }},
        {"d", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.device.d = parse_pair(k, v);
         }},
        {"n_g", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.device.n_g = parse_pair(k, v);
         }},
        {"g", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.device.g = parse_pair(k, v);
         }},
        {"omega_c", scalar(&RunConfig::device, &DeviceParams::omega_c)},
        {"kappa", scalar(&RunConfig::device, &DeviceParams::kappa)}}},
      {"truncation",
       {{"n_q", scalar(&RunConfig::truncation, &TruncationConfig::n_q)},
        {"n_eq", scalar(&RunConfig::truncation, &TruncationConfig::n_eq)},
        {"n_ec", scalar(&RunConfig::truncation, &TruncationConfig::n_ec)},
        {"n_duff", scalar(&RunConfig::truncation, &TruncationConfig::n_duff)},
        {"n_duff_coupler", scalar(&RunConfig::truncation, &TruncationConfig::n_duff_coupler)},
        {"reference_n_q", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.reference.n_q = parse_scalar<int>(k, v);
         }},
        {"reference_n_eq", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.reference.n_eq = parse_scalar<int>(k, v);
         }},
        {"reference_n_ec", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.reference.n_ec = parse_scalar<int>(k, v);
         }},
        {"study_n_q", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.n_q = parse_list<int>(k, v);
         }},
        {"study_n_eq", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.n_eq = parse_list<int>(k, v);
         }},
        {"study_n_ec", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.n_ec = parse_list<int>(k, v);
         }},
        {"study_n_duff", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.n_duff = parse_list<int>(k, v);
         }},
        {"study_flux", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.convergence.flux = parse_list<double>(k, v);
         }}}},
      {"sweep",
       {{"flux_min", scalar(&RunConfig::sweep, &SweepConfig::flux_min)},
        {"flux_max", scalar(&RunConfig::sweep, &SweepConfig::flux_max)},
        {"flux_points", scalar(&RunConfig::sweep, &SweepConfig::flux_points)},
        {"harmonic_order", scalar(&RunConfig::sweep, &SweepConfig::harmonic_order)}}},
      {"rx",
       {{"amp", scalar(&RunConfig::rx, &RxConfig::amp)},
        {"ramp", scalar(&RunConfig::rx, &RxConfig::ramp)},
        {"area", scalar(&RunConfig::rx, &RxConfig::area)},
        {"carrier", scalar(&RunConfig::rx, &RxConfig::carrier)},
        {"theta", scalar(&RunConfig::rx, &RxConfig::theta)},
        {"idle_flux", scalar(&RunConfig::rx, &RxConfig::idle_flux)},
        {"frame", [](RunConfig& c, const std::string&, const std::string& v) {
           try {
             c.rx.frame = parse_drive_frame(boost::trim_copy(v));
           } catch (const InvalidArgument& e) {
             throw ConfigError(e.what());
           }
         }}}},
      {"cz",
       {{"idle_flux", scalar(&RunConfig::cz, &CzConfig::idle_flux)},
        {"target_flux", scalar(&RunConfig::cz, &CzConfig::target_flux)},
        {"ramp", scalar(&RunConfig::cz, &CzConfig::ramp)}}},
      {"dynamics",
       {{"dt", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.dt = parse_scalar<double>(k, v);
         }}}},
      {"leakage",
       {{"window", scalar(&RunConfig::leakage, &LeakageConfig::window)},
        {"threshold", scalar(&RunConfig::leakage, &LeakageConfig::threshold)}}},
      {"runtime",
       {{"truncations", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.runtime.truncations = parse_list<int>(k, v);
         }},
        {"repetitions", scalar(&RunConfig::runtime, &RuntimeConfig::repetitions)}}},
      {"output",
       {{"directory", [](RunConfig& c, const std::string&, const std::string& v) {
           c.output.directory = boost::trim_copy(v);
         }},
        {"stride", scalar(&RunConfig::output, &OutputConfig::stride)},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
           c.seed = parse_scalar<unsigned long>(k, v);
         }}}},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  try {
    device.validate();
    truncation.validate();
    convergence.reference.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(dt > 0.0)) throw ConfigError("dynamics.dt must be positive");
  if (sweep.flux_points < 1) throw ConfigError("sweep.flux_points must be at least 1");
  if (!(sweep.flux_max >= sweep.flux_min)) throw ConfigError("sweep.flux_max < sweep.flux_min");
  if (sweep.harmonic_order < 0) throw ConfigError("sweep.harmonic_order must be >= 0");
  if (!(rx.amp > 0.0) || !(rx.ramp >= 0.0) || !(rx.area > 0.0)) {
    throw ConfigError("rx amp and area must be positive and ramp non-negative");
  }
  if (rx.flat() < 0.0) throw ConfigError("rx ramps alone exceed the requested pulse area");
  if (!(cz.ramp >= 0.0)) throw ConfigError("cz.ramp must be non-negative");
  if (!(leakage.window > 0.0)) throw ConfigError("leakage.window must be positive");
  if (runtime.repetitions < 3) throw ConfigError("runtime.repetitions must be at least 3");
  if (runtime.truncations.empty()) throw ConfigError("runtime.truncations is empty");
  if (output.stride < 1) throw ConfigError("output.stride must be at least 1");
  const auto& ref = convergence.reference;
  auto check_axis = [](const std::vector<int>& values, int limit, const char* name) {
    for (int v : values) {
      if (v > limit) {
        throw ConfigError(std::string("truncation study value exceeds reference on ") + name);
      }
    }
  };
  check_axis(convergence.n_q, ref.n_q, "n_q");
  check_axis(convergence.n_eq, ref.n_eq, "n_eq");
  check_axis(convergence.n_ec, ref.n_ec, "n_ec");
  for (int v : convergence.n_q) {
    if (v < 3 || v % 2 == 0 || v < truncation.n_eq) {
      throw ConfigError("study_n_q values must be odd and at least n_eq");
    }
  }
  for (int v : convergence.n_eq) {
    if (v < 3 || v > truncation.n_q) throw ConfigError("study_n_eq values must lie in [3, n_q]");
  }
  for (int v : convergence.n_ec) {
    if (v < 2) throw ConfigError("study_n_ec values must be >= 2");
  }
  for (int v : convergence.n_duff) {
    if (v < 2) throw ConfigError("study_n_duff values must be >= 2");
  }
  if (convergence.flux.empty()) throw ConfigError("study_flux is empty");
  for (int v : runtime.truncations) {
    if (v < 2 || v > truncation.n_q) throw ConfigError("runtime truncations must lie in [2, n_q]");
  }
}

std::vector<double> RunConfig::flux_grid() const {
  return uniform_grid(sweep.flux_min, sweep.flux_max, sweep.flux_points);
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig config;
  const auto& sections = schema();
  for (const auto& [section, body] : tree) {
    const auto s = sections.find(section);
    if (s == sections.end()) throw ConfigError("unknown config section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [key, value] : body) {
      const auto k = s->second.find(key);
      if (k == s->second.end()) throw ConfigError("unknown config key " + section + "." + key);
      k->second(config, section + "." + key, value.data());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string canonical_config(const RunConfig& c) {
  using nlohmann::json;
  auto trunc = [](const TruncationConfig& t) {
    return json{{"n_q", t.n_q}, {"n_eq", t.n_eq}, {"n_ec", t.n_ec}, {"n_duff", t.n_duff},
                {"n_duff_coupler", t.n_duff_coupler}};
  };
  const json doc = {
      {"device",
       {{"ej_max", c.device.ej_max}, {"ec", c.device.ec}, {"d", c.device.d},
        {"n_g", c.device.n_g}, {"g", c.device.g}, {"omega_c", c.device.omega_c},
        {"kappa", c.device.kappa}}},
      {"truncation", trunc(c.truncation)},
      {"convergence",
       {{"reference", trunc(c.convergence.reference)}, {"n_q", c.convergence.n_q},
        {"n_eq", c.convergence.n_eq}, {"n_ec", c.convergence.n_ec},
        {"n_duff", c.convergence.n_duff}, {"flux", c.convergence.flux}}},
      {"sweep",
       {{"flux_min", c.sweep.flux_min}, {"flux_max", c.sweep.flux_max},
        {"flux_points", c.sweep.flux_points}, {"harmonic_order", c.sweep.harmonic_order}}},
      {"rx",
       {{"amp", c.rx.amp}, {"ramp", c.rx.ramp}, {"area", c.rx.area}, {"carrier", c.rx.carrier},
        {"theta", c.rx.theta}, {"idle_flux", c.rx.idle_flux},
        {"frame", std::string(to_string(c.rx.frame))}}},
      {"cz",
       {{"idle_flux", c.cz.idle_flux}, {"target_flux", c.cz.target_flux}, {"ramp", c.cz.ramp}}},
      {"leakage", {{"window", c.leakage.window}, {"threshold", c.leakage.threshold}}},
      {"runtime",
       {{"truncations", c.runtime.truncations}, {"repetitions", c.runtime.repetitions}}},
      {"output", {{"stride", c.output.stride}}},
      {"dt", c.dt},
      {"seed", c.seed},
  };
  return doc.dump();
}

}  // namespace pulsesim
