// Copyright 2026 The mbrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mbrb/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "mbrb/error.hpp"

namespace mbrb {

namespace {

using nlohmann::json;

constexpr const char* kDatasetMagic = "# mbrb-dataset v1";
constexpr const char* kDecayMagic = "# mbrb-decay v1";
constexpr const char* kAcosLabel = "acos(1/sqrt3)";

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double acos_design() { return std::acos(1.0 / std::sqrt(3.0)); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw InvalidArgument(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& j, const char* key, const char* where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad or missing '") + key + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

json noise_to_json(const NoiseModel& n) {
  json j;
  j["kind"] = to_string(n.kind);
  if (n.kind == NoiseKind::depolarizing && 1.0 - (1.0 - n.strength) == n.strength) {
    j["p"] = 1.0 - n.strength;
  } else if (n.kind != NoiseKind::none && n.kind != NoiseKind::composite) {
    j["strength"] = n.strength;
  }
  j["placement"] = to_string(n.placement);
  if (n.dependence.angle_gain != 0.0) j["angle_gain"] = n.dependence.angle_gain;
  if (n.dependence.outcome_gain != 0.0) j["outcome_gain"] = n.dependence.outcome_gain;
  if (n.kind == NoiseKind::composite) {
    json parts = json::array();
    for (const auto& c : n.components) parts.push_back(noise_to_json(c));
    j["components"] = parts;
  }
  return j;
}

NoiseModel noise_from_json(const json& j) {
  constexpr const char* where = "noise";
  check_keys(j, {"kind", "p", "strength", "placement", "angle_gain", "outcome_gain", "components"},
             where);
  NoiseModel n;
  n.kind = parse_noise_kind(get<std::string>(j, "kind", where));
  if (j.contains("p") && j.contains("strength")) {
    throw InvalidArgument("noise takes either 'p' or 'strength', not both");
  }
  if (j.contains("p")) {
    if (n.kind != NoiseKind::depolarizing) {
      throw InvalidArgument("'p' is only meaningful for depolarizing noise");
    }
    n.strength = 1.0 - get<double>(j, "p", where);
  } else {
    n.strength = get_or<double>(j, "strength", 0.0, where);
  }
  n.placement = parse_noise_placement(
      get_or<std::string>(j, "placement", to_string(NoisePlacement::after_each_block), where));
  n.dependence.angle_gain = get_or<double>(j, "angle_gain", 0.0, where);
  n.dependence.outcome_gain = get_or<double>(j, "outcome_gain", 0.0, where);
  if (j.contains("components")) {
    if (n.kind != NoiseKind::composite) {
      throw InvalidArgument("'components' is only meaningful for composite noise");
    }
    for (const auto& c : j.at("components")) n.components.push_back(noise_from_json(c));
  }
  n.validate();
  return n;
}

json config_to_json(const ExperimentConfig& e) {
  const RBConfig& c = e.rb;
  json j;
  j["protocol"] = to_string(c.protocol);
  j["lengths"] = c.lengths;
  j["sequences_per_length"] = c.sequences_per_length;
  j["shots_per_sequence"] = c.shots_per_sequence;
  j["seed"] = c.seed;
  j["sequence_mode"] = to_string(c.sequence_mode);
  j["noise"] = noise_to_json(c.noise);
  if (c.noise_inv) j["noise_inv"] = noise_to_json(*c.noise_inv);
  j["instrument"] = {{"bias", c.instrument.bias},
                     {"inject_randomness", c.instrument.inject_randomness}};
  j["spam"] = {{"prep_shrink", c.spam.prep_shrink}, {"effect_bias", c.spam.effect_bias}};
  j["design_phis"] = {format_angle(c.phi1), format_angle(c.phi2)};
  j["threads"] = e.threads;
  j["bootstrap_resamples"] = e.bootstrap_resamples;
  j["outputs"] = {{"dataset", e.outputs.dataset},
                  {"report", e.outputs.report},
                  {"table", e.outputs.table}};
  j["verify"] = {{"angle_table", e.verify.angle_table},
                 {"design_matrices", e.verify.design_matrices},
                 {"two_design", e.verify.two_design},
                 {"byproducts", e.verify.byproducts}};
  return j;
}

double angle_from_json(const json& j) {
  if (j.is_number()) return j.get<double>() * std::numbers::pi;
  if (j.is_string()) return parse_angle(j.get<std::string>());
  throw InvalidArgument("angles must be numbers (units of pi) or strings");
}

std::vector<int> lengths_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<int> out;
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw InvalidArgument("lengths must be integers");
      out.push_back(v.get<int>());
    }
    return out;
  }
  if (j.is_object()) {
    check_keys(j, {"from", "to", "step"}, "lengths");
    const int from = get<int>(j, "from", "lengths");
    const int to = get<int>(j, "to", "lengths");
    const int step = get_or<int>(j, "step", 1, "lengths");
    if (step < 1 || to < from) throw InvalidArgument("lengths range is empty");
    std::vector<int> out;
    for (int s = from; s <= to; s += step) out.push_back(s);
    return out;
  }
  throw InvalidArgument("lengths must be a list or a {from, to, step} range");
}

ExperimentConfig config_from_json(const json& j) {
  constexpr const char* where = "config";
  check_keys(j,
             {"protocol", "lengths", "sequences_per_length", "shots_per_sequence", "seed",
              "sequence_mode", "noise", "noise_inv", "instrument", "spam", "design_phis",
              "threads", "bootstrap_resamples", "outputs", "verify"},
             where);
  ExperimentConfig e;
  RBConfig& c = e.rb;
  c.protocol = parse_protocol(get<std::string>(j, "protocol", where));
  if (!j.contains("lengths")) throw InvalidArgument("missing 'lengths' in config");
  c.lengths = lengths_from_json(j.at("lengths"));
  c.sequences_per_length = get<int>(j, "sequences_per_length", where);
  c.shots_per_sequence = get<int>(j, "shots_per_sequence", where);
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else if (s.is_string()) {
      try {
        std::size_t used = 0;
        c.seed = std::stoull(s.get<std::string>(), &used, 0);
        if (used != s.get<std::string>().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InvalidArgument("seed must be a non-negative 64-bit integer");
      }
    } else {
      throw InvalidArgument("seed must be a non-negative 64-bit integer");
    }
  }
  c.sequence_mode = parse_sequence_mode(
      get_or<std::string>(j, "sequence_mode", to_string(SequenceMode::coset_reps), where));
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  if (j.contains("noise_inv")) c.noise_inv = noise_from_json(j.at("noise_inv"));
  if (j.contains("instrument")) {
    const json& i = j.at("instrument");
    check_keys(i, {"bias", "inject_randomness"}, "instrument");
    c.instrument.bias = get_or<double>(i, "bias", 0.0, "instrument");
    c.instrument.inject_randomness = get_or<bool>(i, "inject_randomness", false, "instrument");
  }
  if (j.contains("spam")) {
    const json& s = j.at("spam");
    check_keys(s, {"prep_shrink", "effect_bias"}, "spam");
    c.spam.prep_shrink = get_or<double>(s, "prep_shrink", 1.0, "spam");
    c.spam.effect_bias = get_or<double>(s, "effect_bias", 0.0, "spam");
  }
  if (j.contains("design_phis")) {
    const json& p = j.at("design_phis");
    if (!p.is_array() || p.size() != 2) throw InvalidArgument("design_phis takes two angles");
    c.phi1 = angle_from_json(p[0]);
    c.phi2 = angle_from_json(p[1]);
  }
  e.threads = get_or<int>(j, "threads", 1, where);
  e.bootstrap_resamples = get_or<int>(j, "bootstrap_resamples", 200, where);
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    check_keys(o, {"dataset", "report", "table"}, "outputs");
    e.outputs.dataset = get_or<std::string>(o, "dataset", "", "outputs");
    e.outputs.report = get_or<std::string>(o, "report", "", "outputs");
    e.outputs.table = get_or<std::string>(o, "table", "", "outputs");
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    check_keys(v, {"angle_table", "design_matrices", "two_design", "byproducts"}, "verify");
    e.verify.angle_table = get_or<bool>(v, "angle_table", true, "verify");
    e.verify.design_matrices = get_or<bool>(v, "design_matrices", true, "verify");
    e.verify.two_design = get_or<bool>(v, "two_design", true, "verify");
    e.verify.byproducts = get_or<bool>(v, "byproducts", true, "verify");
  }
  if (e.threads < 1) throw InvalidArgument("threads must be positive");
  if (e.bootstrap_resamples != 0 && e.bootstrap_resamples < 100) {
    throw InvalidArgument("bootstrap_resamples must be 0 (off) or at least 100");
  }
  c.validate();
  return e;
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed ") + what + ": " + e.what());
  }
}

std::string header_block(const char* magic, const ExperimentConfig& e,
                         const std::vector<std::string>& warnings) {
  std::string out = std::string(magic) + "\n";
  out += std::string("# toolkit_version: ") + kToolkitVersion + "\n";
  out += "# config: " + config_to_json(e).dump() + "\n";
  for (const auto& w : warnings) out += "# warning: " + w + "\n";
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <class T>
T parse_number(const std::string& field, const char* what) {
  T value{};
  int base = 10;
  if constexpr (std::is_same_v<T, std::uint64_t>) base = 16;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value, base);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidArgument(std::string("bad ") + what + " field '" + field + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string format_angle(double radians) {
  if (radians == acos_design()) return kAcosLabel;
  if (radians == -acos_design()) return std::string("-") + kAcosLabel;
  const double x = radians / std::numbers::pi;
  double up = x, down = x;
  for (int k = 0; k < 4; ++k) {
    if (up * std::numbers::pi == radians) return shortest(up);
    if (down * std::numbers::pi == radians) return shortest(down);
    up = std::nextafter(up, INFINITY);
    down = std::nextafter(down, -INFINITY);
  }
  return shortest(radians) + "rad";
}

double parse_angle(const std::string& text) {
  if (text == kAcosLabel) return acos_design();
  if (text == std::string("-") + kAcosLabel) return -acos_design();
  std::string body = text;
  bool in_radians = false;
  if (body.size() > 3 && body.ends_with("rad")) {
    body.resize(body.size() - 3);
    in_radians = true;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (body.empty() || ec != std::errc() || ptr != body.data() + body.size() ||
      !std::isfinite(value)) {
    throw InvalidArgument("malformed angle '" + text + "'");
  }
  return in_radians ? value : value * std::numbers::pi;
}

std::string serialize_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

ExperimentConfig parse_config(const std::string& text) {
  return config_from_json(parse_json(text, "config"));
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

void save_config(const ExperimentConfig& config, const std::string& path) {
  write_text(path, serialize_config(config));
}

std::string dataset_text(const RBDataset& dataset, const ExperimentConfig& experiment) {
  ExperimentConfig e = experiment;
  e.rb = dataset.config;
  std::string out = header_block(kDatasetMagic, e, dataset.warnings);
  out += "length\tsequence\tsurvivals\tshots\tdigest\tgates\n";
  for (const auto& r : dataset.records) {
    out += std::to_string(r.length) + "\t" + std::to_string(r.sequence) + "\t" +
           std::to_string(r.survivals) + "\t" + std::to_string(r.shots) + "\t" +
           hex64(r.digest) + "\t";
    if (r.gates.empty()) {
      out += "-";
    } else {
      for (std::size_t k = 0; k < r.gates.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(r.gates[k]);
      }
    }
    out += "\n";
  }
  return out;
}

RBDataset parse_dataset(const std::string& text, ExperimentConfig* experiment) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kDatasetMagic) {
    throw InvalidArgument("not an mbrb dataset (missing header)");
  }
  RBDataset ds;
  bool have_config = false;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.starts_with("# config: ")) {
      const ExperimentConfig e = parse_config(line.substr(10));
      ds.config = e.rb;
      if (experiment) *experiment = e;
      have_config = true;
    } else if (line.starts_with("# warning: ")) {
      ds.warnings.push_back(line.substr(11));
    } else if (line.starts_with("#")) {
      continue;
    } else if (!have_columns) {
      if (line != "length\tsequence\tsurvivals\tshots\tdigest\tgates") {
        throw InvalidArgument("unexpected dataset columns");
      }
      have_columns = true;
    } else {
      const auto f = split(line, '\t');
      if (f.size() != 6) throw InvalidArgument("dataset row needs 6 fields: " + line);
      RBRecord r;
      r.length = parse_number<int>(f[0], "length");
      r.sequence = parse_number<int>(f[1], "sequence");
      r.survivals = parse_number<int>(f[2], "survivals");
      r.shots = parse_number<int>(f[3], "shots");
      r.digest = parse_number<std::uint64_t>(f[4], "digest");
      if (f[5] != "-") {
        for (const auto& g : split(f[5], ',')) r.gates.push_back(parse_number<int>(g, "gate"));
      }
      if (r.length < 1 || r.shots < 1 || r.survivals < 0 || r.survivals > r.shots) {
        throw InvalidArgument("inconsistent dataset row: " + line);
      }
      ds.records.push_back(std::move(r));
    }
  }
  if (!have_config) throw InvalidArgument("dataset lacks a config header");
  if (!have_columns) throw InvalidArgument("dataset lacks a column header");
  return ds;
}

void write_dataset(const RBDataset& dataset, const ExperimentConfig& experiment,
                   const std::string& path) {
  write_text(path, dataset_text(dataset, experiment));
}

RBDataset read_dataset(const std::string& path, ExperimentConfig* experiment) {
  return parse_dataset(read_text(path), experiment);
}

std::string fit_report(const DecayFit& fit, const RBDataset& dataset,
                       const ExperimentConfig& experiment) {
  ExperimentConfig e = experiment;
  e.rb = dataset.config;
  json j;
  j["toolkit_version"] = kToolkitVersion;
  j["protocol"] = to_string(dataset.config.protocol);
  j["seed"] = dataset.config.seed;
  j["fit"] = {{"a0", fit.a0},
              {"b0", fit.b0},
              {"p", fit.p},
              {"avg_fidelity", fit.avg_fidelity},
              {"residual_norm", fit.residual_norm},
              {"ci_p", {fit.ci_p.first, fit.ci_p.second}},
              {"degenerate", fit.degenerate},
              {"clamped", fit.clamped},
              {"iterations", fit.iterations}};
  j["records"] = dataset.records.size();
  j["warnings"] = dataset.warnings;
  j["config"] = config_to_json(e);
  return j.dump(2) + "\n";
}

std::string decay_table(const std::vector<DecayPoint>& points, const DecayFit& fit,
                        const ExperimentConfig& experiment) {
  std::string out = header_block(kDecayMagic, experiment, {});
  out += "s\tmean\tstderr\tmodel\n";
  for (const auto& pt : points) {
    const double model = fit.a0 * std::pow(fit.p, pt.length) + fit.b0;
    out += shortest(pt.length) + "\t" + shortest(pt.mean) + "\t" + shortest(pt.std_error) + "\t" +
           shortest(model) + "\n";
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) throw IoError("error while writing '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace mbrb
