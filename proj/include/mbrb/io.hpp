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

#pragma once

// Experiment configs, datasets, fit reports and decay tables as text files.

#include <optional>
#include <string>
#include <vector>

#include "mbrb/fit.hpp"
#include "mbrb/rb.hpp"

namespace mbrb {

struct OutputPaths {
  std::string dataset;
  std::string report;
  std::string table;

  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct VerifyToggles {
  bool angle_table = true;
  bool design_matrices = true;
  bool two_design = true;
  bool byproducts = true;

  friend bool operator==(const VerifyToggles&, const VerifyToggles&) = default;
};

struct ExperimentConfig {
  RBConfig rb;
  OutputPaths outputs;
  VerifyToggles verify;
  int threads = 1;
  int bootstrap_resamples = 200;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Angle in units of pi ("0.5" is pi/2); arccos(1/sqrt(3)) is written
/// "acos(1/sqrt3)". Values that do not survive the pi scaling exactly are
/// written in radians with an "rad" suffix.
std::string format_angle(double radians);
/// Inverse of format_angle; also accepts "-acos(1/sqrt3)". Throws
/// InvalidArgument on malformed input.
double parse_angle(const std::string& text);

/// JSON text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);
/// Throws InvalidArgument on malformed JSON, unknown keys or invalid values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

/// Tab-separated records after a commented header carrying the toolkit
/// version, the full config and any warnings.
std::string dataset_text(const RBDataset& dataset, const ExperimentConfig& experiment);
RBDataset parse_dataset(const std::string& text, ExperimentConfig* experiment = nullptr);
void write_dataset(const RBDataset& dataset, const ExperimentConfig& experiment,
                   const std::string& path);
RBDataset read_dataset(const std::string& path, ExperimentConfig* experiment = nullptr);

/// JSON report with the fit, the config echo, seed, protocol and version.
std::string fit_report(const DecayFit& fit, const RBDataset& dataset,
                       const ExperimentConfig& experiment);
/// Plot-ready table: s, mean, stderr, model.
std::string decay_table(const std::vector<DecayPoint>& points, const DecayFit& fit,
                        const ExperimentConfig& experiment);

std::string read_text(const std::string& path);
/// Writes through a temporary file and renames it into place.
void write_text(const std::string& path, const std::string& text);

}  // namespace mbrb
