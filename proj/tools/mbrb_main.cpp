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

// mbrb: randomized benchmarking of single-qubit MBQC wires.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbrb/error.hpp"
#include "mbrb/fit.hpp"
#include "mbrb/gatesets.hpp"
#include "mbrb/io.hpp"
#include "mbrb/rb.hpp"
#include "mbrb/rng.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kIo = 2;

constexpr double kDesignTol = 1e-9;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  bool quiet = false;
  // verify
  bool inject_pauli_design = false;
  bool corrupt_table = false;
  // fit
  std::string dataset;
  std::string table;
  std::optional<int> resamples;
  // oracle
  std::vector<int> lengths;
};

void report(const Options& opt, bool pass, const std::string& check, const std::string& detail) {
  if (opt.quiet && pass) return;
  std::printf("%s %s  %s\n", pass ? "PASS" : "FAIL", check.c_str(), detail.c_str());
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

int cmd_verify(const Options& opt) {
  mbrb::VerifyToggles toggles;
  if (!opt.config.empty()) toggles = mbrb::load_config(opt.config).verify;
  bool all = true;

  if (toggles.angle_table) {
    std::vector<mbrb::AngleRow> table(mbrb::clifford_angle_table().begin(),
                                      mbrb::clifford_angle_table().end());
    if (opt.corrupt_table) table[7].turns[1] = (table[7].turns[1] + 1) % 4;
    try {
      const auto r = mbrb::verify_angle_table(table);
      report(opt, true, "angle-table",
             std::to_string(r.rows.size()) + " rows, max deviation " + sci(r.max_deviation));
    } catch (const mbrb::VerificationFailure& e) {
      report(opt, false, "angle-table", e.what());
      all = false;
    }
  }

  const mbrb::DerandomizedDesign design = mbrb::derandomized_design();
  if (toggles.design_matrices) {
    const auto r = mbrb::check_design_matrices(design);
    report(opt, r.pass, "design-matrices",
           "max deviation " + sci(r.max_deviation) + ", property error " +
               sci(r.max_property_error));
    all = all && r.pass;
  }

  if (toggles.two_design) {
    const std::vector<mbrb::Unitary2> clifford = mbrb::clifford_unitaries();
    const std::vector<mbrb::Unitary2> derand =
        opt.inject_pauli_design ? mbrb::pauli_group() : design.element_list();
    for (const auto& [name, set] :
         {std::pair{std::string("2-design clifford"), clifford},
          std::pair{std::string("2-design derandomized"), derand}}) {
      const auto r = mbrb::check_2design(set, kDesignTol);
      report(opt, r.pass, name,
             "frame potential " + std::to_string(r.frame_potential) + ", off-target " +
                 sci(r.max_off_target) + ", fidelity gap " + sci(r.max_fidelity_gap));
      all = all && r.pass;
    }
  }

  if (toggles.byproducts) {
    const auto r = mbrb::verify_byproducts();
    report(opt, r.pass(), "byproducts",
           std::to_string(r.combinations) + " combinations, " + std::to_string(r.mismatches) +
               " mismatches");
    all = all && r.pass();
  }
  return all ? kOk : kValidation;
}

mbrb::ExperimentConfig load_with_overrides(const Options& opt) {
  if (opt.config.empty()) throw mbrb::InvalidArgument("--config is required");
  mbrb::ExperimentConfig e = mbrb::load_config(opt.config);
  if (opt.seed) e.rb.seed = *opt.seed;
  if (opt.threads && *opt.threads < 1) throw mbrb::InvalidArgument("--threads must be positive");
  return e;
}

int thread_count(const Options& opt, const mbrb::ExperimentConfig& e) {
  return opt.threads ? *opt.threads : e.threads;
}

int cmd_run(const Options& opt) {
  mbrb::ExperimentConfig e = load_with_overrides(opt);
  const std::string out = opt.out.empty() ? e.outputs.dataset : opt.out;
  if (out.empty()) throw mbrb::InvalidArgument("no output path: pass --out or set outputs.dataset");
  const mbrb::RBDataset ds = mbrb::run_protocol(e.rb, thread_count(opt, e));
  mbrb::write_dataset(ds, e, out);
  for (const auto& w : ds.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!opt.quiet) {
    std::printf("wrote %zu records (%zu lengths) to %s\n", ds.records.size(),
                e.rb.lengths.size(), out.c_str());
  }
  return kOk;
}

int cmd_fit(const Options& opt) {
  mbrb::ExperimentConfig e;
  const mbrb::RBDataset ds = mbrb::read_dataset(opt.dataset, &e);
  const auto points = mbrb::decay_points(ds);
  mbrb::DecayFit fit = mbrb::fit_decay(points);
  const int resamples = opt.resamples ? *opt.resamples : e.bootstrap_resamples;
  if (resamples > 0) {
    const std::uint64_t seed = opt.seed ? *opt.seed : ds.config.seed;
    mbrb::CounterRng rng = mbrb::CounterRng::stream(seed, {3});
    fit.ci_p = mbrb::bootstrap_ci(ds, resamples, rng);
  } else {
    fit.ci_p = {fit.p, fit.p};
  }
  const std::string text = mbrb::fit_report(fit, ds, e);
  if (opt.out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    mbrb::write_text(opt.out, text);
    if (!opt.quiet) {
      std::printf("p = %.6f, avg_fidelity = %.6f, 95%% CI for p [%.6f, %.6f]%s%s\n", fit.p,
                  fit.avg_fidelity, fit.ci_p.first, fit.ci_p.second,
                  fit.degenerate ? " (degenerate)" : "", fit.clamped ? " (clamped)" : "");
    }
  }
  if (!opt.table.empty()) mbrb::write_text(opt.table, mbrb::decay_table(points, fit, e));
  return kOk;
}

int cmd_oracle(const Options& opt) {
  const mbrb::ExperimentConfig e = load_with_overrides(opt);
  std::vector<int> lengths = opt.lengths.empty() ? e.rb.lengths : opt.lengths;
  nlohmann::json j;
  j["toolkit_version"] = mbrb::kToolkitVersion;
  j["protocol"] = mbrb::to_string(e.rb.protocol);
  j["config"] = nlohmann::json::parse(mbrb::serialize_config(e));
  j["results"] = nlohmann::json::array();
  for (int s : lengths) {
    const auto r = mbrb::exact_sequence_fidelity(e.rb, s);
    j["results"].push_back(
        {{"length", s}, {"enumerated", r.enumerated}, {"analytic", r.analytic}, {"leaves", r.leaves}});
    if (!opt.quiet && !opt.out.empty()) {
      std::printf("s = %d: enumerated %.12f, analytic %.12f (%llu leaves)\n", s, r.enumerated,
                  r.analytic, static_cast<unsigned long long>(r.leaves));
    }
  }
  const std::string text = j.dump(2) + "\n";
  if (opt.out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    mbrb::write_text(opt.out, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized benchmarking of single-qubit MBQC wires"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--quiet", opt.quiet, "Only print failures and errors");
  };

  auto* verify = app.add_subcommand("verify", "Check the angle table, design matrices, "
                                              "2-design property and byproduct formulas");
  verify->add_option("--config", opt.config, "Config whose verify toggles select checks");
  verify->add_flag("--inject-pauli-design", opt.inject_pauli_design)->group("");
  verify->add_flag("--corrupt-table", opt.corrupt_table)->group("");
  add_common(verify);

  auto* run = app.add_subcommand("run", "Simulate an RB experiment and write its dataset");
  run->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  run->add_option("--seed", opt.seed, "Override the config seed");
  run->add_option("--out", opt.out, "Dataset path (overrides outputs.dataset)");
  run->add_option("--threads", opt.threads, "Worker threads");
  add_common(run);

  auto* fit = app.add_subcommand("fit", "Fit the decay model to a dataset");
  fit->add_option("dataset", opt.dataset, "Dataset written by 'run'")->required();
  fit->add_option("--out", opt.out, "Report path (stdout when omitted)");
  fit->add_option("--table", opt.table, "Write the per-length decay table here");
  fit->add_option("--resamples", opt.resamples, "Bootstrap resamples (0 disables)");
  fit->add_option("--seed", opt.seed, "Bootstrap seed (defaults to the dataset seed)");
  add_common(fit);

  auto* oracle = app.add_subcommand("oracle", "Exact sequence fidelity by enumeration");
  oracle->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  oracle->add_option("--length", opt.lengths, "Sequence lengths (defaults to the config's)");
  oracle->add_option("--seed", opt.seed, "Override the config seed");
  oracle->add_option("--out", opt.out, "Result path (stdout when omitted)");
  oracle->add_option("--threads", opt.threads, "Accepted for symmetry; enumeration is serial");
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*verify) return cmd_verify(opt);
    if (*run) return cmd_run(opt);
    if (*fit) return cmd_fit(opt);
    if (*oracle) return cmd_oracle(opt);
  } catch (const mbrb::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  }
  return kValidation;
}
