// Copyright 2026 The phidecoder Authors
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

// phidec: simulate, analyze and inspect phi-automaton decoders.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "phidec/analysis.h"
#include "phidec/config.h"
#include "phidec/phi_field.h"
#include "phidec/records.h"
#include "phidec/toric_code.h"

namespace phidec {
namespace {

namespace fs = std::filesystem;

struct SimulateArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> verify_stride;
  std::optional<std::size_t> samples;
  std::optional<double> cap;
  std::string output;
  bool quiet = false;
};

struct ToomArgs {
  std::vector<int> L = {4};
  std::vector<double> p = {0.02};
  std::size_t samples = 100;
  double cap = 1e7;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output;
  bool quiet = false;
};

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string mode;
  std::optional<double> alpha;
  bool exclude_censored = false;
  std::size_t n_boot = 1000;
  std::uint64_t seed = 1;
  std::string output;
  std::string curves;
  bool log_target = false;
};

struct FieldDumpArgs {
  int L = 8;
  int height = 0;
  std::vector<std::string> anyons;
  int steps = 0;
  std::optional<double> alpha;
  std::string output;
};

// Runs every cell of `config` with per-cell checkpoints under
// <output>.ckpt/, then writes header plus sorted records to the output.
int run_simulation(const RunConfig& config, bool quiet) {
  if (config.output.empty()) {
    throw ConfigError("output", "no output path given");
  }
  const nlohmann::json header = run_header(config);
  if (!quiet) std::cerr << header.dump() << '\n';
  const fs::path ckpt_dir = config.output + ".ckpt";
  fs::create_directories(ckpt_dir);
  std::vector<SurvivalRecord> all;
  for (const CellSpec& cell : config.cells()) {
    const auto start = std::chrono::steady_clock::now();
    const std::string key = cell_key(cell, config.seed);
    const std::string path = (ckpt_dir / (key + ".jsonl")).string();
    const auto records = run_checkpointed(cell, config.samples, config.seed,
                                          config.workers, path);
    if (records.size() != config.samples) {
      std::cerr << "error: cell " << key << " produced " << records.size()
                << " of " << config.samples << " records\n";
      return 1;
    }
    all.insert(all.end(), records.begin(), records.end());
    if (!quiet) {
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
      std::cerr << "cell " << key << ": " << records.size() << " records ("
                << secs << " s)\n";
    }
  }
  sort_records(all);
  const std::string tmp = config.output + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw RecordFormatError("cannot write " + tmp);
    out << header.dump() << '\n';
    for (const auto& r : all) write_record(out, r);
    if (!out) throw RecordFormatError("write failed for " + tmp);
  }
  fs::rename(tmp, config.output);
  return 0;
}

int cmd_simulate(const SimulateArgs& a) {
  RunConfig config = load_config(a.config_path);
  if (a.seed) config.seed = *a.seed;
  if (a.workers) config.workers = *a.workers;
  if (a.verify_stride) config.verify_stride = *a.verify_stride;
  if (a.samples) config.samples = *a.samples;
  if (a.cap) config.cap = *a.cap;
  if (!a.output.empty()) config.output = a.output;
  config.validate();
  return run_simulation(config, a.quiet);
}

int cmd_toom(const ToomArgs& a) {
  RunConfig config;
  config.mode = Mode::kToom;
  config.L = a.L;
  config.p = a.p;
  config.q_equals_p = false;
  config.samples = a.samples;
  config.cap = a.cap;
  config.seed = a.seed;
  config.workers = a.workers;
  config.output = a.output;
  config.validate();
  return run_simulation(config, a.quiet);
}

// Curve points of one (mode, alpha) family from the input files.
std::vector<CurvePoint> load_family(const AnalyzeArgs& a) {
  std::vector<SurvivalRecord> records = merge_record_files(a.inputs);
  if (!a.mode.empty()) {
    const Mode m = parse_mode(a.mode);
    std::erase_if(records, [m](const SurvivalRecord& r) { return r.mode != m; });
  }
  if (a.alpha) {
    std::erase_if(records, [&](const SurvivalRecord& r) {
      return std::abs(r.alpha - *a.alpha) > 1e-12;
    });
  }
  if (records.empty()) throw AnalysisError("no records match the selection");
  std::set<std::tuple<int, double>> families;
  for (const auto& r : records) {
    families.emplace(static_cast<int>(r.mode), r.alpha);
  }
  if (families.size() > 1) {
    throw AnalysisError(
        "records mix several modes or alpha values; select one with --mode "
        "and --alpha");
  }
  const CurveSet curves = estimate_curves(
      records, a.exclude_censored ? CensorPolicy::kExclude
                                  : CensorPolicy::kIncludeAtCap);
  for (const auto& w : curves.warnings) std::cerr << "warning: " << w << '\n';
  if (!a.curves.empty()) {
    std::ofstream out(a.curves);
    if (!out) throw RecordFormatError("cannot write " + a.curves);
    write_curves_csv(out, curves.points);
  }
  return curves.points;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw RecordFormatError("cannot write " + path);
  fn(out);
}

int cmd_crossings(const AnalyzeArgs& a) {
  const auto points = load_family(a);
  const auto table = crossing_table(points, a.n_boot, a.seed);
  with_output(a.output, [&](std::ostream& out) {
    write_crossings_csv(out, table);
  });
  if (table.empty()) {
    std::cerr << "error: no pair of consecutive sizes crosses\n";
    return 1;
  }
  return 0;
}

int cmd_fit(const AnalyzeArgs& a) {
  const auto points = load_family(a);
  FitOptions opt;
  opt.log_target = a.log_target;
  opt.n_boot = a.n_boot;
  opt.seed = a.seed;
  const FitResult fit = fit_scaling(points, initial_guess(points), opt);
  with_output(a.output, [&](std::ostream& out) {
    write_fit_report(out, fit, points);
  });
  return 0;
}

Site parse_site(const std::string& text) {
  int x = 0;
  int y = 0;
  char sep = 0;
  if (std::sscanf(text.c_str(), "%d%c%d", &x, &sep, &y) != 3 || sep != ',') {
    throw std::invalid_argument("anyon '" + text + "' is not of the form x,y");
  }
  return {x, y};
}

int cmd_field_dump(const FieldDumpArgs& a) {
  const Lattice lattice(a.L);
  SyndromePlane sources(lattice.num_sites(), 0);
  for (const auto& text : a.anyons) {
    const Site s = parse_site(text);
    if (s.x < 0 || s.y < 0 || s.x >= a.L || s.y >= a.L) {
      throw std::invalid_argument("anyon '" + text + "' lies off the lattice");
    }
    sources[lattice.site_index(s)] = 1;
  }
  if (a.alpha) {
    if (!(*a.alpha > 0)) throw std::invalid_argument("alpha must be > 0");
    PhiField plane(a.L, 1);
    const auto values = explicit_field(lattice, sources, *a.alpha);
    std::copy(values.begin(), values.end(), plane.mutable_values().begin());
    with_output(a.output,
                [&](std::ostream& out) { write_field_snapshot(out, plane); });
    return 0;
  }
  const int H = a.height > 0 ? a.height : default_field_height(a.L);
  PhiField field(a.L, H);
  if (a.steps > 0) {
    for (int i = 0; i < a.steps; ++i) field_step(field, sources);
  } else {
    // Iterate to the fixed point.
    std::vector<double> prev;
    for (int i = 0; i < 10'000'000; ++i) {
      prev.assign(field.values().begin(), field.values().end());
      field_step(field, sources);
      double diff = 0;
      for (std::size_t k = 0; k < prev.size(); ++k) {
        diff = std::max(diff, std::abs(field.values()[k] - prev[k]));
      }
      if (diff < 1e-13) break;
    }
  }
  with_output(a.output,
              [&](std::ostream& out) { write_field_snapshot(out, field); });
  return 0;
}

void add_analyze_options(CLI::App* app, AnalyzeArgs& a) {
  app->add_option("records", a.inputs, "Record files (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--mode", a.mode, "Only use records of this mode");
  app->add_option("--alpha", a.alpha, "Only use records with this alpha");
  app->add_flag("--exclude-censored", a.exclude_censored,
                "Drop censored runs instead of counting them at the cap");
  app->add_option("--n-boot", a.n_boot, "Bootstrap replicates");
  app->add_option("--seed", a.seed, "Bootstrap seed");
  app->add_option("-o,--output", a.output, "Output CSV (default stdout)");
  app->add_option("--curves", a.curves, "Also write the curve table here");
}

}  // namespace
}  // namespace phidec

int main(int argc, char** argv) {
  using namespace phidec;
  CLI::App app{"phi-automaton toric code decoder simulations"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a config's cells");
  simulate->add_option("config", sim.config_path, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Override the master seed");
  simulate->add_option("--workers", sim.workers, "Override the worker count");
  simulate->add_option("--verify-stride", sim.verify_stride,
                       "Override the verification stride");
  simulate->add_option("--samples", sim.samples, "Override samples per cell");
  simulate->add_option("--cap", sim.cap, "Override the censoring cap");
  simulate->add_option("-o,--output", sim.output, "Override the output path");
  simulate->add_flag("-q,--quiet", sim.quiet, "No progress on stderr");

  auto* analyze = app.add_subcommand("analyze", "Analyze record files");
  analyze->require_subcommand(1);
  AnalyzeArgs cross_args;
  auto* crossings =
      analyze->add_subcommand("crossings", "Crossings of consecutive sizes");
  add_analyze_options(crossings, cross_args);
  AnalyzeArgs fit_args;
  fit_args.n_boot = 0;
  auto* fit = analyze->add_subcommand("fit", "Finite-size scaling fit");
  add_analyze_options(fit, fit_args);
  fit->add_flag("--log-target", fit_args.log_target, "Fit log T instead of T");

  FieldDumpArgs dump;
  auto* field_dump =
      app.add_subcommand("field-dump", "Write a field snapshot for sources");
  field_dump->add_option("--L", dump.L, "Lattice size")->check(
      CLI::Range(2, 4096));
  field_dump->add_option("--height", dump.height, "Field height (0: default)")
      ->check(CLI::NonNegativeNumber);
  field_dump->add_option("--anyon", dump.anyons, "Source site x,y (repeat)");
  field_dump->add_option("--steps", dump.steps,
                         "Field sweeps from zero (0: to convergence)")
      ->check(CLI::NonNegativeNumber);
  field_dump->add_option("--alpha", dump.alpha,
                         "Dump the explicit 1/r^alpha plane instead");
  field_dump->add_option("-o,--output", dump.output, "Output file");

  ToomArgs toom;
  auto* toom_cmd = app.add_subcommand("toom", "Toom NEC survival times");
  toom_cmd->add_option("--L", toom.L, "Grid sizes");
  toom_cmd->add_option("--p", toom.p, "Flip probabilities");
  toom_cmd->add_option("--samples", toom.samples, "Trials per cell");
  toom_cmd->add_option("--cap", toom.cap, "Censoring cap");
  toom_cmd->add_option("--seed", toom.seed, "Master seed");
  toom_cmd->add_option("--workers", toom.workers, "Worker threads");
  toom_cmd->add_option("-o,--output", toom.output, "Output records")
      ->required();
  toom_cmd->add_flag("-q,--quiet", toom.quiet, "No progress on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (crossings->parsed()) return cmd_crossings(cross_args);
    if (fit->parsed()) return cmd_fit(fit_args);
    if (field_dump->parsed()) return cmd_field_dump(dump);
    if (toom_cmd->parsed()) return cmd_toom(toom);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
