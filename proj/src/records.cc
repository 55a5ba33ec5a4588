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

#include "phidec/records.h"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

namespace phidec {

using nlohmann::json;

json record_to_json(const SurvivalRecord& r) {
  json j;
  j["schema_version"] = kRecordSchemaVersion;
  j["mode"] = std::string(mode_name(r.mode));
  j["L"] = r.L;
  j["p"] = r.p;
  j["q"] = r.q;
  if (r.mode == Mode::kExplicit) j["alpha"] = r.alpha;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["failure_time"] = r.failure_time;
  j["censored"] = r.censored;
  if (r.mode == Mode::kStatic) j["success"] = r.success;
  j["wall_time"] = r.wall_time;
  return j;
}

SurvivalRecord record_from_json(const json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != kRecordSchemaVersion) {
    throw RecordFormatError("record schema_version " +
                            std::to_string(version) + " does not match " +
                            std::to_string(kRecordSchemaVersion));
  }
  SurvivalRecord r;
  r.mode = parse_mode(j.at("mode").get<std::string>());
  r.L = j.at("L").get<int>();
  r.p = j.at("p").get<double>();
  r.q = j.at("q").get<double>();
  r.alpha = j.value("alpha", 0.0);
  r.trial = j.at("trial").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.failure_time = j.at("failure_time").get<double>();
  r.censored = j.at("censored").get<bool>();
  r.success = j.value("success", false);
  r.wall_time = j.at("wall_time").get<double>();
  return r;
}

RecordFile parse_records(std::istream& in) {
  RecordFile out;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      if (i + 1 == lines.size()) {
        out.warnings.push_back("skipped truncated final line " +
                               std::to_string(i + 1));
        break;
      }
      throw RecordFormatError("line " + std::to_string(i + 1) + ": " +
                              e.what());
    }
    if (j.value("type", "") == "header") {
      out.headers.push_back(std::move(j));
      continue;
    }
    try {
      out.records.push_back(record_from_json(j));
    } catch (const json::exception& e) {
      throw RecordFormatError("line " + std::to_string(i + 1) + ": " +
                              e.what());
    }
  }
  return out;
}

RecordFile read_records(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  if (!in) throw RecordFormatError("cannot open " + path);
  return parse_records(in);
}

void write_record(std::ostream& out, const SurvivalRecord& r) {
  out << record_to_json(r).dump() << '\n';
}

void write_records(const std::string& path,
                   const std::vector<SurvivalRecord>& records, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw RecordFormatError("cannot write " + path);
  for (const auto& r : records) write_record(out, r);
}

void write_header(const std::string& path, const json& header) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw RecordFormatError("cannot write " + path);
  out << header.dump() << '\n';
}

void sort_records(std::vector<SurvivalRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const SurvivalRecord& a, const SurvivalRecord& b) {
                     return std::make_tuple(static_cast<int>(a.mode), a.alpha,
                                            a.q, a.L, a.p, a.trial) <
                            std::make_tuple(static_cast<int>(b.mode), b.alpha,
                                            b.q, b.L, b.p, b.trial);
                   });
}

std::vector<SurvivalRecord> merge_record_files(
    const std::vector<std::string>& paths) {
  std::vector<SurvivalRecord> all;
  for (const auto& path : paths) {
    RecordFile f = read_records(path);
    all.insert(all.end(), f.records.begin(), f.records.end());
  }
  sort_records(all);
  return all;
}

void write_curves_csv(std::ostream& out, const std::vector<CurvePoint>& pts) {
  out << "mode,L,p,q,alpha,mean_T,stderr_T,median_T,n_samples,"
         "censored_fraction\n";
  out.precision(10);
  for (const auto& c : pts) {
    out << mode_name(c.mode) << ',' << c.L << ',' << c.p << ',' << c.q << ','
        << c.alpha << ',' << c.mean_T << ',' << c.stderr_T << ','
        << c.median_T << ',' << c.n_samples << ',' << c.censored_fraction
        << '\n';
  }
}

void write_crossings_csv(std::ostream& out,
                         const std::vector<CrossingEstimate>& crossings) {
  out << "L_label,L_small,L_large,p_cross,ci_low,ci_high,n_boot_valid\n";
  out.precision(10);
  for (const auto& c : crossings) {
    out << c.label_L << ',' << c.L_small << ',' << c.L_large << ','
        << c.p_cross << ',' << c.ci_low << ',' << c.ci_high << ','
        << c.n_boot_valid << '\n';
  }
}

void write_fit_report(std::ostream& out, const FitResult& fit,
                      const std::vector<CurvePoint>& points) {
  const FitParams& f = fit.params;
  out.precision(10);
  out << "parameter,value,stddev\n";
  const char* names[] = {"A", "B", "C", "D", "p_fit", "nu", "mu"};
  const auto v = f.to_vector();
  for (int k = 0; k < FitParams::kCount; ++k) {
    out << names[k] << ',' << v(k) << ','
        << std::sqrt(std::max(0.0, fit.covariance(k, k))) << '\n';
  }
  out << "residual_norm," << fit.residual_norm << ",\n";
  out << "iterations," << fit.iterations << ",\n";
  if (fit.p_fit_boot_stddev > 0.0) {
    out << "p_fit_boot_stddev," << fit.p_fit_boot_stddev << ",\n";
    out << "p_fit_boot_low," << fit.p_fit_boot_low << ",\n";
    out << "p_fit_boot_high," << fit.p_fit_boot_high << ",\n";
  }
  out << "\nL,p,mean_T,stderr_T,model_T\n";
  for (const auto& c : points) {
    out << c.L << ',' << c.p << ',' << c.mean_T << ',' << c.stderr_T << ','
        << f.evaluate(c.L, c.p) << '\n';
  }
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t mix(std::uint64_t h, double v) {
  return mix(h, std::bit_cast<std::uint64_t>(v));
}

}  // namespace

std::string cell_key(const CellSpec& cell, std::uint64_t master_seed) {
  const DecoderParams& d = cell.params;
  std::uint64_t h = 0;
  h = mix(h, static_cast<std::uint64_t>(d.field_height()));
  h = mix(h, d.kappa);
  h = mix(h, static_cast<std::uint64_t>(d.k_ver));
  h = mix(h, static_cast<std::uint64_t>(d.verify_stride));
  h = mix(h, static_cast<std::uint64_t>(d.exponential_waiting));
  h = mix(h, d.rates.gamma_x);
  h = mix(h, d.rates.gamma_m);
  h = mix(h, d.rates.gamma_a);
  h = mix(h, d.rates.gamma_base);
  h = mix(h, cell.cap);
  char buf[160];
  if (cell.mode == Mode::kExplicit) {
    std::snprintf(buf, sizeof buf, "%s_L%d_p%.10g_q%.10g_a%.10g_s%llu_%016llx",
                  std::string(mode_name(cell.mode)).c_str(), d.L, cell.p,
                  cell.q, d.field.alpha,
                  static_cast<unsigned long long>(master_seed),
                  static_cast<unsigned long long>(h));
  } else {
    std::snprintf(buf, sizeof buf, "%s_L%d_p%.10g_q%.10g_s%llu_%016llx",
                  std::string(mode_name(cell.mode)).c_str(), d.L, cell.p,
                  cell.q, static_cast<unsigned long long>(master_seed),
                  static_cast<unsigned long long>(h));
  }
  return buf;
}

std::vector<SurvivalRecord> run_checkpointed(const CellSpec& cell,
                                             std::size_t n,
                                             std::uint64_t master_seed,
                                             int workers,
                                             const std::string& checkpoint) {
  validate_cell(cell);
  RecordFile previous = read_records(checkpoint);
  std::map<std::uint64_t, SurvivalRecord> by_trial;
  for (const auto& r : previous.records) {
    if (r.trial < n) by_trial.emplace(r.trial, r);
  }
  if (!previous.warnings.empty()) {
    // Drop the torn tail so later appends do not bury it mid-file.
    std::ofstream out(checkpoint, std::ios::trunc);
    for (const auto& h : previous.headers) out << h.dump() << '\n';
    for (const auto& r : previous.records) write_record(out, r);
  }
  std::vector<std::uint64_t> done;
  for (const auto& [t, r] : by_trial) done.push_back(t);
  std::ofstream out(checkpoint, std::ios::app);
  if (!out) throw RecordFormatError("cannot write " + checkpoint);
  const auto fresh = run_trials(cell, n, master_seed, workers, done,
                                [&out](const SurvivalRecord& r) {
                                  write_record(out, r);
                                  out.flush();
                                });
  for (const auto& r : fresh) by_trial.emplace(r.trial, r);
  std::vector<SurvivalRecord> result;
  result.reserve(by_trial.size());
  for (auto& [t, r] : by_trial) result.push_back(std::move(r));
  return result;
}

}  // namespace phidec
