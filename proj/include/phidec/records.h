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

#ifndef PHIDEC_RECORDS_H_
#define PHIDEC_RECORDS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "phidec/analysis.h"
#include "phidec/engine.h"

namespace phidec {

inline constexpr int kRecordSchemaVersion = 1;

class RecordFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json record_to_json(const SurvivalRecord& r);
SurvivalRecord record_from_json(const nlohmann::json& j);

struct RecordFile {
  std::vector<SurvivalRecord> records;
  std::vector<nlohmann::json> headers;
  std::vector<std::string> warnings;
};

// One JSON object per line. Lines with "type": "header" are run headers.
// A schema_version other than kRecordSchemaVersion is an error; an
// unparsable final line (a truncated append) is skipped with a warning.
RecordFile parse_records(std::istream& in);
// A missing or empty file yields an empty set.
RecordFile read_records(const std::string& path);

void write_record(std::ostream& out, const SurvivalRecord& r);
void write_records(const std::string& path,
                   const std::vector<SurvivalRecord>& records,
                   bool append = true);
void write_header(const std::string& path, const nlohmann::json& header);

// Orders records by (mode, alpha, q, L, p, trial).
void sort_records(std::vector<SurvivalRecord>& records);

// Concatenates per-worker files and returns the deterministic merge order.
std::vector<SurvivalRecord> merge_record_files(
    const std::vector<std::string>& paths);

// Comma-separated tables with a header row.
void write_curves_csv(std::ostream& out, const std::vector<CurvePoint>& pts);
void write_crossings_csv(std::ostream& out,
                         const std::vector<CrossingEstimate>& crossings);
void write_fit_report(std::ostream& out, const FitResult& fit,
                      const std::vector<CurvePoint>& points);

// File-name-safe key for a cell and master seed. Decoder parameters that
// change trajectories (height, kappa, k_ver, stride, rates, waiting mode,
// cap) enter through a hash suffix.
std::string cell_key(const CellSpec& cell, std::uint64_t master_seed);

// Runs trials [0, n) of `cell`, appending each finished record to
// `checkpoint` as it completes. Trials already present in the file are
// skipped, so an interrupted run resumes where it stopped. Returns the
// records with trial < n, one per trial, in trial order.
std::vector<SurvivalRecord> run_checkpointed(const CellSpec& cell,
                                             std::size_t n,
                                             std::uint64_t master_seed,
                                             int workers,
                                             const std::string& checkpoint);

}  // namespace phidec

#endif  // PHIDEC_RECORDS_H_
