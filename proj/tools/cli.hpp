// Copyright 2026 The insitu-control Authors
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

#ifndef INSITU_CLI_HPP
#define INSITU_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "insitu/harness.hpp"

namespace insitu::cli {

/// Raised for malformed config documents; the message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitRange {
  std::int64_t k_lo = 0;
  std::int64_t k_hi = 0;
};

/// Flag-level overrides; any value set here wins over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::int64_t> iterations;
  std::optional<std::int64_t> shots;
  std::optional<double> sigma;
  std::optional<std::string> schedule;   // "A" | "B"
  std::optional<std::string> problem;    // "qubit" | "cnot"
  std::optional<std::string> optimizer;  // "acronym" | "nm" | "exsitu"
};

/// Parses a config document, rejecting unknown keys at every level. The
/// optional "fit" object requests a power-law fit from cmd_run/cmd_compare.
ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  std::optional<FitRange>* fit = nullptr);

/// Fully resolved config (all defaults applied); reparsing it reproduces the
/// experiment bit for bit.
nlohmann::json config_to_json(const ExperimentConfig& config);

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

inline constexpr const char* kSeriesSchema = "insitu-series v1";
inline constexpr const char* kSweepSchema = "insitu-sweep v1";
inline constexpr const char* kFitSchema = "insitu-fit v1";

void write_series_csv(std::ostream& out, const AggregateSeries& series,
                      const nlohmann::json& config);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const nlohmann::json& config);

struct SeriesFile {
  AggregateSeries series;
  nlohmann::json config;
};

SeriesFile read_series_csv(std::istream& in);

nlohmann::json fit_to_json(const PowerLawFit& fit, bool floor_clamped,
                           const nlohmann::json& config);

/// Subcommand entry points. Diagnostics go to `err`; results and summaries to
/// files and `out`. All return 0 on success and nonzero on failure without
/// leaving partial output behind.
int cmd_run(const std::string& config_path, const Overrides& overrides,
            std::optional<FitRange> fit_range, const std::string& out_path, int workers,
            std::ostream& out, std::ostream& err);

int cmd_sweep(const std::string& config_path, const Overrides& overrides,
              const std::vector<std::int64_t>& shots, const std::string& out_path,
              int workers, std::ostream& out, std::ostream& err);

int cmd_fit(const std::string& series_path, std::optional<std::int64_t> k_lo,
            std::optional<std::int64_t> k_hi, const std::string& out_path,
            std::ostream& out, std::ostream& err);

int cmd_compare(const std::string& config_path, const Overrides& overrides,
                std::optional<FitRange> fit_range, const std::string& out_stem,
                int workers, std::ostream& out, std::ostream& err);

/// Parses a comma-separated shot list, dropping duplicates with a warning on
/// `err`. Returns std::nullopt on malformed input.
std::optional<std::vector<std::int64_t>> parse_shot_list(const std::string& text,
                                                         std::ostream& err);

}  // namespace insitu::cli

#endif
