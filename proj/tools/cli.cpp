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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace insitu::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config error: '" + context + "' must be an object");
  }
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw ConfigError("config error: unknown key '" + item.key() + "' in '" + context +
                        "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& context, const char* key, T fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config error: key '" + std::string(key) + "' in '" + context +
                      "' has the wrong type");
  }
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

ProblemKind parse_problem_kind(const std::string& text) {
  if (text == "qubit") return ProblemKind::SingleQubit;
  if (text == "cnot") return ProblemKind::Cnot;
  throw ConfigError("config error: key 'type' in 'problem' must be 'qubit' or 'cnot'");
}

TargetKind parse_target_kind(const std::string& text) {
  if (text == "haar") return TargetKind::Haar;
  if (text == "cnot") return TargetKind::Cnot;
  if (text == "reachable") return TargetKind::Reachable;
  throw ConfigError(
      "config error: key 'target' in 'problem' must be 'haar', 'cnot' or 'reachable'");
}

OptimizerKind parse_optimizer_kind(const std::string& text) {
  if (text == "acronym") return OptimizerKind::Acronym;
  if (text == "nm") return OptimizerKind::NelderMead;
  if (text == "exsitu") return OptimizerKind::ExSitu;
  throw ConfigError(
      "config error: key 'type' in 'optimizer' must be 'acronym', 'nm' or 'exsitu'");
}

GainSchedule parse_schedule_label(const std::string& text, const std::string& context) {
  if (text == "A") return GainSchedule::set_a();
  if (text == "B") return GainSchedule::set_b();
  throw ConfigError("config error: key 'schedule' in '" + context + "' must be 'A' or 'B'");
}

InitKind parse_init_kind(const std::string& text) {
  if (text == "zero") return InitKind::Zero;
  if (text == "uniform") return InitKind::Uniform;
  throw ConfigError("config error: key 'init' must be 'zero' or 'uniform'");
}

std::string target_label(TargetKind kind) {
  switch (kind) {
    case TargetKind::Haar: return "haar";
    case TargetKind::Cnot: return "cnot";
    case TargetKind::Reachable: return "reachable";
  }
  return "haar";
}

// Atomic-ish output: collect everything in memory, then write in one go so a
// failed run leaves no partial file.
int write_file(const std::string& path, const std::string& contents, std::ostream& err) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    err << "error: cannot open output file '" << path << "'\n";
    return 1;
  }
  out << contents;
  out.flush();
  if (!out.good()) {
    err << "error: failed writing output file '" << path << "'\n";
    return 1;
  }
  return 0;
}

std::string json_sidecar_path(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  if (dot != std::string::npos && csv_path.substr(dot) == ".csv") {
    return csv_path.substr(0, dot) + ".json";
  }
  return csv_path + ".json";
}

int load_config(const std::string& config_path, const Overrides& overrides,
                std::optional<FitRange>* fit, ExperimentConfig& config, std::ostream& err) {
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        err << "error: cannot open config file '" << config_path << "'\n";
        return 1;
      }
      json doc;
      try {
        in >> doc;
      } catch (const json::exception& e) {
        err << "error: config file '" << config_path << "' is not valid JSON: " << e.what()
            << "\n";
        return 1;
      }
      config = config_from_json(doc, fit);
    }
    apply_overrides(config, overrides);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
  return 0;
}

FitRange resolve_fit_range(const std::optional<FitRange>& requested, std::int64_t k_max) {
  if (requested.has_value() && requested->k_hi != 0) {
    return *requested;
  }
  // Default range skips the first decade of iterations (the transient).
  FitRange range;
  range.k_lo = requested.has_value() && requested->k_lo != 0 ? requested->k_lo
                                                             : std::min<std::int64_t>(10, k_max);
  range.k_hi = k_max;
  return range;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc, std::optional<FitRange>* fit) {
  ExperimentConfig config;
  check_keys(doc, "config",
             {"problem", "optimizer", "estimator", "stopping", "init", "trials", "seed",
              "grid_per_decade", "fit"});

  if (doc.contains("problem")) {
    const json& p = doc.at("problem");
    check_keys(p, "problem",
               {"type", "segments", "omega0", "delta1", "delta2", "coupling", "dt",
                "target"});
    config.problem.kind =
        parse_problem_kind(get_or<std::string>(p, "problem", "type", "qubit"));
    config.problem.segments = get_or<int>(p, "problem", "segments", 10);
    config.problem.omega0 = get_or<double>(p, "problem", "omega0", 1.0);
    config.problem.delta1 = get_or<double>(p, "problem", "delta1", 1.0);
    config.problem.delta2 = get_or<double>(p, "problem", "delta2", -1.0);
    config.problem.coupling = get_or<double>(p, "problem", "coupling", 0.1);
    config.problem.dt = get_or<double>(p, "problem", "dt", 1.0);
    const std::string default_target =
        config.problem.kind == ProblemKind::Cnot ? "cnot" : "haar";
    config.problem.target =
        parse_target_kind(get_or<std::string>(p, "problem", "target", default_target));
  }

  if (doc.contains("optimizer")) {
    const json& o = doc.at("optimizer");
    check_keys(o, "optimizer",
               {"type", "schedule", "a", "b", "s", "t", "model_mismatch_norm", "fd_step",
                "step_size"});
    config.optimizer.kind =
        parse_optimizer_kind(get_or<std::string>(o, "optimizer", "type", "acronym"));
    if (o.contains("schedule")) {
      config.optimizer.schedule = parse_schedule_label(
          get_or<std::string>(o, "optimizer", "schedule", "B"), "optimizer");
    }
    config.optimizer.schedule.a =
        get_or<double>(o, "optimizer", "a", config.optimizer.schedule.a);
    config.optimizer.schedule.b =
        get_or<double>(o, "optimizer", "b", config.optimizer.schedule.b);
    config.optimizer.schedule.s =
        get_or<double>(o, "optimizer", "s", config.optimizer.schedule.s);
    config.optimizer.schedule.t =
        get_or<double>(o, "optimizer", "t", config.optimizer.schedule.t);
    config.optimizer.model_mismatch_norm =
        get_or<double>(o, "optimizer", "model_mismatch_norm", 0.01);
    config.optimizer.ex_situ.fd_step = get_or<double>(o, "optimizer", "fd_step", 1e-6);
    config.optimizer.ex_situ.step_size = get_or<double>(o, "optimizer", "step_size", 1.0);
  }

  if (doc.contains("estimator")) {
    const json& e = doc.at("estimator");
    check_keys(e, "estimator", {"shots", "control_noise_sigma"});
    config.estimator.shots = get_or<std::int64_t>(e, "estimator", "shots", 1000);
    config.estimator.control_noise_sigma =
        get_or<double>(e, "estimator", "control_noise_sigma", 0.0);
  }

  if (doc.contains("stopping")) {
    const json& s = doc.at("stopping");
    check_keys(s, "stopping", {"max_iterations", "epsilon"});
    config.stopping.max_iterations =
        get_or<std::int64_t>(s, "stopping", "max_iterations", 10000);
    if (s.contains("epsilon") && !s.at("epsilon").is_null()) {
      config.stopping.epsilon = get_or<double>(s, "stopping", "epsilon", 0.0);
    }
  }

  config.init = parse_init_kind(get_or<std::string>(doc, "config", "init", "zero"));
  config.trials = get_or<int>(doc, "config", "trials", 20);
  config.seed = get_or<std::uint64_t>(doc, "config", "seed", 42);
  config.grid_per_decade = get_or<int>(doc, "config", "grid_per_decade", 50);

  if (doc.contains("fit")) {
    const json& f = doc.at("fit");
    check_keys(f, "fit", {"k_lo", "k_hi"});
    FitRange range;
    range.k_lo = get_or<std::int64_t>(f, "fit", "k_lo", 0);
    range.k_hi = get_or<std::int64_t>(f, "fit", "k_hi", 0);
    if (fit != nullptr) {
      *fit = range;
    }
  }
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  json problem;
  problem["type"] = config.problem.kind == ProblemKind::Cnot ? "cnot" : "qubit";
  problem["segments"] = config.problem.segments;
  if (config.problem.kind == ProblemKind::SingleQubit) {
    problem["omega0"] = config.problem.omega0;
  } else {
    problem["delta1"] = config.problem.delta1;
    problem["delta2"] = config.problem.delta2;
    problem["coupling"] = config.problem.coupling;
  }
  problem["dt"] = config.problem.dt;
  problem["target"] = target_label(config.problem.target);

  json optimizer;
  switch (config.optimizer.kind) {
    case OptimizerKind::Acronym:
      optimizer["type"] = "acronym";
      optimizer["a"] = config.optimizer.schedule.a;
      optimizer["b"] = config.optimizer.schedule.b;
      optimizer["s"] = config.optimizer.schedule.s;
      optimizer["t"] = config.optimizer.schedule.t;
      break;
    case OptimizerKind::NelderMead:
      optimizer["type"] = "nm";
      break;
    case OptimizerKind::ExSitu:
      optimizer["type"] = "exsitu";
      optimizer["model_mismatch_norm"] = config.optimizer.model_mismatch_norm;
      optimizer["fd_step"] = config.optimizer.ex_situ.fd_step;
      optimizer["step_size"] = config.optimizer.ex_situ.step_size;
      break;
  }

  json estimator;
  estimator["shots"] = config.estimator.shots;
  estimator["control_noise_sigma"] = config.estimator.control_noise_sigma;

  json stopping;
  stopping["max_iterations"] = config.stopping.max_iterations;
  if (config.stopping.epsilon.has_value()) {
    stopping["epsilon"] = *config.stopping.epsilon;
  } else {
    stopping["epsilon"] = nullptr;
  }

  json doc;
  doc["problem"] = problem;
  doc["optimizer"] = optimizer;
  doc["estimator"] = estimator;
  doc["stopping"] = stopping;
  doc["init"] = config.init == InitKind::Uniform ? "uniform" : "zero";
  doc["trials"] = config.trials;
  doc["seed"] = config.seed;
  doc["grid_per_decade"] = config.grid_per_decade;
  return doc;
}

void apply_overrides(ExperimentConfig& config, const Overrides& overrides) {
  if (overrides.problem) {
    config.problem.kind = parse_problem_kind(*overrides.problem);
    if (config.problem.kind == ProblemKind::Cnot &&
        config.problem.target == TargetKind::Haar) {
      config.problem.target = TargetKind::Cnot;
    }
  }
  if (overrides.optimizer) {
    config.optimizer.kind = parse_optimizer_kind(*overrides.optimizer);
  }
  if (overrides.schedule) {
    config.optimizer.schedule = parse_schedule_label(*overrides.schedule, "optimizer");
  }
  if (overrides.seed) {
    config.seed = *overrides.seed;
  }
  if (overrides.trials) {
    config.trials = *overrides.trials;
  }
  if (overrides.iterations) {
    config.stopping.max_iterations = *overrides.iterations;
  }
  if (overrides.shots) {
    config.estimator.shots = *overrides.shots;
  }
  if (overrides.sigma) {
    config.estimator.control_noise_sigma = *overrides.sigma;
  }
}

void write_series_csv(std::ostream& out, const AggregateSeries& series,
                      const nlohmann::json& config) {
  out << "# " << kSeriesSchema << "\n";
  out << "# config " << config.dump() << "\n";
  out << "iteration,median_infidelity,q25,q75,n_tot\n";
  for (std::size_t j = 0; j < series.iterations.size(); ++j) {
    out << series.iterations[j] << ',' << format_double(series.median_infidelity[j]) << ','
        << format_double(series.q25[j]) << ',' << format_double(series.q75[j]) << ','
        << format_double(series.n_tot[j]) << "\n";
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const nlohmann::json& config) {
  out << "# " << kSweepSchema << "\n";
  out << "# config " << config.dump() << "\n";
  out << "shots,n_tot,median_infidelity,q25,q75\n";
  for (const auto& row : rows) {
    out << format_double(row.shots) << ',' << format_double(row.n_tot) << ','
        << format_double(row.median_infidelity) << ',' << format_double(row.q25) << ','
        << format_double(row.q75) << "\n";
  }
}

SeriesFile read_series_csv(std::istream& in) {
  SeriesFile file;
  std::string line;
  bool schema_seen = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (line.rfind("# config ", 0) == 0) {
      file.config = json::parse(line.substr(9));
      continue;
    }
    if (line.rfind("#", 0) == 0) {
      if (line.find(kSeriesSchema) != std::string::npos) {
        schema_seen = true;
      }
      continue;
    }
    if (!header_seen) {
      if (line != "iteration,median_infidelity,q25,q75,n_tot") {
        throw std::runtime_error("series file: unexpected column header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != 5) {
      throw std::runtime_error("series file: malformed row '" + line + "'");
    }
    file.series.iterations.push_back(std::stoll(cells[0]));
    file.series.median_infidelity.push_back(std::strtod(cells[1].c_str(), nullptr));
    file.series.q25.push_back(std::strtod(cells[2].c_str(), nullptr));
    file.series.q75.push_back(std::strtod(cells[3].c_str(), nullptr));
    file.series.n_tot.push_back(std::strtod(cells[4].c_str(), nullptr));
  }
  if (!schema_seen) {
    throw std::runtime_error("series file: missing '" + std::string(kSeriesSchema) +
                             "' schema line");
  }
  if (file.series.iterations.empty()) {
    throw std::runtime_error("series file: no data rows");
  }
  return file;
}

nlohmann::json fit_to_json(const PowerLawFit& fit, bool floor_clamped,
                           const nlohmann::json& config) {
  json doc;
  doc["schema"] = kFitSchema;
  doc["beta"] = fit.beta;
  doc["intercept"] = fit.intercept;
  doc["residual_rms"] = fit.residual_rms;
  doc["k_lo"] = fit.k_lo;
  doc["k_hi"] = fit.k_hi;
  doc["points"] = fit.points;
  doc["floor_clamped"] = floor_clamped;
  if (!config.is_null()) {
    doc["config"] = config;
  }
  return doc;
}

int cmd_run(const std::string& config_path, const Overrides& overrides,
            std::optional<FitRange> fit_range, const std::string& out_path, int workers,
            std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  std::optional<FitRange> config_fit;
  if (load_config(config_path, overrides, &config_fit, config, err) != 0) {
    return 1;
  }
  if (!fit_range.has_value()) {
    fit_range = config_fit;
  }
  try {
    const auto traces = run_trials(config, workers);
    const AggregateSeries series = aggregate(traces);
    const json config_json = config_to_json(config);

    // Compute everything before touching the filesystem so a failure leaves
    // no partial output.
    std::optional<json> fit_json;
    if (fit_range.has_value()) {
      AggregateSeries clamped = series;
      const bool floored = clamp_infidelity_floor(clamped);
      const FitRange range = resolve_fit_range(fit_range, config.stopping.max_iterations);
      const PowerLawFit fit = fit_exponent(clamped, range.k_lo, range.k_hi);
      fit_json = fit_to_json(fit, floored, config_json);
    }

    std::ostringstream csv;
    write_series_csv(csv, series, config_json);
    if (write_file(out_path, csv.str(), err) != 0) {
      return 1;
    }
    out << "wrote " << out_path << " (" << series.iterations.size() << " grid points, "
        << config.trials << " trials)\n";

    if (fit_json.has_value()) {
      const std::string fit_path = json_sidecar_path(out_path);
      if (write_file(fit_path, fit_json->dump(2) + "\n", err) != 0) {
        return 1;
      }
      out << "wrote " << fit_path << " (beta = "
          << format_double(fit_json->at("beta").get<double>()) << ")\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const Overrides& overrides,
              const std::vector<std::int64_t>& shots, const std::string& out_path,
              int workers, std::ostream& out, std::ostream& err) {
  if (shots.empty()) {
    err << "error: sweep requires a nonempty --shots list\n";
    return 1;
  }
  ExperimentConfig config;
  if (load_config(config_path, overrides, nullptr, config, err) != 0) {
    return 1;
  }
  try {
    const auto rows = sweep_shots(config, shots, workers);
    std::ostringstream csv;
    write_sweep_csv(csv, rows, config_to_json(config));
    if (write_file(out_path, csv.str(), err) != 0) {
      return 1;
    }
    out << "wrote " << out_path << " (" << rows.size()
        << " rows including the exact reference)\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_fit(const std::string& series_path, std::optional<std::int64_t> k_lo,
            std::optional<std::int64_t> k_hi, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
  std::ifstream in(series_path);
  if (!in) {
    err << "error: cannot open series file '" << series_path << "'\n";
    return 1;
  }
  try {
    const SeriesFile file = read_series_csv(in);
    const std::int64_t max_k = file.series.iterations.back();
    const std::int64_t lo = k_lo.value_or(std::min<std::int64_t>(10, max_k));
    const std::int64_t hi = k_hi.value_or(max_k);
    const PowerLawFit fit = fit_exponent(file.series, lo, hi);
    const json fit_json = fit_to_json(fit, false, file.config);
    out << fit_json.dump(2) << "\n";
    if (!out_path.empty()) {
      if (write_file(out_path, fit_json.dump(2) + "\n", err) != 0) {
        return 1;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_compare(const std::string& config_path, const Overrides& overrides,
                std::optional<FitRange> fit_range, const std::string& out_stem,
                int workers, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  std::optional<FitRange> config_fit;
  if (load_config(config_path, overrides, &config_fit, config, err) != 0) {
    return 1;
  }
  if (!fit_range.has_value()) {
    fit_range = config_fit;
  }
  try {
    json fits;
    fits["schema"] = kFitSchema;
    const FitRange range = resolve_fit_range(fit_range, config.stopping.max_iterations);

    for (const auto kind : {OptimizerKind::Acronym, OptimizerKind::NelderMead}) {
      ExperimentConfig variant = config;
      variant.optimizer.kind = kind;
      const char* label = kind == OptimizerKind::Acronym ? "acronym" : "nm";

      const AggregateSeries series = aggregate(run_trials(variant, workers));
      const json config_json = config_to_json(variant);
      std::ostringstream csv;
      write_series_csv(csv, series, config_json);
      const std::string path = out_stem + "_" + label + ".csv";
      if (write_file(path, csv.str(), err) != 0) {
        return 1;
      }
      out << "wrote " << path << "\n";

      AggregateSeries clamped = series;
      const bool floored = clamp_infidelity_floor(clamped);
      const PowerLawFit fit = fit_exponent(clamped, range.k_lo, range.k_hi);
      fits[label] = fit_to_json(fit, floored, config_json);
    }
    const std::string fits_path = out_stem + "_fits.json";
    if (write_file(fits_path, fits.dump(2) + "\n", err) != 0) {
      return 1;
    }
    out << "wrote " << fits_path << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

std::optional<std::vector<std::int64_t>> parse_shot_list(const std::string& text,
                                                         std::ostream& err) {
  std::vector<std::int64_t> shots;
  std::set<std::int64_t> seen;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) {
      continue;
    }
    try {
      std::size_t consumed = 0;
      const std::int64_t value = std::stoll(token, &consumed);
      if (consumed != token.size()) {
        throw std::invalid_argument(token);
      }
      if (!seen.insert(value).second) {
        err << "warning: duplicate shot count " << value << " ignored\n";
        continue;
      }
      shots.push_back(value);
    } catch (const std::exception&) {
      err << "error: malformed shot count '" << token << "'\n";
      return std::nullopt;
    }
  }
  return shots;
}

}  // namespace insitu::cli
