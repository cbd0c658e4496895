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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "cli.hpp"

using namespace insitu;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "insitu_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_binary(const std::string& args) {
  const std::string command = std::string(INSITU_CLI_BINARY) + " " + args;
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

nlohmann::json tiny_config() {
  return nlohmann::json::parse(R"({
    "problem": {"type": "qubit", "segments": 4},
    "optimizer": {"type": "acronym", "schedule": "B"},
    "estimator": {"shots": 200},
    "stopping": {"max_iterations": 100},
    "trials": 2,
    "seed": 5
  })");
}

}  // namespace

TEST_CASE("config documents round-trip through parse and emit") {
  const auto doc = tiny_config();
  const ExperimentConfig config = cli::config_from_json(doc);
  CHECK(config.problem.segments == 4);
  CHECK(config.estimator.shots == 200);
  CHECK(config.trials == 2);

  const nlohmann::json emitted = cli::config_to_json(config);
  const ExperimentConfig reparsed = cli::config_from_json(emitted);
  CHECK(cli::config_to_json(reparsed) == emitted);
}

TEST_CASE("unknown and ill-typed config keys are rejected by name") {
  auto doc = tiny_config();
  doc["problem"]["segmnets"] = 10;
  try {
    cli::config_from_json(doc);
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("segmnets") != std::string::npos);
    CHECK(std::string(e.what()).find("problem") != std::string::npos);
  }

  auto top = tiny_config();
  top["trails"] = 7;
  CHECK_THROWS_AS(cli::config_from_json(top), cli::ConfigError);

  auto badtype = tiny_config();
  badtype["estimator"]["shots"] = "many";
  try {
    cli::config_from_json(badtype);
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("shots") != std::string::npos);
  }

  auto badenum = tiny_config();
  badenum["optimizer"]["type"] = "bfgs";
  CHECK_THROWS_AS(cli::config_from_json(badenum), cli::ConfigError);
}

TEST_CASE("series csv round-trips including the embedded config") {
  AggregateSeries series;
  for (std::int64_t k = 1; k <= 64; k *= 2) {
    series.iterations.push_back(k);
    series.median_infidelity.push_back(1.0 / static_cast<double>(k));
    series.q25.push_back(0.5 / static_cast<double>(k));
    series.q75.push_back(2.0 / static_cast<double>(k));
    series.n_tot.push_back(2000.0 * static_cast<double>(k));
  }
  std::ostringstream out;
  cli::write_series_csv(out, series, tiny_config());

  std::istringstream in(out.str());
  const cli::SeriesFile file = cli::read_series_csv(in);
  CHECK(file.config == tiny_config());
  REQUIRE(file.series.iterations.size() == series.iterations.size());
  for (std::size_t j = 0; j < series.iterations.size(); ++j) {
    CHECK(file.series.iterations[j] == series.iterations[j]);
    CHECK(file.series.median_infidelity[j] == series.median_infidelity[j]);
    CHECK(file.series.n_tot[j] == series.n_tot[j]);
  }
}

TEST_CASE("cmd_fit recovers exponents and reports log-domain failures") {
  const fs::path dir = temp_dir();

  AggregateSeries series;
  for (std::int64_t k = 1; k <= 4096; k *= 2) {
    series.iterations.push_back(k);
    series.median_infidelity.push_back(1.0 / static_cast<double>(k));
    series.q25.push_back(1.0 / static_cast<double>(k));
    series.q75.push_back(1.0 / static_cast<double>(k));
    series.n_tot.push_back(static_cast<double>(k));
  }
  const fs::path clean_path = dir / "clean.csv";
  {
    std::ofstream out(clean_path);
    cli::write_series_csv(out, series, tiny_config());
  }
  std::ostringstream out;
  std::ostringstream err;
  CHECK(cli::cmd_fit(clean_path.string(), 1, 4096, "", out, err) == 0);
  const auto fit = nlohmann::json::parse(out.str());
  CHECK(std::abs(fit.at("beta").get<double>() + 1.0) < 1e-9);
  CHECK(fit.at("config") == tiny_config());

  SUBCASE("zero median inside the range names the log domain") {
    auto zeroed = series;
    zeroed.median_infidelity[3] = 0.0;
    const fs::path zero_path = dir / "zero.csv";
    {
      std::ofstream file(zero_path);
      cli::write_series_csv(file, zeroed, tiny_config());
    }
    std::ostringstream out2;
    std::ostringstream err2;
    CHECK(cli::cmd_fit(zero_path.string(), 1, 4096, "", out2, err2) != 0);
    CHECK(err2.str().find("log-domain") != std::string::npos);
  }

  SUBCASE("a range narrower than 5 grid points is refused") {
    std::ostringstream out2;
    std::ostringstream err2;
    CHECK(cli::cmd_fit(clean_path.string(), 1000, 4096, "", out2, err2) != 0);
    CHECK(err2.str().find("5 grid points") != std::string::npos);
  }

  SUBCASE("missing input file") {
    std::ostringstream out2;
    std::ostringstream err2;
    CHECK(cli::cmd_fit((dir / "absent.csv").string(), 1, 10, "", out2, err2) != 0);
  }
}

TEST_CASE("parse_shot_list deduplicates with a warning and rejects junk") {
  std::ostringstream err;
  const auto shots = cli::parse_shot_list("100,1000,100", err);
  REQUIRE(shots.has_value());
  CHECK(*shots == std::vector<std::int64_t>{100, 1000});
  CHECK(err.str().find("duplicate") != std::string::npos);

  std::ostringstream err2;
  CHECK_FALSE(cli::parse_shot_list("100,12x", err2).has_value());

  std::ostringstream err3;
  const auto empty = cli::parse_shot_list(",", err3);
  REQUIRE(empty.has_value());
  CHECK(empty->empty());
}

TEST_CASE("binary: identical seeds give byte-identical outputs") {
  const fs::path dir = temp_dir();
  const fs::path config_path = dir / "run.json";
  {
    std::ofstream out(config_path);
    out << tiny_config().dump(2);
  }
  const fs::path out_a = dir / "a.csv";
  const fs::path out_b = dir / "b.csv";
  REQUIRE(run_binary("run --config " + config_path.string() + " --seed 42 --out " +
                     out_a.string() + " > /dev/null 2>&1") == 0);
  REQUIRE(run_binary("run --config " + config_path.string() + " --seed 42 --out " +
                     out_b.string() + " > /dev/null 2>&1") == 0);
  CHECK(slurp(out_a) == slurp(out_b));

  // A different seed changes the bytes.
  const fs::path out_c = dir / "c.csv";
  REQUIRE(run_binary("run --config " + config_path.string() + " --seed 43 --out " +
                     out_c.string() + " > /dev/null 2>&1") == 0);
  CHECK(slurp(out_a) != slurp(out_c));

  // The resolved config and seed are embedded in the output.
  CHECK(slurp(out_a).find("\"seed\":42") != std::string::npos);
}

TEST_CASE("binary: missing config exits nonzero with no partial output") {
  const fs::path dir = temp_dir();
  const fs::path out = dir / "never.csv";
  fs::remove(out);
  CHECK(run_binary("run --config " + (dir / "missing.json").string() + " --out " +
                   out.string() + " > /dev/null 2>&1") != 0);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("binary: flag overrides win over config values") {
  const fs::path dir = temp_dir();
  const fs::path config_path = dir / "override.json";
  {
    std::ofstream out(config_path);
    out << tiny_config().dump(2);  // max_iterations = 100
  }
  const fs::path out = dir / "override.csv";
  REQUIRE(run_binary("run --config " + config_path.string() +
                     " --iterations 80 --out " + out.string() + " > /dev/null 2>&1") == 0);
  const std::string text = slurp(out);
  CHECK(text.find("\"max_iterations\":80") != std::string::npos);
  CHECK(text.find("\n80,") != std::string::npos);
  CHECK(text.find("\n100,") == std::string::npos);
}

TEST_CASE("binary: sweep writes the shot table plus the exact reference row") {
  const fs::path dir = temp_dir();
  const fs::path out = dir / "sweep.csv";
  REQUIRE(run_binary("sweep --trials 2 --iterations 60 --shots 50,200 --seed 3 --out " +
                     out.string() + " > /dev/null 2>&1") == 0);
  const std::string text = slurp(out);
  CHECK(text.find("shots,n_tot,median_infidelity,q25,q75") != std::string::npos);
  CHECK(text.find("\n50,") != std::string::npos);
  CHECK(text.find("\n200,") != std::string::npos);
  CHECK(text.find("\ninf,") != std::string::npos);

  CHECK(run_binary("sweep --shots , --out " + (dir / "x.csv").string() +
                   " > /dev/null 2>&1") != 0);
}

TEST_CASE("binary: compare emits paired series and fits") {
  const fs::path dir = temp_dir();
  const fs::path stem = dir / "cmp";
  REQUIRE(run_binary("compare --trials 2 --iterations 100 --shots 100 --seed 4 --out " +
                     stem.string() + " > /dev/null 2>&1") == 0);
  CHECK(fs::exists(dir / "cmp_acronym.csv"));
  CHECK(fs::exists(dir / "cmp_nm.csv"));
  const auto fits = nlohmann::json::parse(slurp(dir / "cmp_fits.json"));
  CHECK(fits.contains("acronym"));
  CHECK(fits.contains("nm"));
  CHECK(fits.at("acronym").at("config").at("optimizer").at("type") == "acronym");
  CHECK(fits.at("nm").at("config").at("optimizer").at("type") == "nm");
}
