#include "tamedsde/experiment.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace tamedsde;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const ExperimentConfig c = parse_config(R"({"preset": "gbm", "study": "convergence", "seed": 7})");
  CHECK(c.preset == "gbm");
  CHECK(c.study == Study::convergence);
  CHECK(c.seed == 7);
  CHECK(c.levels == std::vector<long>{16, 32, 64, 128, 256, 512});
  CHECK(c.n_ref == 8192);
  CHECK(c.paths == 1000);
  CHECK(c.p == 2.0);
  CHECK(std::isinf(c.q));
  CHECK(c.nu_fraction == 0.5);
  CHECK(c.reference == "fine_grid");
}

TEST_CASE("config validation names the field") {
  try {
    parse_config(R"({"preset": "gbm", "study": "convergence", "seed": 1, "levels": [12]})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "levels");
  }
  CHECK_THROWS_AS(parse_config(R"({"preset": "gbm", "study": "convergence"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "gbm", "study": "convergence", "seed": 1, "bogus": 2})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "gbm", "study": "walk", "seed": 1})"), InputError);
  CHECK_THROWS_AS(parse_config(R"({"preset": "gbm", "study": )"), InputError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"preset": "nope", "study": "convergence", "seed": 1})"),
                       doctest::Contains("cubic_jump"), InputError);
}

TEST_CASE("config round trip keeps q = inf") {
  const ExperimentConfig c =
      parse_config(R"({"preset": "cubic_jump", "study": "interpolation", "seed": 3, "q": "inf"})");
  const std::string json = config_to_json(c);
  CHECK(json.find("\"inf\"") != std::string::npos);
  const ExperimentConfig back = parse_config(json);
  CHECK(std::isinf(back.q));
  CHECK(config_to_json(back) == json);
}

TEST_CASE("format_scalar") {
  CHECK(format_scalar(0.1) == "0.10000000000000001");
  CHECK(format_scalar(2.0) == "2");
  CHECK(format_scalar(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_scalar(std::nan("")) == "nan");
}

TEST_CASE("GBM convergence CSV layout") {
  ExperimentConfig c = parse_config(
      R"({"preset": "gbm", "study": "convergence", "seed": 1, "levels": [4, 8, 16], "n_ref": 128,
          "paths": 20, "reference": "exact_oracle"})");
  const ExperimentResult r = run_experiment(c);
  const auto rows = lines(r.csv);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == kCsvHeader);
  CHECK(rows[1].rfind("convergence,gbm,1,4,128,20,2,inf,", 0) == 0);
  CHECK(rows[4].find("summary") != std::string::npos);

  // Same config twice: identical bytes.
  CHECK(run_experiment(c).csv == r.csv);
  c.threads = 2;
  CHECK(run_experiment(c).csv == r.csv);
}

TEST_CASE("invariants study") {
  const ExperimentResult r =
      run_experiment(parse_config(R"({"preset": "cubic_jump", "study": "invariants", "seed": 0})"));
  CHECK(r.ok);
  const auto rows = lines(r.csv);
  CHECK(rows.size() > 5);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].find(";pass") != std::string::npos);
}

TEST_CASE("assumptions study") {
  const ExperimentResult r =
      run_experiment(parse_config(R"({"preset": "double_jump", "study": "assumptions", "seed": 0})"));
  CHECK(r.ok);
  CHECK(lines(r.csv).size() == 6);
}

TEST_CASE("run writes to the stream for out '-'") {
  ExperimentConfig c = parse_config(
      R"({"preset": "cubic_jump", "study": "occupation", "seed": 2, "levels": [4, 8], "n_ref": 64,
          "paths": 8, "p": 1, "out_path": "-"})");
  std::ostringstream out;
  CHECK(run(c, out) == 0);
  CHECK(out.str().rfind(kCsvHeader, 0) == 0);
}
