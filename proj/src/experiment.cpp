#include "tamedsde/experiment.hpp"

#include "tamedsde/presets.hpp"
#include "tamedsde/transform.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace tamedsde {

using nlohmann::json;

std::string to_string(Study study) {
  switch (study) {
    case Study::convergence:
      return "convergence";
    case Study::interpolation:
      return "interpolation";
    case Study::occupation:
      return "occupation";
    case Study::invariants:
      return "invariants";
    case Study::assumptions:
      return "assumptions";
  }
  return "unknown";
}

Study study_from_string(const std::string& name) {
  for (Study s : {Study::convergence, Study::interpolation, Study::occupation, Study::invariants,
                  Study::assumptions}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("study", "unknown study '" + name +
                                 "' (expected convergence, interpolation, occupation, "
                                 "invariants or assumptions)");
}

void ExperimentConfig::validate() const {
  try {
    (void)make_preset(preset);
  } catch (const InputError& e) {
    throw ConfigError("preset", e.what());
  }
  if (!is_power_of_two(n_ref) || n_ref < 2) throw ConfigError("n_ref", "must be a power of two >= 2");
  if (levels.empty()) throw ConfigError("levels", "must be non-empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!is_power_of_two(levels[i])) {
      throw ConfigError("levels", std::to_string(levels[i]) + " is not a power of two");
    }
    if (n_ref % levels[i] != 0) {
      throw ConfigError("levels", std::to_string(levels[i]) + " does not divide n_ref");
    }
    if (i > 0 && levels[i] <= levels[i - 1]) throw ConfigError("levels", "must be strictly increasing");
  }
  const bool monte_carlo =
      study == Study::convergence || study == Study::interpolation || study == Study::occupation;
  if (monte_carlo && n_ref < 8 * levels.back()) {
    throw ConfigError("n_ref", "must be at least 8 * max(levels)");
  }
  if (paths < 2) throw ConfigError("paths", "must be >= 2");
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("p", "must be finite and > 0");
  if (!(q >= 1.0)) throw ConfigError("q", "must be >= 1 or \"inf\"");
  if (!(nu_fraction > 0.0 && nu_fraction < 1.0)) throw ConfigError("nu_fraction", "must lie in (0, 1)");
  try {
    (void)reference_from_string(reference);
  } catch (const InputError& e) {
    throw ConfigError("reference", e.what());
  }
  if (out_path.empty()) throw ConfigError("out_path", "must be non-empty");
}

namespace {

template <typename T>
T field(const json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(name, std::string("wrong type: ") + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("malformed JSON config: top level must be an object");

  static const std::set<std::string> known{"preset", "study", "levels",    "n_ref",   "paths",
                                           "p",      "q",     "seed",      "nu_fraction",
                                           "reference", "out_path", "threads", "xi_index"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown field");
  }
  for (const char* required : {"preset", "study", "seed"}) {
    if (!j.contains(required)) throw ConfigError(required, "is required");
  }

  ExperimentConfig c;
  c.preset = field<std::string>(j, "preset");
  c.study = study_from_string(field<std::string>(j, "study"));
  if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0)) {
    throw ConfigError("seed", "must be a non-negative integer");
  }
  c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("levels")) {
    if (!j.at("levels").is_array()) throw ConfigError("levels", "must be an array of integers");
    c.levels.clear();
    for (const auto& v : j.at("levels")) {
      if (!v.is_number_integer()) throw ConfigError("levels", "entries must be integers");
      c.levels.push_back(v.get<long>());
    }
  }
  if (j.contains("n_ref")) c.n_ref = field<long>(j, "n_ref");
  if (j.contains("paths")) c.paths = field<long>(j, "paths");
  if (j.contains("p")) c.p = field<double>(j, "p");
  if (j.contains("q")) {
    const json& q = j.at("q");
    if (q.is_string()) {
      if (q.get<std::string>() != "inf") throw ConfigError("q", "string value must be \"inf\"");
      c.q = std::numeric_limits<Scalar>::infinity();
    } else {
      c.q = field<double>(j, "q");
    }
  }
  if (j.contains("nu_fraction")) c.nu_fraction = field<double>(j, "nu_fraction");
  if (j.contains("reference")) c.reference = field<std::string>(j, "reference");
  if (j.contains("out_path")) c.out_path = field<std::string>(j, "out_path");
  if (j.contains("threads")) c.threads = field<unsigned>(j, "threads");
  if (j.contains("xi_index")) c.xi_index = field<std::size_t>(j, "xi_index");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& source) {
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && source[first] == '{') return parse_config(source);
  std::ifstream in(source);
  if (!in) throw InputError("cannot open config file '" + source + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["study"] = to_string(c.study);
  j["levels"] = c.levels;
  j["n_ref"] = c.n_ref;
  j["paths"] = c.paths;
  j["p"] = c.p;
  if (std::isinf(c.q)) {
    j["q"] = "inf";
  } else {
    j["q"] = c.q;
  }
  j["seed"] = c.seed;
  j["nu_fraction"] = c.nu_fraction;
  j["reference"] = c.reference;
  j["out_path"] = c.out_path;
  j["threads"] = c.threads;
  j["xi_index"] = c.xi_index;
  return j.dump(2);
}

std::string format_scalar(Scalar v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct CsvRow {
  std::string level_n;
  std::string n_ref;
  std::string paths;
  std::string error_mean;
  std::string error_se;
  std::string rate;
  std::string rate_se;
  std::string r_squared;
  std::string flags;
};

class CsvWriter {
 public:
  explicit CsvWriter(const ExperimentConfig& c) : config_(c) { out_ << kCsvHeader << '\n'; }

  void add(const CsvRow& r) {
    out_ << to_string(config_.study) << ',' << config_.preset << ',' << config_.seed << ','
         << r.level_n << ',' << r.n_ref << ',' << r.paths << ',' << format_scalar(config_.p) << ','
         << format_scalar(config_.q) << ',' << r.error_mean << ',' << r.error_se << ',' << r.rate
         << ',' << r.rate_se << ',' << r.r_squared << ',' << r.flags << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  const ExperimentConfig& config_;
  std::ostringstream out_;
};

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : ";") + p;
  return s;
}

void write_report(CsvWriter& csv, const ConvergenceReport& report, const std::vector<Scalar>& means,
                  bool rescale_se, const RateFit& fit, const std::string& extra_flag) {
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    const auto& e = report.errors[l];
    std::vector<std::string> flags;
    if (!extra_flag.empty()) flags.push_back(extra_flag);
    if (e.divergent > 0) flags.push_back("divergent=" + std::to_string(e.divergent));
    const Scalar scale = rescale_se && e.mean > 0.0 ? means[l] / e.mean : 1.0;
    csv.add({std::to_string(e.n), std::to_string(report.n_ref), std::to_string(e.paths),
             format_scalar(means[l]), format_scalar(e.se * scale), "", "", "", join(flags)});
  }
  std::vector<std::string> flags{"summary"};
  if (!extra_flag.empty()) flags.push_back(extra_flag);
  flags.push_back("reference=" + to_string(report.reference));
  for (const auto& f : report.flags) flags.push_back(f);
  csv.add({"", std::to_string(report.n_ref), std::to_string(report.paths), "", "",
           format_scalar(fit.rate), format_scalar(fit.rate_se), format_scalar(fit.r_squared),
           join(flags)});
}

std::string rate_summary(const std::string& what, const RateFit& fit) {
  std::ostringstream s;
  s.precision(4);
  s << what << ": rate = " << fit.rate << " +- " << fit.rate_se << " (r^2 = " << fit.r_squared << ")";
  return s.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Preset preset = make_preset(config.preset);
  CsvWriter csv(config);
  ExperimentResult result;
  const std::string label = to_string(config.study) + " " + config.preset;

  StudyOptions opts;
  opts.levels = config.levels;
  opts.n_ref = config.n_ref;
  opts.paths = config.paths;
  opts.seed = config.seed;
  opts.reference = reference_from_string(config.reference);
  opts.nu_fraction = config.nu_fraction;
  opts.threads = config.threads;
  opts.oracle = preset.exact;
  opts.spec.p = config.p;
  opts.spec.q = config.q;

  switch (config.study) {
    case Study::convergence:
    case Study::interpolation: {
      opts.spec.mode =
          config.study == Study::convergence ? NormMode::sup_continuous : NormMode::pathwise_Lq;
      const ConvergenceReport report = run_convergence_study(preset.problem, opts);
      std::vector<Scalar> means;
      for (const auto& e : report.errors) means.push_back(e.mean);
      write_report(csv, report, means, false, report.fit, "");
      result.summary = rate_summary(label, report.fit);
      if (!report.log_normalized.empty()) {
        write_report(csv, report, report.log_normalized, true, report.log_normalized_fit,
                     "log_normalized");
        result.summary += "; " + rate_summary("log-normalized", report.log_normalized_fit);
      }
      break;
    }
    case Study::occupation: {
      const ConvergenceReport report =
          occupation_scaling_study(preset.problem, config.xi_index, opts);
      std::vector<Scalar> means;
      for (const auto& e : report.errors) means.push_back(e.mean);
      write_report(csv, report, means, false, report.fit, "");
      result.summary = rate_summary(label, report.fit);
      break;
    }
    case Study::invariants: {
      const TransformedProblem tp = make_transformed_problem(preset.problem, config.nu_fraction);
      std::vector<InvariantCheck> checks = check_transform_invariants(tp.g);
      checks.push_back(check_transformed_continuity(tp));
      long failed = 0;
      for (const auto& c : checks) {
        if (!c.passed) ++failed;
        csv.add({"", "", "", format_scalar(c.max_deviation), "", "", "", "",
                 join({"check=" + c.name, "tolerance=" + format_scalar(c.tolerance),
                       c.passed ? "pass" : "fail"})});
      }
      result.ok = failed == 0;
      result.summary = label + ": " + std::to_string(checks.size() - failed) + "/" +
                       std::to_string(checks.size()) + " invariant checks passed";
      break;
    }
    case Study::assumptions: {
      SampleSpec grid;
      grid.thresholds = preset.thresholds;
      const AssumptionReport report = check_assumptions(preset.problem, grid);
      const std::vector<std::pair<std::string, std::pair<std::optional<Scalar>, std::size_t>>> rows{
          {"A1", {preset.thresholds.a1, report.a1_violations.size()}},
          {"A2(i)", {preset.thresholds.a2i, report.a2i_violations.size()}},
          {"A2(ii)", {preset.thresholds.a2ii, report.a2ii_violations.size()}},
          {"A3", {preset.thresholds.a3, report.a3_violations.size()}}};
      for (const auto& [name, info] : rows) {
        csv.add({"", "", "", format_scalar(report.fitted_constants.at(name)), "", "", "", "",
                 join({"condition=" + name,
                       "threshold=" + (info.first ? format_scalar(*info.first) : std::string("none")),
                       "violations=" + std::to_string(info.second)})});
      }
      csv.add({"", "", "", format_scalar(static_cast<Scalar>(report.a4_violations.size())), "", "",
               "", "", join({"condition=A4", "violations=" + std::to_string(report.a4_violations.size())})});
      result.ok = report.ok();
      result.summary = label + ": " + (report.ok() ? "all sampled conditions within thresholds"
                                                   : "threshold violations found");
      break;
    }
  }
  result.csv = csv.str();
  return result;
}

int run(const ExperimentConfig& config, std::ostream& out) {
  const ExperimentResult result = run_experiment(config);
  if (config.out_path == "-") {
    out << result.csv;
  } else {
    std::ofstream file(config.out_path, std::ios::binary);
    if (!file) throw InputError("cannot write '" + config.out_path + "'");
    file << result.csv;
  }
  out << result.summary << '\n';
  return result.ok ? 0 : 1;
}

}  // namespace tamedsde
