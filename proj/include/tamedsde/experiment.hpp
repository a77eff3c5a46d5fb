#pragma once

#include "tamedsde/analysis.hpp"
#include "tamedsde/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace tamedsde {

enum class Study { convergence, interpolation, occupation, invariants, assumptions };

std::string to_string(Study study);
Study study_from_string(const std::string& name);

/// One experiment, as read from a JSON config.
///
/// Defaults: levels [16, ..., 512], n_ref 8192, paths 1000, p 2, q inf,
/// nu_fraction 0.5, reference "fine_grid", out_path "tamedsde.csv",
/// threads 0 (machine parallelism), xi_index 0.
struct ExperimentConfig {
  std::string preset;
  Study study = Study::convergence;
  std::vector<long> levels{16, 32, 64, 128, 256, 512};
  long n_ref = 8192;
  long paths = 1000;
  Scalar p = 2.0;
  Scalar q = std::numeric_limits<Scalar>::infinity();
  std::uint64_t seed = 0;
  Scalar nu_fraction = 0.5;
  std::string reference = "fine_grid";
  std::string out_path = "tamedsde.csv";
  unsigned threads = 0;
  std::size_t xi_index = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

class ConfigError : public InputError {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : InputError("config field '" + field + "': " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Inline JSON when the text starts with '{', otherwise a file path.
ExperimentConfig load_config(const std::string& source);
ExperimentConfig parse_config(const std::string& json_text);
/// Canonical JSON with every field present; q is "inf" when infinite.
std::string config_to_json(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "study,preset,seed,level_n,n_ref,paths,p,q,error_mean,error_se,rate,rate_se,r_squared,flags";

/// 17 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_scalar(Scalar v);

struct ExperimentResult {
  std::string csv;
  std::string summary;
  bool ok = true;
};

/// Runs the study and renders the CSV without touching the filesystem.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs, writes the CSV to config.out_path ("-" for out) and prints the
/// summary line to out. Returns the process exit status.
int run(const ExperimentConfig& config, std::ostream& out);

}  // namespace tamedsde
