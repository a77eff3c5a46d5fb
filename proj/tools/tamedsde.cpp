// tamedsde: tamed Euler experiments for SDEs with discontinuous drift.
//
//   tamedsde run --config <path|json> [--seed N] [--paths N] [--out PATH]
//   tamedsde presets
//   tamedsde check --preset NAME [--lo X] [--hi X] [--points N]

#include "tamedsde/experiment.hpp"
#include "tamedsde/presets.hpp"
#include "tamedsde/transform.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace tamedsde;

void print_violations(const char* name, const std::vector<Violation>& v) {
  std::cout << "  " << name << " violations: " << v.size() << '\n';
  for (std::size_t i = 0; i < v.size() && i < 5; ++i) {
    std::cout << "    at";
    for (Scalar x : v[i].points) std::cout << ' ' << format_scalar(x);
    std::cout << ": lhs " << format_scalar(v[i].lhs) << " > bound " << format_scalar(v[i].bound)
              << '\n';
  }
}

int list_presets() {
  for (const auto& name : preset_names()) {
    const Preset p = make_preset(name);
    std::cout << name << ": " << p.description << '\n' << "  ";
    for (const auto& [key, value] : p.parameters) std::cout << key << '=' << value << ' ';
    std::cout << "\n  breakpoints: " << p.problem.breakpoints().size();
    if (!p.problem.breakpoints().empty()) {
      const TransformG g = build_transform(p.problem);
      std::cout << ", alpha =";
      for (Scalar a : g.alpha()) std::cout << ' ' << a;
      std::cout << ", nu = " << g.nu();
    }
    std::cout << "\n  exact solution: " << (p.exact ? "yes" : "no") << "\n  thresholds: A1 "
              << *p.thresholds.a1 << ", A2(i) " << *p.thresholds.a2i << ", A2(ii) "
              << *p.thresholds.a2ii << ", A3 " << *p.thresholds.a3 << '\n';
  }
  return 0;
}

int check_preset(const std::string& name, const SampleSpec& base) {
  const Preset p = make_preset(name);
  SampleSpec grid = base;
  grid.thresholds = p.thresholds;
  const AssumptionReport r = check_assumptions(p.problem, grid);
  std::cout << name << " on [" << grid.lo << ", " << grid.hi << "] with " << grid.points
            << " points\n";
  for (const auto& [cond, c] : r.fitted_constants) {
    std::cout << "  " << cond << " fitted constant " << format_scalar(c) << '\n';
  }
  print_violations("A1", r.a1_violations);
  print_violations("A2(i)", r.a2i_violations);
  print_violations("A2(ii)", r.a2ii_violations);
  print_violations("A3", r.a3_violations);
  print_violations("A4", r.a4_violations);
  const Interval adm = admissible_p(p.problem.growth());
  std::cout << "  admissible p: (0, " << format_scalar(adm.hi) << ")\n";
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tamed Euler schemes for SDEs with discontinuous drift"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON config");
  std::string config_source;
  std::optional<std::uint64_t> seed;
  std::optional<long> paths;
  std::optional<std::string> out;
  run_cmd->add_option("--config", config_source, "Config file path or inline JSON")->required();
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--paths", paths, "Override the number of Monte Carlo paths");
  run_cmd->add_option("--out", out, "Override the CSV output path ('-' for stdout)");

  auto* presets_cmd = app.add_subcommand("presets", "List the preset catalog");

  auto* check_cmd = app.add_subcommand("check", "Run the sampled assumption checker on a preset");
  std::string preset_name;
  SampleSpec grid;
  check_cmd->add_option("--preset", preset_name, "Preset name")->required();
  check_cmd->add_option("--lo", grid.lo, "Sample interval lower end");
  check_cmd->add_option("--hi", grid.hi, "Sample interval upper end");
  check_cmd->add_option("--points", grid.points, "Number of sample points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*presets_cmd) return list_presets();
    if (*check_cmd) return check_preset(preset_name, grid);

    ExperimentConfig config = load_config(config_source);
    if (seed) config.seed = *seed;
    if (paths) config.paths = *paths;
    if (out) config.out_path = *out;
    config.validate();
    return run(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "tamedsde: " << e.what() << '\n';
    return 2;
  }
}
