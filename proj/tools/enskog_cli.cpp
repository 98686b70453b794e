#include "enskog/report.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

using namespace enskog;

struct CommonOptions {
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_max;
  std::vector<double> epsilons;
  std::string format = "json";
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_scenario) {
  auto* sc = cmd->add_option("--scenario", opt.scenario_path,
                             "Scenario JSON file");
  if (needs_scenario) sc->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opt.out_path, "Report output path (default stdout)");
  cmd->add_option("--seed", opt.seed, "Override the scenario seed");
  cmd->add_option("--n-max", opt.n_max, "Override the expansion order cap");
  cmd->add_option("--epsilon", opt.epsilons,
                  "Override the diagnostic time-separation list");
  cmd->add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", opt.threads,
                  "Evaluator worker threads (reports are thread-count "
                  "independent)")
      ->check(CLI::PositiveNumber);
}

Scenario load_with_overrides(const CommonOptions& opt) {
  Scenario s = load_scenario(opt.scenario_path);
  // The report echoes the overridden scenario, so it stays re-runnable.
  if (opt.seed) s.seed = *opt.seed;
  if (opt.n_max) s.n_max = *opt.n_max;
  if (!opt.epsilons.empty()) s.epsilons = opt.epsilons;
  return s;
}

int emit(RunReport rep, const CommonOptions& opt, double seconds,
         int fail_code) {
  rep.wall_clock_seconds = seconds;
  const std::string text =
      opt.format == "csv" ? rep.to_csv() : rep.to_json().dump(2) + "\n";
  if (opt.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.out_path);
    if (!out) {
      std::cerr << "cannot write " << opt.out_path << "\n";
      return 1;
    }
    out << text;
  }
  return rep.pass ? 0 : fail_code;
}

template <typename Fn>
int timed(const CommonOptions& opt, int fail_code, Fn&& build) {
  const auto start = std::chrono::steady_clock::now();
  try {
    RunReport rep = build();
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start;
    return emit(std::move(rep), opt, dt.count(), fail_code);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 1;
  } catch (const CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PathologyError& e) {
    std::cerr << "pathology: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-sphere tree-expansion toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOptions sim_opt, verify_opt, mc_opt, trees_opt;
  bool reversal_check = false;
  int trees_n = 0;
  int trees_cap = kDefaultEnumerationCap;

  auto* sim = app.add_subcommand(
      "simulate", "Run the event-driven dynamics of a particle scenario");
  add_common(sim, sim_opt, true);
  sim->add_flag("--reverse-check", reversal_check,
                "Also run the velocity-reversal round trip");

  auto* trees = app.add_subcommand(
      "trees", "Enumerate collision trees and check the counting bounds");
  trees->add_option("n", trees_n, "Tree order")->required();
  trees->add_option("--cap", trees_cap, "Enumeration order cap");
  add_common(trees, trees_opt, false);

  auto* verify = app.add_subcommand(
      "verify", "Check the expansion identities on a particle scenario");
  add_common(verify, verify_opt, true);

  auto* mc = app.add_subcommand(
      "mc", "Monte Carlo series estimate for a density scenario");
  add_common(mc, mc_opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's exit-code zoo onto the documented usage code.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (sim->parsed()) {
    return timed(sim_opt, 2, [&] {
      return run_simulate(load_with_overrides(sim_opt), reversal_check);
    });
  }
  if (trees->parsed()) {
    return timed(trees_opt, 3, [&] { return run_trees(trees_n, trees_cap); });
  }
  if (verify->parsed()) {
    return timed(verify_opt, 3,
                 [&] { return run_verify(load_with_overrides(verify_opt)); });
  }
  return timed(mc_opt, 3, [&] { return run_mc(load_with_overrides(mc_opt)); });
}
