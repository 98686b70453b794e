#pragma once

#include "enskog/scenario.hpp"

#include <string>

namespace enskog {

inline constexpr const char* kToolVersion = "0.1.0";

/// Self-contained run artifact. `result` and `pass` are deterministic
/// functions of (scenario, seed); wall clock is kept outside of them so that
/// reruns compare bit-identically.
struct RunReport {
  std::string command;
  nlohmann::json scenario;  // echo; the run is reproducible from this alone
  nlohmann::json result;
  bool pass = true;
  double wall_clock_seconds = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string to_csv() const;  // flattened path,value rows
};

/// Event-driven run of a particle scenario: collision log, final states,
/// observable averages, event-gap checks against the scenario epsilon list,
/// and optionally the velocity-reversal round trip.
RunReport run_simulate(const Scenario& s, bool reversal_check = false);

/// Tree enumeration summary at order n: counts, the 4^n bound, and the class
/// sizes, whose sum must give back the fully ordered count.
RunReport run_trees(int n, int cap = kDefaultEnumerationCap);

/// Expansion checks on a particle scenario: per-observable series vs
/// simulator, composability at a seed-drawn intermediate time, and (for N <=
/// 4) the contracted vs interacting representations.
RunReport run_verify(const Scenario& s);

/// Monte Carlo estimate and geometric-decay table for a density scenario.
RunReport run_mc(const Scenario& s);

}  // namespace enskog
