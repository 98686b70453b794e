#pragma once

#include "enskog/hardsphere.hpp"
#include "enskog/regular.hpp"
#include "enskog/test_function.hpp"
#include "enskog/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace enskog {

struct SchemaError : Error {
  using Error::Error;
};

/// Declarative observable; make() builds the callable. Kinds: "constant"
/// (value), "coordinate" (index 0..5), "gaussian" and "bump" (x0, v0, width).
struct ObservableSpec {
  std::string kind;
  double value = 1.0;
  int index = 0;
  Vec3 x0{Vec3::Zero()};
  Vec3 v0{Vec3::Zero()};
  double width = 1.0;

  [[nodiscard]] TestFunction make() const;
};

/// Initial-density block for Monte Carlo scenarios. preset is "gaussian"
/// (position_width) or "box-maxwellian" (half_width).
struct DensityBlock {
  std::string preset;
  double position_width = 1.0;
  double half_width = 1.0;
  double velocity_width = 1.0;
  double mass = 1.0;
  std::uint64_t samples = 10000;
  std::string mode = "initial-tuples";  // or "node-variables"

  [[nodiscard]] DensitySpec make() const;
  [[nodiscard]] McMode mc_mode() const;
};

/// One run description. All quantities are dimensionless; the sphere diameter
/// sets the length scale. Exactly one of particles / density is present.
struct Scenario {
  std::string name;
  double diameter = 1.0;
  std::optional<std::vector<PhasePoint>> particles;
  std::optional<DensityBlock> density;
  double horizon = 0.0;
  std::optional<double> lambda;  // default N a^2 for particle scenarios
  std::vector<ObservableSpec> observables;
  int n_max = 6;
  std::vector<double> epsilons;  // diagnostic time-separation levels
  std::uint64_t seed = 0;

  [[nodiscard]] HardSphereConfig config() const;  // particle scenarios only
  [[nodiscard]] double effective_lambda() const;
};

/// Strict parse: unknown keys, missing requirements and invariant violations
/// (overlap, both or neither of particles/density) throw SchemaError.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

nlohmann::json to_json(const Scenario& s);

}  // namespace enskog
