#include "enskog/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace enskog {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw SchemaError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

double get_number(const json& j, const std::string& key,
                  const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) {
    throw SchemaError(where + ": '" + key + "' must be a number");
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) {
    throw SchemaError(where + ": '" + key + "' must be finite");
  }
  return v;
}

Vec3 get_vec3(const json& j, const std::string& key,
              const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw SchemaError(where + ": '" + key + "' must be a 3-array");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!a[i].is_number()) {
      throw SchemaError(where + ": '" + key + "' entries must be numbers");
    }
    v[i] = a[i].get<double>();
    if (!std::isfinite(v[i])) {
      throw SchemaError(where + ": '" + key + "' entries must be finite");
    }
  }
  return v;
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

ObservableSpec parse_observable(const json& j) {
  ObservableSpec spec;
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw SchemaError("observable: missing string 'kind'");
  }
  spec.kind = j.at("kind").get<std::string>();
  if (spec.kind == "constant") {
    require_keys(j, {"kind", "value"}, "observable");
    spec.value = get_number(j, "value", "observable");
  } else if (spec.kind == "coordinate") {
    require_keys(j, {"kind", "index"}, "observable");
    const double idx = get_number(j, "index", "observable");
    spec.index = static_cast<int>(idx);
    if (spec.index != idx || spec.index < 0 || spec.index > 5) {
      throw SchemaError("observable: 'index' must be an integer in 0..5");
    }
  } else if (spec.kind == "gaussian" || spec.kind == "bump") {
    require_keys(j, {"kind", "x0", "v0", "width"}, "observable");
    spec.x0 = get_vec3(j, "x0", "observable");
    spec.v0 = get_vec3(j, "v0", "observable");
    spec.width = get_number(j, "width", "observable");
    if (spec.width <= 0.0) {
      throw SchemaError("observable: 'width' must be positive");
    }
  } else {
    throw SchemaError("observable: unknown kind '" + spec.kind + "'");
  }
  return spec;
}

json observable_json(const ObservableSpec& spec) {
  json j;
  j["kind"] = spec.kind;
  if (spec.kind == "constant") {
    j["value"] = spec.value;
  } else if (spec.kind == "coordinate") {
    j["index"] = spec.index;
  } else {
    j["x0"] = vec3_json(spec.x0);
    j["v0"] = vec3_json(spec.v0);
    j["width"] = spec.width;
  }
  return j;
}

DensityBlock parse_density(const json& j) {
  DensityBlock d;
  if (!j.contains("preset") || !j.at("preset").is_string()) {
    throw SchemaError("density: missing string 'preset'");
  }
  d.preset = j.at("preset").get<std::string>();
  std::set<std::string> keys = {"preset", "velocity_width", "mass",
                                "samples", "mode"};
  if (d.preset == "gaussian") {
    keys.insert("position_width");
  } else if (d.preset == "box-maxwellian") {
    keys.insert("half_width");
  } else {
    throw SchemaError("density: unknown preset '" + d.preset + "'");
  }
  require_keys(j, keys, "density");
  if (d.preset == "gaussian") {
    d.position_width = get_number(j, "position_width", "density");
  } else {
    d.half_width = get_number(j, "half_width", "density");
  }
  d.velocity_width = get_number(j, "velocity_width", "density");
  if (j.contains("mass")) d.mass = get_number(j, "mass", "density");
  if (d.velocity_width <= 0.0 || d.mass <= 0.0 ||
      (d.preset == "gaussian" ? d.position_width : d.half_width) <= 0.0) {
    throw SchemaError("density: widths and mass must be positive");
  }
  if (j.contains("samples")) {
    if (!j.at("samples").is_number_unsigned()) {
      throw SchemaError("density: 'samples' must be a non-negative integer");
    }
    d.samples = j.at("samples").get<std::uint64_t>();
  }
  if (j.contains("mode")) {
    if (!j.at("mode").is_string()) {
      throw SchemaError("density: 'mode' must be a string");
    }
    d.mode = j.at("mode").get<std::string>();
    if (d.mode != "initial-tuples" && d.mode != "node-variables") {
      throw SchemaError("density: unknown mode '" + d.mode + "'");
    }
  }
  return d;
}

json density_json(const DensityBlock& d) {
  json j;
  j["preset"] = d.preset;
  if (d.preset == "gaussian") {
    j["position_width"] = d.position_width;
  } else {
    j["half_width"] = d.half_width;
  }
  j["velocity_width"] = d.velocity_width;
  j["mass"] = d.mass;
  j["samples"] = d.samples;
  j["mode"] = d.mode;
  return j;
}

}  // namespace

TestFunction ObservableSpec::make() const {
  if (kind == "constant") return test_functions::constant(value);
  if (kind == "coordinate") return test_functions::coordinate(index);
  if (kind == "gaussian") return test_functions::gaussian(x0, v0, width);
  if (kind == "bump") return test_functions::bump(x0, v0, width);
  throw SchemaError("observable: unknown kind '" + kind + "'");
}

DensitySpec DensityBlock::make() const {
  if (preset == "gaussian") {
    return densities::gaussian(position_width, velocity_width, mass);
  }
  if (preset == "box-maxwellian") {
    return densities::box_maxwellian(half_width, velocity_width, mass);
  }
  throw SchemaError("density: unknown preset '" + preset + "'");
}

McMode DensityBlock::mc_mode() const {
  return mode == "node-variables" ? McMode::node_variables
                                  : McMode::initial_tuples;
}

HardSphereConfig Scenario::config() const {
  if (!particles) {
    throw SchemaError("scenario '" + name + "' carries no particle list");
  }
  return HardSphereConfig{*particles, diameter, 0.0};
}

double Scenario::effective_lambda() const {
  if (lambda) return *lambda;
  if (!particles) {
    throw SchemaError("scenario '" + name +
                      "': lambda required for density scenarios");
  }
  return static_cast<double>(particles->size()) * diameter * diameter;
}

Scenario parse_scenario(const nlohmann::json& j) {
  require_keys(j,
               {"name", "diameter", "particles", "density", "horizon",
                "lambda", "observables", "n_max", "epsilon", "seed"},
               "scenario");
  Scenario s;
  if (!j.contains("name") || !j.at("name").is_string()) {
    throw SchemaError("scenario: missing string 'name'");
  }
  s.name = j.at("name").get<std::string>();
  s.diameter = get_number(j, "diameter", "scenario");
  if (s.diameter <= 0.0) throw SchemaError("scenario: diameter must be > 0");
  s.horizon = get_number(j, "horizon", "scenario");
  if (s.horizon < 0.0) throw SchemaError("scenario: horizon must be >= 0");

  const bool has_p = j.contains("particles");
  const bool has_d = j.contains("density");
  if (has_p == has_d) {
    throw SchemaError("scenario: exactly one of 'particles'/'density'");
  }
  if (has_p) {
    const auto& arr = j.at("particles");
    if (!arr.is_array() || arr.empty()) {
      throw SchemaError("scenario: 'particles' must be a non-empty array");
    }
    std::vector<PhasePoint> pts;
    for (const auto& p : arr) {
      require_keys(p, {"x", "v"}, "particle");
      pts.push_back({get_vec3(p, "x", "particle"), get_vec3(p, "v", "particle")});
    }
    s.particles = std::move(pts);
    try {
      require_physical(s.config());
    } catch (const InvalidConfigurationError& e) {
      throw SchemaError(std::string("scenario: ") + e.what());
    }
  } else {
    s.density = parse_density(j.at("density"));
  }

  if (j.contains("lambda")) {
    s.lambda = get_number(j, "lambda", "scenario");
    if (*s.lambda < 0.0) throw SchemaError("scenario: lambda must be >= 0");
  } else if (has_d) {
    throw SchemaError("scenario: density scenarios must set 'lambda'");
  }

  if (j.contains("observables")) {
    if (!j.at("observables").is_array()) {
      throw SchemaError("scenario: 'observables' must be an array");
    }
    for (const auto& o : j.at("observables")) {
      s.observables.push_back(parse_observable(o));
    }
  }
  if (j.contains("n_max")) {
    const double n = get_number(j, "n_max", "scenario");
    s.n_max = static_cast<int>(n);
    if (s.n_max != n || s.n_max < 0) {
      throw SchemaError("scenario: 'n_max' must be a non-negative integer");
    }
  }
  if (j.contains("epsilon")) {
    if (!j.at("epsilon").is_array()) {
      throw SchemaError("scenario: 'epsilon' must be an array");
    }
    for (const auto& e : j.at("epsilon")) {
      if (!e.is_number() || e.get<double>() < 0.0) {
        throw SchemaError("scenario: 'epsilon' entries must be >= 0");
      }
      s.epsilons.push_back(e.get<double>());
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      throw SchemaError("scenario: 'seed' must be a non-negative integer");
    }
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return parse_scenario(j);
}

nlohmann::json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["diameter"] = s.diameter;
  if (s.particles) {
    json arr = json::array();
    for (const auto& p : *s.particles) {
      arr.push_back({{"x", vec3_json(p.x)}, {"v", vec3_json(p.v)}});
    }
    j["particles"] = std::move(arr);
  } else if (s.density) {
    j["density"] = density_json(*s.density);
  }
  j["horizon"] = s.horizon;
  if (s.lambda) j["lambda"] = *s.lambda;
  if (!s.observables.empty()) {
    json arr = json::array();
    for (const auto& o : s.observables) arr.push_back(observable_json(o));
    j["observables"] = std::move(arr);
  }
  j["n_max"] = s.n_max;
  if (!s.epsilons.empty()) j["epsilon"] = s.epsilons;
  j["seed"] = s.seed;
  return j;
}

}  // namespace enskog
