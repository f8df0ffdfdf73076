#pragma once

// Run configuration: a strict JSON tree with human units at the boundary.
// Frequencies and rates are given in MHz meaning value/2pi (so g_mhz = 10.2
// maps to g = 2pi*10.2 rad/us) and durations in us; conversion to internal
// angular units happens once, here.  Unknown keys are rejected with the
// offending path so typos cannot silently fall back to defaults.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "darkcavity/model.hpp"
#include "darkcavity/scan.hpp"
#include "darkcavity/types.hpp"

namespace darkcavity {

// Built-in operating points of the apparatus this models: "nominal" has
// g/2pi = 10.2 MHz, "reduced-g" has 9.2 MHz.  All other rates are shared.
inline SystemParams preset_params(const std::string& name) {
  SystemParams p;
  p.kappa = two_pi * 1.5;
  p.gamma13 = two_pi * 1.5;
  p.gamma23 = two_pi * 1.5;
  p.gamma_d = two_pi * 0.13;
  p.omega12 = two_pi * 0.3;
  p.omega23 = two_pi * 4.0;
  p.delta12 = 0;
  p.delta23 = 0;
  p.fock_cutoff = 5;
  if (name == "nominal") {
    p.g = two_pi * 10.2;
  } else if (name == "reduced-g") {
    p.g = two_pi * 9.2;
  } else {
    throw ValidationError("config: unknown preset '" + name +
                          "' (expected nominal or reduced-g)");
  }
  return p;
}

struct ScanConfig {
  std::vector<ScanAxis> axes;  // grids already in rad/us
  ScanObservable observable = ScanObservable::emission_rate;
  ScanEngine engine = ScanEngine::steady_state;
  double efficiency = 0.26;
  int n_trajectories = 200;
  double t_max = 60.0;   // us, montecarlo engine only
  double dt_max = 0.05;  // us
};

struct CorrelationConfig {
  double tau_max = 20.0;  // us
  int n_tau = 400;
  bool coherent_selftest = false;  // run the driven-empty-cavity reference
};

struct MonteCarloConfig {
  int n_trajectories = 1000;
  double t_max = 60.0;   // us
  double dt_max = 0.05;  // us
  double efficiency = 0.26;
  double zeeman = two_pi * 1.0;  // rad/us
  int fock_cutoff = 2;
  bool free_space = true;  // also run the g=0 comparison ensemble
  int rate_bins = 40;
  std::string experimental_csv;  // optional overlay for scale/offset fit
};

struct ZenoConfig {
  std::vector<double> omega23 = {two_pi * 1.0, two_pi * 9.2};  // rad/us
  int n_max = 5;
};

struct FomConfig {
  // Sweep variables; gamma33 sweeps the total |3> polarization decay
  // gamma13+gamma23 at a fixed 1:1 split.
  std::vector<std::string> variables = {"g", "gamma33", "kappa", "gamma_d"};
  int points = 11;
};

struct RunConfig {
  SystemParams params = preset_params("nominal");
  ScanConfig scan;
  CorrelationConfig correlation;
  MonteCarloConfig montecarlo;
  ZenoConfig zeno;
  FomConfig fom;
  bool emit_plots = false;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ValidationError("config: axis needs points >= 1");
  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < n; ++i)
    g[std::size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
  return g;
}

inline void require_keys(const nlohmann::json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ValidationError("config: '" + path + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ValidationError("config: unknown key '" + path + "." + it.key() +
                            "'");
  }
}

template <typename T>
void read_field(const nlohmann::json& j, const std::string& path,
                const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(target);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config: bad value at '" + path + "." + key +
                          "': " + e.what());
  }
}

// MHz-at-the-boundary field: stored internally as rad/us.
inline void read_mhz(const nlohmann::json& j, const std::string& path,
                     const char* key, double& target) {
  double mhz = target / two_pi;
  read_field(j, path, key, mhz);
  target = two_pi * mhz;
}

inline ScanAxis parse_axis(const nlohmann::json& j, const std::string& path) {
  require_keys(j, path, {"parameter", "min_mhz", "max_mhz", "points",
                         "values_mhz"});
  ScanAxis ax;
  read_field(j, path, "parameter", ax.parameter);
  if (ax.parameter.empty())
    throw ValidationError("config: '" + path + ".parameter' is required");
  if (j.contains("values_mhz")) {
    if (j.contains("min_mhz") || j.contains("max_mhz") || j.contains("points"))
      throw ValidationError("config: '" + path +
                            "' mixes values_mhz with min/max/points");
    std::vector<double> vals;
    read_field(j, path, "values_mhz", vals);
    for (double v : vals) ax.grid.push_back(two_pi * v);
  } else {
    if (!j.contains("min_mhz") || !j.contains("max_mhz") ||
        !j.contains("points"))
      throw ValidationError("config: '" + path +
                            "' needs min_mhz, max_mhz and points");
    double lo = 0, hi = 0;
    int n = 0;
    read_field(j, path, "min_mhz", lo);
    read_field(j, path, "max_mhz", hi);
    read_field(j, path, "points", n);
    ax.grid = linspace(two_pi * lo, two_pi * hi, n);
  }
  return ax;
}

}  // namespace detail

inline RunConfig default_config() {
  RunConfig cfg;
  // Default spectroscopy window: wide enough on the drive axis to contain
  // the outer one-photon branches (|Delta12| up to ~g+...), narrower on
  // Delta23 where only the crossing region matters.
  cfg.scan.axes.push_back(
      {"delta12", detail::linspace(-two_pi * 15, two_pi * 15, 61)});
  cfg.scan.axes.push_back(
      {"delta23", detail::linspace(-two_pi * 10, two_pi * 10, 41)});
  return cfg;
}

inline RunConfig parse_config(const nlohmann::json& j) {
  detail::require_keys(j, "$", {"preset", "params", "scan", "correlation",
                                "montecarlo", "zeno", "fom", "emit_plots",
                                "seed"});
  RunConfig cfg = default_config();

  std::string preset = "nominal";
  detail::read_field(j, "$", "preset", preset);
  cfg.params = preset_params(preset);

  if (j.contains("params")) {
    const auto& p = j.at("params");
    detail::require_keys(
        p, "params",
        {"g_mhz", "kappa_mhz", "gamma13_mhz", "gamma23_mhz", "gamma_d_mhz",
         "omega12_mhz", "omega23_mhz", "delta12_mhz", "delta23_mhz",
         "fock_cutoff"});
    detail::read_mhz(p, "params", "g_mhz", cfg.params.g);
    detail::read_mhz(p, "params", "kappa_mhz", cfg.params.kappa);
    detail::read_mhz(p, "params", "gamma13_mhz", cfg.params.gamma13);
    detail::read_mhz(p, "params", "gamma23_mhz", cfg.params.gamma23);
    detail::read_mhz(p, "params", "gamma_d_mhz", cfg.params.gamma_d);
    detail::read_mhz(p, "params", "omega12_mhz", cfg.params.omega12);
    detail::read_mhz(p, "params", "omega23_mhz", cfg.params.omega23);
    detail::read_mhz(p, "params", "delta12_mhz", cfg.params.delta12);
    detail::read_mhz(p, "params", "delta23_mhz", cfg.params.delta23);
    detail::read_field(p, "params", "fock_cutoff", cfg.params.fock_cutoff);
    cfg.params.validate();
  }

  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    detail::require_keys(s, "scan",
                         {"axes", "observable", "engine", "efficiency",
                          "n_trajectories", "t_max_us", "dt_max_us"});
    if (s.contains("axes")) {
      if (!s.at("axes").is_array())
        throw ValidationError("config: 'scan.axes' must be an array");
      cfg.scan.axes.clear();
      int k = 0;
      for (const auto& a : s.at("axes"))
        cfg.scan.axes.push_back(
            detail::parse_axis(a, "scan.axes[" + std::to_string(k++) + "]"));
    }
    std::string obs = to_string(cfg.scan.observable);
    std::string eng = to_string(cfg.scan.engine);
    detail::read_field(s, "scan", "observable", obs);
    detail::read_field(s, "scan", "engine", eng);
    cfg.scan.observable = parse_observable(obs);
    cfg.scan.engine = parse_engine(eng);
    detail::read_field(s, "scan", "efficiency", cfg.scan.efficiency);
    detail::read_field(s, "scan", "n_trajectories", cfg.scan.n_trajectories);
    detail::read_field(s, "scan", "t_max_us", cfg.scan.t_max);
    detail::read_field(s, "scan", "dt_max_us", cfg.scan.dt_max);
  }

  if (j.contains("correlation")) {
    const auto& c = j.at("correlation");
    detail::require_keys(c, "correlation",
                         {"tau_max_us", "n_tau", "coherent_selftest"});
    detail::read_field(c, "correlation", "tau_max_us",
                       cfg.correlation.tau_max);
    detail::read_field(c, "correlation", "n_tau", cfg.correlation.n_tau);
    detail::read_field(c, "correlation", "coherent_selftest",
                       cfg.correlation.coherent_selftest);
  }

  if (j.contains("montecarlo")) {
    const auto& m = j.at("montecarlo");
    detail::require_keys(
        m, "montecarlo",
        {"n_trajectories", "t_max_us", "dt_max_us", "efficiency",
         "zeeman_mhz", "fock_cutoff", "free_space", "rate_bins",
         "experimental_csv"});
    detail::read_field(m, "montecarlo", "n_trajectories",
                       cfg.montecarlo.n_trajectories);
    detail::read_field(m, "montecarlo", "t_max_us", cfg.montecarlo.t_max);
    detail::read_field(m, "montecarlo", "dt_max_us", cfg.montecarlo.dt_max);
    detail::read_field(m, "montecarlo", "efficiency",
                       cfg.montecarlo.efficiency);
    detail::read_mhz(m, "montecarlo", "zeeman_mhz", cfg.montecarlo.zeeman);
    detail::read_field(m, "montecarlo", "fock_cutoff",
                       cfg.montecarlo.fock_cutoff);
    detail::read_field(m, "montecarlo", "free_space",
                       cfg.montecarlo.free_space);
    detail::read_field(m, "montecarlo", "rate_bins", cfg.montecarlo.rate_bins);
    detail::read_field(m, "montecarlo", "experimental_csv",
                       cfg.montecarlo.experimental_csv);
  }

  if (j.contains("zeno")) {
    const auto& z = j.at("zeno");
    detail::require_keys(z, "zeno", {"omega23_mhz", "n_max"});
    if (z.contains("omega23_mhz")) {
      std::vector<double> mhz;
      detail::read_field(z, "zeno", "omega23_mhz", mhz);
      cfg.zeno.omega23.clear();
      for (double v : mhz) cfg.zeno.omega23.push_back(two_pi * v);
    }
    detail::read_field(z, "zeno", "n_max", cfg.zeno.n_max);
    if (cfg.zeno.n_max < 1)
      throw ValidationError("config: 'zeno.n_max' must be >= 1");
  }

  if (j.contains("fom")) {
    const auto& f = j.at("fom");
    detail::require_keys(f, "fom", {"variables", "points"});
    detail::read_field(f, "fom", "variables", cfg.fom.variables);
    detail::read_field(f, "fom", "points", cfg.fom.points);
    for (const auto& v : cfg.fom.variables)
      if (v != "g" && v != "gamma33" && v != "kappa" && v != "gamma_d")
        throw ValidationError("config: unknown fom variable '" + v +
                              "' (expected g, gamma33, kappa, gamma_d)");
    if (cfg.fom.points < 2)
      throw ValidationError("config: 'fom.points' must be >= 2");
  }

  detail::read_field(j, "$", "emit_plots", cfg.emit_plots);
  detail::read_field(j, "$", "seed", cfg.seed);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("config: cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: parse error in '" + path.string() +
                          "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace darkcavity
