#pragma once

// Parameter sweeps over the solver stack: 1D/2D grids of steady-state
// observables or Monte-Carlo photon statistics, with per-point diagnostics,
// analytic eigenenergy overlays for the detuning map, peak extraction and a
// Fock-cutoff convergence guard.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "darkcavity/liouvillian.hpp"
#include "darkcavity/mcwf.hpp"
#include "darkcavity/model.hpp"
#include "darkcavity/multilevel.hpp"
#include "darkcavity/observables.hpp"
#include "darkcavity/parallel.hpp"
#include "darkcavity/types.hpp"

namespace darkcavity {

enum class ScanObservable {
  emission_rate,
  g2_zero,
  photon_number,
  sigma33,
  figure_of_merit,
  extrapolated_photons,
};

enum class ScanEngine { steady_state, montecarlo };

inline const char* to_string(ScanObservable o) {
  switch (o) {
    case ScanObservable::emission_rate: return "emission_rate";
    case ScanObservable::g2_zero: return "g2_zero";
    case ScanObservable::photon_number: return "photon_number";
    case ScanObservable::sigma33: return "sigma33";
    case ScanObservable::figure_of_merit: return "figure_of_merit";
    case ScanObservable::extrapolated_photons: return "extrapolated_photons";
  }
  throw ValidationError("unknown ScanObservable");
}

inline const char* to_string(ScanEngine e) {
  switch (e) {
    case ScanEngine::steady_state: return "steady_state";
    case ScanEngine::montecarlo: return "montecarlo";
  }
  throw ValidationError("unknown ScanEngine");
}

inline ScanObservable parse_observable(const std::string& s) {
  for (ScanObservable o :
       {ScanObservable::emission_rate, ScanObservable::g2_zero,
        ScanObservable::photon_number, ScanObservable::sigma33,
        ScanObservable::figure_of_merit, ScanObservable::extrapolated_photons})
    if (s == to_string(o)) return o;
  throw ValidationError("unknown observable '" + s + "'");
}

inline ScanEngine parse_engine(const std::string& s) {
  for (ScanEngine e : {ScanEngine::steady_state, ScanEngine::montecarlo})
    if (s == to_string(e)) return e;
  throw ValidationError("unknown engine '" + s + "'");
}

// Writes `value` (rad/us for rates/frequencies, signed for detunings) into
// the named SystemParams field.
inline void apply_param(SystemParams& p, const std::string& name,
                        double value) {
  if (name == "g") p.g = value;
  else if (name == "kappa") p.kappa = value;
  else if (name == "gamma13") p.gamma13 = value;
  else if (name == "gamma23") p.gamma23 = value;
  else if (name == "gamma_d") p.gamma_d = value;
  else if (name == "omega12") p.omega12 = value;
  else if (name == "omega23") p.omega23 = value;
  else if (name == "delta12") p.delta12 = value;
  else if (name == "delta23") p.delta23 = value;
  else
    throw ValidationError("apply_param: unknown parameter '" + name + "'");
}

struct ScanAxis {
  std::string parameter;
  std::vector<double> grid;  // rad/us, strictly monotone
};

struct ScanSpec {
  SystemParams base_params;
  std::vector<ScanAxis> axes;  // 1 or 2 axes
  ScanObservable observable = ScanObservable::emission_rate;
  ScanEngine engine = ScanEngine::steady_state;
  double efficiency = 0.26;  // detection chain, applied to emission_rate / MC

  // Monte-Carlo engine settings (ignored by the steady-state engine).
  std::uint64_t master_seed = 1;
  int n_trajectories = 200;
  double t_max = 60.0;
  double dt_max = 0.05;
  double zeeman_shift = two_pi * 1.0;
  int mc_fock_cutoff = 2;

  int n_threads = 1;

  void validate() const {
    base_params.validate();
    if (axes.empty() || axes.size() > 2)
      throw ValidationError("ScanSpec: need 1 or 2 axes");
    for (const auto& ax : axes) {
      if (ax.grid.empty())
        throw ValidationError("ScanSpec: empty grid on axis '" +
                              ax.parameter + "'");
      for (std::size_t i = 0; i < ax.grid.size(); ++i) {
        if (!std::isfinite(ax.grid[i]))
          throw ValidationError("ScanSpec: non-finite grid value on axis '" +
                                ax.parameter + "'");
        if (i > 0 && !(ax.grid[i] > ax.grid[i - 1]) &&
            !(ax.grid[i] < ax.grid[i - 1]))
          throw ValidationError("ScanSpec: grid not strictly monotone on '" +
                                ax.parameter + "'");
        if (i > 1 && (ax.grid[i] > ax.grid[i - 1]) !=
                         (ax.grid[i - 1] > ax.grid[i - 2]))
          throw ValidationError("ScanSpec: grid not strictly monotone on '" +
                                ax.parameter + "'");
      }
      SystemParams probe = base_params;
      apply_param(probe, ax.parameter, ax.grid.front());  // name check
    }
    if (axes.size() == 2 && axes[0].parameter == axes[1].parameter)
      throw ValidationError("ScanSpec: both axes scan '" +
                            axes[0].parameter + "'");
    if (efficiency < 0 || efficiency > 1)
      throw ValidationError("ScanSpec: efficiency must be in [0,1]");
    if (engine == ScanEngine::montecarlo) {
      if (observable != ScanObservable::photon_number &&
          observable != ScanObservable::extrapolated_photons)
        throw ValidationError(
            "ScanSpec: montecarlo engine supports photon_number (mean "
            "detected) and extrapolated_photons only");
      if (n_trajectories < 1)
        throw ValidationError("ScanSpec: n_trajectories must be >= 1");
      if (!(t_max > 0) || !(dt_max > 0))
        throw ValidationError("ScanSpec: t_max and dt_max must be > 0");
    }
  }
};

struct ScanPoint {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // failure reason when !converged
};

struct ScanResult {
  ScanSpec spec;
  std::vector<int> shape;        // one entry per axis
  std::vector<ScanPoint> points; // row-major, axis 0 slowest

  int n_points() const { return int(points.size()); }
  int n_converged() const {
    int n = 0;
    for (const auto& p : points) n += p.converged ? 1 : 0;
    return n;
  }
  int n_failed() const { return n_points() - n_converged(); }

  const ScanPoint& at(int i) const { return points.at(std::size_t(i)); }
  const ScanPoint& at(int i, int j) const {
    if (shape.size() != 2) throw DimensionError("ScanResult::at: not 2D");
    return points.at(std::size_t(i) * std::size_t(shape[1]) + std::size_t(j));
  }
};

namespace detail {

// Steady-state evaluation of one scan observable.  figure_of_merit maps a
// vanishing |3> population to +inf (an honest "infinitely dark" sentinel)
// instead of throwing, so that sweeps across the dark point keep going.
inline double steady_observable(const SystemParams& p, ScanObservable obs,
                                double efficiency, double* residual_out) {
  const ModelRealization model = build_model(p);
  const Liouvillian L = build_liouvillian(model);
  const DensityMatrix rho = steady_state(L);
  if (residual_out)
    *residual_out = (L.matrix * vectorize(rho.matrix)).norm();
  const Operator a = embed(annihilation_op(p.fock_cutoff), 1, rho.space);
  switch (obs) {
    case ScanObservable::emission_rate:
      return emission_rate(rho, a, p.kappa, efficiency);
    case ScanObservable::g2_zero:
      return g2_zero(rho, a);
    case ScanObservable::photon_number:
      return expectation(rho, a.dagger() * a).real();
    case ScanObservable::sigma33: {
      const Operator s33 = embed(atomic_projector(3, 3, 3), 0, rho.space);
      return expectation(rho, s33).real();
    }
    case ScanObservable::figure_of_merit: {
      const Operator s33 = embed(atomic_projector(3, 3, 3), 0, rho.space);
      const double pop3 = expectation(rho, s33).real();
      const double nbar = expectation(rho, a.dagger() * a).real();
      if (pop3 <= 1e-14) return std::numeric_limits<double>::infinity();
      return nbar / pop3;
    }
    case ScanObservable::extrapolated_photons:
      throw ValidationError(
          "extrapolated_photons requires the montecarlo engine");
  }
  throw ValidationError("unknown ScanObservable");
}

inline double steady_observable(const SystemParams& p, ScanObservable obs,
                                double efficiency = 1.0) {
  return steady_observable(p, obs, efficiency, nullptr);
}

}  // namespace detail

inline ScanResult run_scan(const ScanSpec& spec) {
  spec.validate();
  ScanResult out;
  out.spec = spec;
  for (const auto& ax : spec.axes) out.shape.push_back(int(ax.grid.size()));
  std::size_t total = 1;
  for (int s : out.shape) total *= std::size_t(s);
  out.points.resize(total);

  const int n1 = out.shape.size() == 2 ? out.shape[1] : 1;
  auto params_at = [&](std::size_t idx) {
    SystemParams p = spec.base_params;
    const int i = int(idx / std::size_t(n1));
    const int j = int(idx % std::size_t(n1));
    apply_param(p, spec.axes[0].parameter,
                spec.axes[0].grid[std::size_t(i)]);
    if (spec.axes.size() == 2)
      apply_param(p, spec.axes[1].parameter, spec.axes[1].grid[std::size_t(j)]);
    return p;
  };

  auto eval_point = [&](int k) {
    ScanPoint& pt = out.points[std::size_t(k)];
    try {
      const SystemParams p = params_at(std::size_t(k));
      if (spec.engine == ScanEngine::steady_state) {
        pt.value = detail::steady_observable(p, spec.observable,
                                             spec.efficiency, &pt.residual);
      } else {
        const MultiLevelModel mlm =
            build_rb87_model(p, spec.zeeman_shift, spec.mc_fock_cutoff);
        EnsembleOptions opt;
        opt.n_trajectories = spec.n_trajectories;
        opt.t_max = spec.t_max;
        opt.dt_max = spec.dt_max;
        opt.efficiency = spec.efficiency;
        // Seed split per grid point keeps the scan deterministic for a
        // fixed master seed regardless of scheduling.
        opt.master_seed =
            derive_seed(spec.master_seed, std::uint64_t(k), 0x5ca11ull);
        opt.n_threads = 1;
        const PhotonStats stats = simulate_photon_statistics(assemble(mlm), opt);
        pt.value = spec.observable == ScanObservable::photon_number
                       ? stats.mean_detected
                       : stats.extrapolated_total;
      }
      pt.converged = true;
    } catch (const Error& e) {
      pt.converged = false;
      pt.value = std::numeric_limits<double>::quiet_NaN();
      pt.error = e.what();
    }
  };

  parallel_for(int(total), spec.n_threads, eval_point);
  return out;
}

// ---------------------------------------------------------------------------
// Analytic one-excitation eigenenergies for the detuning map overlay.
//
// In the frame of build_hamiltonian the one-excitation block over
// {|1,1>, |2,0>, |3,0>} is -Delta12*I + A(Delta23) with
//   A(v) = [[-v, 0, g], [0, 0, Omega23/2], [g, Omega23/2, -v]].
// A weak probe from |1,0> (energy 0) is resonant when Delta12 equals an
// eigenvalue of A, so each Delta23 gives three Delta12 loci.

struct EigenCurves {
  std::vector<double> delta23;                    // rad/us
  std::array<std::vector<double>, 3> delta12;     // ascending branches
};

inline EigenCurves overlay_eigenenergies(const SystemParams& p,
                                         const std::vector<double>& delta23_grid) {
  p.validate();
  EigenCurves out;
  out.delta23 = delta23_grid;
  for (auto& b : out.delta12) b.reserve(delta23_grid.size());
  for (double v : delta23_grid) {
    Eigen::Matrix3d A;
    A << -v, 0, p.g, 0, 0, 0.5 * p.omega23, p.g, 0.5 * p.omega23, -v;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(A);
    for (int b = 0; b < 3; ++b) out.delta12[std::size_t(b)].push_back(es.eigenvalues()(b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Peak extraction: 8-neighborhood local maxima above a prominence threshold
// (fraction of the global maximum).  Failed points never produce peaks and
// are treated as lower than any finite neighbor.

struct Peak {
  int i = 0, j = 0;        // grid indices (axis 0, axis 1)
  double axis0 = 0, axis1 = 0;
  double value = 0;
};

inline std::vector<Peak> extract_peaks(const ScanResult& result,
                                       double prominence = 0.05) {
  if (result.shape.size() != 2)
    throw DimensionError("extract_peaks: need a 2D scan");
  const int n0 = result.shape[0], n1 = result.shape[1];
  double global_max = -std::numeric_limits<double>::infinity();
  for (const auto& p : result.points)
    if (p.converged && std::isfinite(p.value))
      global_max = std::max(global_max, p.value);
  if (!std::isfinite(global_max)) return {};
  const double floor_value = prominence * global_max;

  std::vector<Peak> peaks;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const ScanPoint& c = result.at(i, j);
      if (!c.converged || !std::isfinite(c.value) || c.value < floor_value)
        continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1 && is_max; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ni = i + di, nj = j + dj;
          if (ni < 0 || ni >= n0 || nj < 0 || nj >= n1) continue;
          const ScanPoint& nb = result.at(ni, nj);
          if (nb.converged && std::isfinite(nb.value) && nb.value > c.value)
            is_max = false;
        }
      }
      if (is_max)
        peaks.push_back({i, j, result.spec.axes[0].grid[std::size_t(i)],
                         result.spec.axes[1].grid[std::size_t(j)], c.value});
    }
  }
  return peaks;
}

// ---------------------------------------------------------------------------
// Fock-cutoff convergence guard: re-solves the observable at cutoff and
// cutoff+2 and flags relative changes above 1e-4.

struct TruncationReport {
  int cutoff_lo = 0, cutoff_hi = 0;
  double value_lo = 0, value_hi = 0;
  double rel_change = 0;
  bool flagged = false;
};

inline TruncationReport truncation_check(
    const SystemParams& params,
    ScanObservable obs = ScanObservable::photon_number,
    double efficiency = 1.0) {
  TruncationReport r;
  r.cutoff_lo = params.fock_cutoff;
  r.cutoff_hi = params.fock_cutoff + 2;
  SystemParams hi = params;
  hi.fock_cutoff = r.cutoff_hi;
  r.value_lo = detail::steady_observable(params, obs, efficiency);
  r.value_hi = detail::steady_observable(hi, obs, efficiency);
  if (std::isinf(r.value_lo) && std::isinf(r.value_hi)) {
    r.rel_change = 0;
  } else {
    const double scale =
        std::max({std::abs(r.value_lo), std::abs(r.value_hi), 1e-300});
    r.rel_change = std::abs(r.value_hi - r.value_lo) / scale;
  }
  r.flagged = !(r.rel_change <= 1e-4);
  return r;
}

}  // namespace darkcavity
