#pragma once

// Monte-Carlo wavefunction unraveling of the master equation.
//
// Between jumps the state evolves exactly under exp(-i H_eff dt) with
// H_eff = H - i sum_i C_i^dag C_i (so the squared norm decays at the total
// jump rate 2 <sum C^dag C>).  Jumps are detected by a uniform norm-squared
// threshold; the crossing time is refined by bisection on a dyadic lattice
// of precomputed propagators down to dt_max/128, which keeps all event and
// sample times on an exact integer lattice.
//
// Reproducibility: each trajectory owns two RNG streams derived from
// (master seed, trajectory index) via splitmix64, one for the dynamics and
// one for detection thinning, so ensembles are independent of scheduling.

#include "darkcavity/fits.hpp"
#include "darkcavity/multilevel.hpp"
#include "darkcavity/parallel.hpp"
#include "darkcavity/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cstdint>
#include <functional>
#include <map>
#include <random>

namespace darkcavity {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t salt = 0) {
  return splitmix64(splitmix64(master ^ salt) + index);
}

// Uniform in [0,1) with an explicit construction, identical across
// platforms for a given mt19937_64 stream.
inline double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

struct JumpEvent {
  double time = 0;
  int channel = -1;
};

struct TrajectoryResult {
  std::uint64_t seed = 0;
  std::vector<JumpEvent> jump_events;
  int cavity_photon_count = 0;          // jumps in photon-class channels
  std::string terminal_state = "active";
};

namespace detail {

constexpr int kDyadicDepth = 7;  // finest step = dt_max / 128

struct TrajectoryEngine {
  const AssembledModel& model;
  std::array<Mat, kDyadicDepth + 1> props;  // U_k = exp(-i H_eff dt/2^k)
  std::vector<Mat> cmats;
  double dt_max;

  TrajectoryEngine(const AssembledModel& m, double dt)
      : model(m), dt_max(dt) {
    if (dt <= 0) throw ValidationError("run_trajectory: dt_max must be > 0");
    Mat heff = m.hamiltonian.matrix;
    for (const Operator& c : m.collapse_ops)
      heff += cplx(0, -1) * (c.matrix.adjoint() * c.matrix);
    for (int k = 0; k <= kDyadicDepth; ++k) {
      const double step = dt / double(1 << k);
      props[k] = matrix_exponential((cplx(0, -1) * step * heff).eval());
    }
    for (const Operator& c : m.collapse_ops) cmats.push_back(c.matrix);
  }
};

}  // namespace detail

// Observer receives (time, normalized state) at every multiple of dt_max.
using SampleObserver = std::function<void(double, const Vec&)>;

inline TrajectoryResult run_trajectory_observed(const AssembledModel& model,
                                                double t_max, double dt_max,
                                                std::uint64_t seed,
                                                const SampleObserver& observer) {
  if (t_max <= 0) throw ValidationError("run_trajectory: t_max must be > 0");
  const detail::TrajectoryEngine eng(model, dt_max);
  const int nf = model.fock_cutoff + 1;

  std::mt19937_64 rng(seed);
  TrajectoryResult out;
  out.seed = seed;

  // initial state |1, 0> (ideal preparation)
  Vec psi = Vec::Zero(model.space.total_dim);
  psi(0 * nf + 0) = 1.0;

  const std::int64_t unit_per_step = 1 << detail::kDyadicDepth;
  const double dt_unit = dt_max / double(unit_per_step);
  const std::int64_t n_units =
      std::int64_t(std::ceil(t_max / dt_max - 1e-9)) * unit_per_step;

  double threshold = uniform01(rng);
  std::int64_t pos = 0;  // lattice time in units of dt_unit

  auto do_jump = [&](Vec& state, std::int64_t at) {
    const int nch = int(eng.cmats.size());
    std::vector<double> w(nch);
    double wsum = 0;
    for (int i = 0; i < nch; ++i) {
      w[i] = (eng.cmats[i] * state).squaredNorm();
      wsum += w[i];
    }
    if (wsum <= 0)
      throw SolverError("run_trajectory: jump with zero channel weights");
    double pick = uniform01(rng) * wsum;
    int ch = nch - 1;
    for (int i = 0; i < nch; ++i) {
      if (pick < w[i]) {
        ch = i;
        break;
      }
      pick -= w[i];
    }
    state = eng.cmats[ch] * state;
    state /= state.norm();
    out.jump_events.push_back({double(at) * dt_unit, ch});
    if (model.counts_photon[ch]) ++out.cavity_photon_count;
    threshold = uniform01(rng);
  };

  // Advance by a dyadic chunk of 2^(depth-k) units; on threshold crossing,
  // recurse into halves until the finest unit, then jump there.
  auto advance = [&](auto&& self, Vec& state, int k) -> bool {
    Vec trial = eng.props[k] * state;
    const double n2 = trial.squaredNorm();
    if (n2 >= threshold) {
      state = std::move(trial);
      pos += std::int64_t(1) << (detail::kDyadicDepth - k);
      return false;
    }
    if (k == detail::kDyadicDepth) {
      if (n2 < 1e-280)
        throw SolverError("run_trajectory: norm underflow, dt_max too large");
      state = std::move(trial);
      pos += 1;
      do_jump(state, pos);
      return true;
    }
    if (self(self, state, k + 1)) return true;
    return self(self, state, k + 1);
  };

  if (observer) observer(0.0, psi);
  while (pos < n_units) {
    const std::int64_t boundary =
        (pos / unit_per_step + 1) * unit_per_step;  // next dt_max multiple
    // decompose remaining units to the boundary into dyadic chunks; a jump
    // inside a chunk aborts it, and the loop re-plans from the new position
    while (pos < boundary) {
      const std::int64_t remaining = boundary - pos;
      int k = detail::kDyadicDepth;
      while (k > 0 && (std::int64_t(1) << (detail::kDyadicDepth - k + 1)) <=
                          remaining)
        --k;
      advance(advance, psi, k);
    }
    if (observer) {
      Vec norm_state = psi / psi.norm();
      observer(double(pos) * dt_unit, norm_state);
    }
  }

  // terminal state: population locked in a trap level
  Vec fin = psi / psi.norm();
  for (int lvl : model.trap_levels) {
    const double p = fin.segment(lvl * nf, nf).squaredNorm();
    if (p > 0.999) {
      out.terminal_state = model.level_names[lvl];
      break;
    }
  }
  return out;
}

inline TrajectoryResult run_trajectory(const AssembledModel& model,
                                       double t_max, double dt_max,
                                       std::uint64_t seed) {
  return run_trajectory_observed(model, t_max, dt_max, seed, nullptr);
}

struct PhotonStats {
  int n_trajectories = 0;
  std::map<int, int> detected_histogram;
  double mean_detected = 0;
  double mean_produced = 0;
  double extrapolated_total = 0;  // from the exponential count-rate fit
  double efficiency = 1.0;
  std::vector<double> rate_times;   // bin centers, us
  std::vector<double> rate_values;  // detected photons per trajectory per us
  ExpDecayFit rate_fit;
  bool rate_fit_valid = false;
};

struct EnsembleOptions {
  int n_trajectories = 1000;
  double t_max = 60.0;
  double dt_max = 0.05;
  double efficiency = 0.26;
  std::uint64_t master_seed = 1;
  int n_threads = 1;
  int rate_bins = 40;
};

// Runs the ensemble, Bernoulli-thins photon jumps at the detection
// efficiency, histograms detected counts and fits the detected count rate
// with an exponential for the extrapolated per-trajectory total.
// Deterministic for a fixed master seed regardless of n_threads.
inline PhotonStats simulate_photon_statistics(
    const AssembledModel& model, const EnsembleOptions& opt,
    std::vector<TrajectoryResult>* keep_trajectories = nullptr) {
  if (opt.n_trajectories < 1)
    throw ValidationError("simulate_photon_statistics: need >= 1 trajectory");
  if (opt.efficiency < 0 || opt.efficiency > 1)
    throw ValidationError("simulate_photon_statistics: efficiency in [0,1]");

  struct PerTraj {
    int produced = 0;
    int detected = 0;
    std::vector<double> detected_times;
    TrajectoryResult record;
  };
  std::vector<PerTraj> results(opt.n_trajectories);

  parallel_for(opt.n_trajectories, opt.n_threads, [&](int i) {
    const std::uint64_t seed = derive_seed(opt.master_seed, i);
    TrajectoryResult tr = run_trajectory(model, opt.t_max, opt.dt_max, seed);
    std::mt19937_64 thin(derive_seed(opt.master_seed, i, 0xde7ec7ull));
    PerTraj& pt = results[i];
    for (const JumpEvent& j : tr.jump_events) {
      if (!model.counts_photon[j.channel]) continue;
      ++pt.produced;
      if (uniform01(thin) < opt.efficiency) {
        ++pt.detected;
        pt.detected_times.push_back(j.time);
      }
    }
    pt.record = std::move(tr);
  });

  PhotonStats stats;
  stats.n_trajectories = opt.n_trajectories;
  stats.efficiency = opt.efficiency;
  std::vector<double> bin_counts(opt.rate_bins, 0.0);
  const double bin_w = opt.t_max / opt.rate_bins;
  for (PerTraj& pt : results) {
    stats.detected_histogram[pt.detected] += 1;
    stats.mean_detected += pt.detected;
    stats.mean_produced += pt.produced;
    for (double t : pt.detected_times) {
      int b = std::min(int(t / bin_w), opt.rate_bins - 1);
      bin_counts[b] += 1.0;
    }
    if (keep_trajectories) keep_trajectories->push_back(std::move(pt.record));
  }
  stats.mean_detected /= opt.n_trajectories;
  stats.mean_produced /= opt.n_trajectories;

  for (int b = 0; b < opt.rate_bins; ++b) {
    stats.rate_times.push_back((b + 0.5) * bin_w);
    stats.rate_values.push_back(bin_counts[b] /
                                (bin_w * opt.n_trajectories));
  }
  try {
    stats.rate_fit = fit_exponential_decay(stats.rate_times, stats.rate_values);
    stats.extrapolated_total = stats.rate_fit.extrapolated_total;
    stats.rate_fit_valid = true;
  } catch (const Error&) {
    stats.extrapolated_total = stats.mean_detected;
    stats.rate_fit_valid = false;
  }
  return stats;
}

}  // namespace darkcavity
