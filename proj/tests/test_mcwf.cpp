#include <catch2/catch_amalgamated.hpp>

#include "darkcavity/liouvillian.hpp"
#include "darkcavity/mcwf.hpp"
#include "darkcavity/model.hpp"
#include "darkcavity/multilevel.hpp"

#include <cmath>
#include <vector>

using namespace darkcavity;

namespace {

SystemParams cycle_params() {
  SystemParams p;
  p.g = 9.2 * two_pi;
  p.kappa = 1.5 * two_pi;
  p.gamma13 = 1.5 * two_pi;
  p.gamma23 = 1.5 * two_pi;
  p.gamma_d = 0.13 * two_pi;
  p.omega12 = 0.3 * two_pi;
  p.omega23 = 4.0 * two_pi;
  return p;
}

// Wrap the 3-level cavity model in the trajectory-engine container; only
// the cavity loss channel emits countable photons.
AssembledModel wrap_three_level(const SystemParams& p) {
  const ModelRealization m = build_model(p);
  AssembledModel am;
  am.space = m.hamiltonian.space;
  am.hamiltonian = m.hamiltonian;
  am.collapse_ops = m.collapse_ops;
  am.counts_photon = {false, false, true, false};
  am.fock_cutoff = p.fock_cutoff;
  return am;
}

}  // namespace

TEST_CASE("seed derivation is deterministic and well mixed", "[mcwf]") {
  // splitmix64 reference output for state 0 (widely published test vector)
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 0, 0xde7ec7ull) != derive_seed(1, 0));

  std::mt19937_64 rng(42), rng2(42);
  double mean = 0;
  bool identical = true;
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(rng);
    identical = identical && (u == uniform01(rng2));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  CHECK(identical);  // same seed, same stream
  CHECK(mean / 10000 == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("trajectories are reproducible from their seed", "[mcwf]") {
  SystemParams p = cycle_params();
  p.fock_cutoff = 2;
  const AssembledModel am = wrap_three_level(p);
  const TrajectoryResult a = run_trajectory(am, 20.0, 0.05, 12345);
  const TrajectoryResult b = run_trajectory(am, 20.0, 0.05, 12345);
  REQUIRE(a.jump_events.size() == b.jump_events.size());
  for (size_t k = 0; k < a.jump_events.size(); ++k) {
    CHECK(a.jump_events[k].time == b.jump_events[k].time);
    CHECK(a.jump_events[k].channel == b.jump_events[k].channel);
  }
  CHECK(a.cavity_photon_count == b.cavity_photon_count);
  CHECK(a.terminal_state == "active");  // no trap levels in the 3-level cycle
  CHECK(a.jump_events.size() > 0);

  // jump times live on the dyadic lattice dt_max/128 and are ordered
  const double unit = 0.05 / 128.0;
  double last = 0;
  for (const JumpEvent& j : a.jump_events) {
    const double steps = j.time / unit;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    CHECK(j.time >= last);
    CHECK(j.channel >= 0);
    CHECK(j.channel < 4);
    last = j.time;
  }

  const TrajectoryResult c = run_trajectory(am, 20.0, 0.05, 54321);
  CHECK((a.jump_events.size() != c.jump_events.size() ||
         a.jump_events[0].time != c.jump_events[0].time));

  CHECK_THROWS_AS(run_trajectory(am, -1.0, 0.05, 1), ValidationError);
  CHECK_THROWS_AS(run_trajectory(am, 10.0, 0.0, 1), ValidationError);
}

TEST_CASE("ensemble averages reproduce the master equation",
          "[mcwf][slow]") {
  // Stronger probe for more photons per trajectory, short window.
  SystemParams p = cycle_params();
  p.omega12 = 1.0 * two_pi;
  p.fock_cutoff = 3;
  const AssembledModel am = wrap_three_level(p);
  const int nf = p.fock_cutoff + 1;
  const double t_final = 4.0, dt = 0.02;
  const int n_traj = 1500;

  const Operator num =
      embed(annihilation_op(p.fock_cutoff), 1, am.hamiltonian.space).dagger() *
      embed(annihilation_op(p.fock_cutoff), 1, am.hamiltonian.space);
  const Operator s22 = embed(atomic_projector(2, 2, 3), 0, am.hamiltonian.space);
  const Operator s33 = embed(atomic_projector(3, 3, 3), 0, am.hamiltonian.space);

  double sum_n = 0, sum2_n = 0, sum_22 = 0, sum2_22 = 0, sum_33 = 0,
         sum2_33 = 0;
  for (int i = 0; i < n_traj; ++i) {
    double vn = 0, v22 = 0, v33 = 0;
    const SampleObserver obs = [&](double t, const Vec& psi) {
      if (std::abs(t - t_final) > 1e-9) return;
      vn = (psi.adjoint() * num.matrix * psi)(0).real();
      v22 = (psi.adjoint() * s22.matrix * psi)(0).real();
      v33 = (psi.adjoint() * s33.matrix * psi)(0).real();
    };
    run_trajectory_observed(am, t_final, dt, derive_seed(7, i), obs);
    sum_n += vn;
    sum2_n += vn * vn;
    sum_22 += v22;
    sum2_22 += v22 * v22;
    sum_33 += v33;
    sum2_33 += v33 * v33;
  }
  auto finish = [&](double s, double s2) {
    const double mean = s / n_traj;
    const double var = std::max(s2 / n_traj - mean * mean, 0.0);
    return std::pair<double, double>(mean, std::sqrt(var / n_traj));
  };
  const auto [mn, en] = finish(sum_n, sum2_n);
  const auto [m22, e22] = finish(sum_22, sum2_22);
  const auto [m33, e33] = finish(sum_33, sum2_33);

  // master-equation reference at the same instant
  const Liouvillian L = build_liouvillian(build_model(p));
  DensityMatrix rho0 = DensityMatrix::pure(basis_state(am.hamiltonian.space, {0, 0}));
  const DensityMatrix rho_t = evolve(L, rho0, t_final);
  const double ref_n = expectation(rho_t, num).real();
  const double ref_22 = expectation(rho_t, s22).real();
  const double ref_33 = expectation(rho_t, s33).real();

  INFO("n: mc " << mn << " +- " << en << " vs me " << ref_n);
  CHECK(std::abs(mn - ref_n) <= 4 * en + 2e-3 * std::max(ref_n, 0.01));
  INFO("s22: mc " << m22 << " +- " << e22 << " vs me " << ref_22);
  CHECK(std::abs(m22 - ref_22) <= 4 * e22 + 2e-3 * std::max(ref_22, 0.01));
  INFO("s33: mc " << m33 << " +- " << e33 << " vs me " << ref_33);
  CHECK(std::abs(m33 - ref_33) <= 4 * e33 + 2e-3 * std::max(ref_33, 0.01));
}

TEST_CASE("photon statistics are independent of thread count",
          "[mcwf]") {
  const AssembledModel am = assemble(build_rb87_model(cycle_params(),
                                                      two_pi, 1));
  EnsembleOptions opt;
  opt.n_trajectories = 64;
  opt.t_max = 10.0;
  opt.dt_max = 0.05;
  opt.master_seed = 99;
  opt.n_threads = 1;
  const PhotonStats s1 = simulate_photon_statistics(am, opt);
  opt.n_threads = 4;
  const PhotonStats s4 = simulate_photon_statistics(am, opt);

  CHECK(s1.mean_detected == s4.mean_detected);
  CHECK(s1.mean_produced == s4.mean_produced);
  CHECK(s1.extrapolated_total == s4.extrapolated_total);
  CHECK(s1.detected_histogram == s4.detected_histogram);
  CHECK(s1.rate_values == s4.rate_values);

  int histo_total = 0;
  for (const auto& [count, traj] : s1.detected_histogram) {
    CHECK(count >= 0);
    histo_total += traj;
  }
  CHECK(histo_total == opt.n_trajectories);
  CHECK(s1.mean_detected <= s1.mean_produced);
  CHECK(s1.n_trajectories == opt.n_trajectories);
  CHECK(s1.efficiency == 0.26);
  CHECK(s1.rate_times.size() == 40);

  // unit efficiency detects every produced photon
  opt.efficiency = 1.0;
  const PhotonStats all = simulate_photon_statistics(am, opt);
  CHECK(all.mean_detected == all.mean_produced);

  opt.n_trajectories = 0;
  CHECK_THROWS_AS(simulate_photon_statistics(am, opt), ValidationError);
  opt.n_trajectories = 4;
  opt.efficiency = 1.5;
  CHECK_THROWS_AS(simulate_photon_statistics(am, opt), ValidationError);
}

TEST_CASE("free-space trajectories end in the trap states",
          "[mcwf][slow]") {
  const MultiLevelModel fm =
      free_space_variant(build_rb87_model(cycle_params(), two_pi, 0));
  const AssembledModel am = assemble(fm);
  int trapped = 0, photons = 0;
  for (int i = 0; i < 20; ++i) {
    const TrajectoryResult tr =
        run_trajectory(am, 400.0, 0.25, derive_seed(5, i));
    if (tr.terminal_state == "d1" || tr.terminal_state == "d2") ++trapped;
    photons += tr.cavity_photon_count;
  }
  // depumping is essentially complete after 400 us
  CHECK(trapped >= 15);
  // in-class spontaneous photons are counted (mean ~6.5 produced)
  CHECK(photons > 20);
}
