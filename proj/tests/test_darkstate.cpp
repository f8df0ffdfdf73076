#include <catch2/catch_amalgamated.hpp>

#include "darkcavity/darkstate.hpp"
#include "darkcavity/liouvillian.hpp"
#include "darkcavity/model.hpp"

#include <cmath>

using namespace darkcavity;

namespace {

SystemParams ladder_params() {
  // Narrow-ladder working point used throughout this file.
  SystemParams p;
  p.g = 9.2 * two_pi;
  p.kappa = 1.5 * two_pi;
  p.gamma13 = 1.5 * two_pi;
  p.gamma23 = 1.5 * two_pi;
  p.gamma_d = 0.13 * two_pi;
  p.omega12 = 0.3 * two_pi;
  p.omega23 = 1.0 * two_pi;
  p.fock_cutoff = 5;
  return p;
}

}  // namespace

TEST_CASE("dark state amplitudes and normalization", "[darkstate]") {
  const double g = 9.2 * two_pi, om23 = 1.0 * two_pi;
  const int cutoff = 5, nf = cutoff + 1;
  for (int n = 1; n <= cutoff; ++n) {
    const StateVector psi = dark_state(n, g, om23, cutoff);
    REQUIRE(psi.norm() == Catch::Approx(1.0).epsilon(1e-14));
    const double nrm = std::hypot(om23 / 2, g * std::sqrt(double(n)));
    CHECK(psi.amplitudes(0 * nf + n).real() ==
          Catch::Approx(om23 / 2 / nrm).epsilon(1e-13));
    CHECK(psi.amplitudes(1 * nf + (n - 1)).real() ==
          Catch::Approx(-g * std::sqrt(double(n)) / nrm).epsilon(1e-13));
    // exactly two nonzero amplitudes, none on the excited level
    int nonzero = 0;
    for (int i = 0; i < psi.amplitudes.size(); ++i)
      if (std::abs(psi.amplitudes(i)) > 0) ++nonzero;
    CHECK(nonzero == 2);
    CHECK(psi.amplitudes.segment(2 * nf, nf).norm() == 0.0);
  }
  CHECK_THROWS_AS(dark_state(0, g, om23, cutoff), DimensionError);
  CHECK_THROWS_AS(dark_state(6, g, om23, cutoff), DimensionError);
  CHECK_THROWS_AS(dark_state(1, 0.0, 0.0, cutoff), ValidationError);
}

TEST_CASE("dark states are annihilated by the resonant Hamiltonian",
          "[darkstate]") {
  SystemParams p = ladder_params();
  p.omega12 = 0;  // probe off: the ladder states are exact eigenstates
  const Operator h = build_hamiltonian(p);
  for (int n = 1; n <= p.fock_cutoff; ++n) {
    const StateVector psi = dark_state(n, p.g, p.omega23, p.fock_cutoff);
    CHECK((h.matrix * psi.amplitudes).norm() <= 1e-10);
  }
}

TEST_CASE("bright states are eigenstates at +-E_n", "[darkstate]") {
  SystemParams p = ladder_params();
  p.omega12 = 0;
  const Operator h = build_hamiltonian(p);
  for (int n = 1; n <= p.fock_cutoff; ++n) {
    const BrightStates bs = bright_states(n, p.g, p.omega23, p.fock_cutoff);
    const double en_expect =
        std::sqrt(n * p.g * p.g + p.omega23 * p.omega23 / 4);
    CHECK(bs.energy == Catch::Approx(en_expect).epsilon(1e-14));
    CHECK((h.matrix * bs.plus.amplitudes - bs.energy * bs.plus.amplitudes)
              .norm() <= 1e-9);
    CHECK((h.matrix * bs.minus.amplitudes + bs.energy * bs.minus.amplitudes)
              .norm() <= 1e-9);
    CHECK(std::abs(bs.plus.amplitudes.dot(bs.minus.amplitudes)) <= 1e-14);
    const StateVector dark = dark_state(n, p.g, p.omega23, p.fock_cutoff);
    CHECK(std::abs(bs.plus.amplitudes.dot(dark.amplitudes)) <= 1e-14);
  }
}

TEST_CASE("first-rung splitting at the strong-drive working point",
          "[darkstate]") {
  // E_1 = sqrt(g^2 + Omega23^2/4) = 2pi * 10.3942... at g/2pi = 10.2,
  // Omega23/2pi = 4.
  const BrightStates bs = bright_states(1, 10.2 * two_pi, 4.0 * two_pi, 2);
  CHECK(bs.energy / two_pi == Catch::Approx(10.3942291681).epsilon(1e-9));
}

TEST_CASE("ladder decay rates and effective drives match references",
          "[darkstate]") {
  const SystemParams p = ladder_params();
  // Reference numbers from an independent closed-form evaluation (rad/us).
  CHECK(zeno_decay_rate(1, p.g, p.omega23, p.kappa) ==
        Catch::Approx(2.775585451988e-02).epsilon(1e-10));
  CHECK(zeno_decay_rate(2, p.g, p.omega23, p.kappa) ==
        Catch::Approx(9.438676353326e+00).epsilon(1e-10));
  CHECK(zeno_decay_rate(3, p.g, p.omega23, p.kappa) ==
        Catch::Approx(1.885882607337e+01).epsilon(1e-10));
  CHECK(zeno_decay_rate(4, p.g, p.omega23, p.kappa) ==
        Catch::Approx(2.828128820624e+01).epsilon(1e-10));
  CHECK(effective_drive(1, p.g, p.omega12, p.omega23) ==
        Catch::Approx(1.882177960171e+00).epsilon(1e-10));
  CHECK(effective_drive(2, p.g, p.omega12, p.omega23) ==
        Catch::Approx(1.022168291818e-01).epsilon(1e-10));
  CHECK_THROWS_AS(zeno_decay_rate(0, p.g, p.omega23, p.kappa),
                  ValidationError);
  CHECK_THROWS_AS(effective_drive(0, p.g, p.omega12, p.omega23),
                  ValidationError);
}

TEST_CASE("golden-rule rate equals the cavity-overlap expression",
          "[darkstate]") {
  // kappa |<Psi_{n-1}^0| a |Psi_n^0>|^2 = Gamma_n holds exactly; check the
  // two independent code paths against each other.
  for (double om23_mhz : {1.0, 2.5, 4.0}) {
    const double g = 9.2 * two_pi, om23 = om23_mhz * two_pi,
                 kap = 1.5 * two_pi;
    const int cutoff = 5;
    const HilbertSpace space = model_space(cutoff);
    const Operator a = embed(annihilation_op(cutoff), 1, space);
    for (int n = 2; n <= cutoff; ++n) {
      const StateVector hi = dark_state(n, g, om23, cutoff);
      const StateVector lo = dark_state(n - 1, g, om23, cutoff);
      const double overlap_rate =
          kap * std::norm(lo.amplitudes.dot(a.matrix * hi.amplitudes));
      const double closed = zeno_decay_rate(n, g, om23, kap);
      CHECK(std::abs(overlap_rate / closed - 1.0) <= 1e-12);
    }
    // rung 1 decays into the true ground state |1,0>
    const StateVector hi = dark_state(1, g, om23, cutoff);
    const StateVector ground = basis_state(space, {0, 0});
    const double overlap_rate =
        kap * std::norm(ground.amplitudes.dot(a.matrix * hi.amplitudes));
    CHECK(std::abs(overlap_rate / zeno_decay_rate(1, g, om23, kap) - 1.0) <=
          1e-12);
  }
}

TEST_CASE("Zeno factor ratio Z2/Z1", "[darkstate]") {
  SystemParams p = ladder_params();

  SECTION("matches the single closed-form expression") {
    // Z2/Z1 = sqrt(2) r^3 sqrt(8 + r^2) / (2 (4 + r^2)^2) with r = Om23/g.
    for (double g_mhz : {4.0, 4.6, 5.0, 9.2, 10.2}) {
      p.g = g_mhz * two_pi;
      const double r = p.omega23 / p.g;
      const double closed = std::sqrt(2.0) * r * r * r *
                            std::sqrt(8 + r * r) /
                            (2 * (4 + r * r) * (4 + r * r));
      CHECK(zeno_factor(2, p).zeno_rel == Catch::Approx(closed).epsilon(1e-12));
    }
  }

  SECTION("frozen reference values") {
    struct Row {
      double g_mhz, z21;
    };
    // Independent closed-form evaluation.
    const Row rows[] = {{4.0, 1.900873183930e-03},
                        {4.6, 1.258095200816e-03},
                        {5.0, 9.827437337400e-04},
                        {9.2, 1.597001150541e-04},
                        {10.2, 1.172966441594e-04}};
    for (const Row& r : rows) {
      p.g = r.g_mhz * two_pi;
      CHECK(zeno_factor(2, p).zeno_rel == Catch::Approx(r.z21).epsilon(1e-9));
    }
  }

  SECTION("bookkeeping fields") {
    const LadderPoint pt1 = zeno_factor(1, p);
    CHECK(pt1.n == 1);
    CHECK(pt1.zeno_rel == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(pt1.zeno == Catch::Approx(pt1.omega_n / pt1.gamma_n).epsilon(1e-14));
    // Gamma_1 = 0 when Omega23 = 0: the factor diverges and the ratio is NaN.
    p.omega23 = 0;
    const LadderPoint pt0 = zeno_factor(1, p);
    CHECK(std::isinf(pt0.zeno));
    CHECK(std::isnan(pt0.zeno_rel));
  }
}

TEST_CASE("effective ladder Hamiltonian", "[darkstate]") {
  SystemParams p = ladder_params();
  const Operator h = effective_hamiltonian(p, 3);
  REQUIRE(h.space.total_dim == 4);
  CHECK(h.is_hermitian());
  CHECK(h.matrix(1, 0).real() ==
        Catch::Approx(-p.omega12 / 2).epsilon(1e-14));
  for (int n = 1; n <= 2; ++n)
    CHECK(h.matrix(n + 1, n).real() ==
          Catch::Approx(-p.omega12 * p.omega23 /
                        (4 * p.g * std::sqrt(double(n))))
              .epsilon(1e-14));
  CHECK(h.matrix(2, 0) == cplx(0, 0));
  CHECK(h.matrix(0, 0) == cplx(0, 0));

  // The weak-drive approximation of the n=1 -> 2 hop agrees with the exact
  // per-rung drive when Omega23 << g.
  p.omega23 = 0.05 * p.g;
  const double approx = p.omega12 * p.omega23 / (4 * p.g);
  const double exact = effective_drive(2, p.g, p.omega12, p.omega23) / 2;
  CHECK(approx == Catch::Approx(exact).epsilon(2e-3));

  CHECK(effective_hamiltonian_regime_ok(p));
  p.omega23 = 0.5 * p.g;
  CHECK_FALSE(effective_hamiltonian_regime_ok(p));

  CHECK_THROWS_AS(effective_hamiltonian(p, 0), ValidationError);
  p.g = 0;
  CHECK_THROWS_AS(effective_hamiltonian(p, 2), ValidationError);
}

TEST_CASE("darkness verification report", "[darkstate]") {
  SystemParams p = ladder_params();
  p.delta12 = 0.7 * two_pi;  // forced back to zero inside the check
  const DarknessReport rep = verify_darkness(p);
  REQUIRE(int(rep.rows.size()) == p.fock_cutoff);
  CHECK(rep.pass);
  for (const DarknessRow& row : rep.rows) {
    CHECK(row.h_residual <= 1e-10);
    CHECK(row.excited_amplitude <= 1e-10);
    CHECK(row.gamma_ratio_err <= 1e-10);
  }
}
