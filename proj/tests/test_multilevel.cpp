#include <catch2/catch_amalgamated.hpp>

#include "darkcavity/liouvillian.hpp"
#include "darkcavity/multilevel.hpp"

#include <cmath>
#include <vector>

using namespace darkcavity;

namespace {

SystemParams cycle_params(double g_mhz) {
  SystemParams p;
  p.g = g_mhz * two_pi;
  p.kappa = 1.5 * two_pi;
  p.gamma13 = 1.5 * two_pi;
  p.gamma23 = 1.5 * two_pi;
  p.gamma_d = 0.13 * two_pi;
  p.omega12 = 0.3 * two_pi;
  p.omega23 = 4.0 * two_pi;
  return p;
}

// Piecewise-linear integral of uniformly sampled flux.
double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0;
  for (size_t k = 1; k < t.size(); ++k)
    s += 0.5 * (f[k] + f[k - 1]) * (t[k] - t[k - 1]);
  return s;
}

// Photons remaining after t_max, from a log-linear fit of the late tail.
double exponential_tail(const std::vector<double>& t,
                        const std::vector<double>& f, double t_max) {
  double sn = 0, st = 0, sl = 0, stt = 0, stl = 0;
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] <= 0.6 * t_max) continue;
    if (f[k] <= 0) return 0.0;
    const double l = std::log(f[k]);
    sn += 1;
    st += t[k];
    sl += l;
    stt += t[k] * t[k];
    stl += t[k] * l;
  }
  const double det = sn * stt - st * st;
  const double slope = (sn * stl - st * sl) / det;
  const double intercept = (sl * stt - st * stl) / det;
  if (slope >= 0) return std::numeric_limits<double>::infinity();
  return std::exp(intercept + slope * t_max) / (-slope);
}

}  // namespace

TEST_CASE("seven-level structure", "[multilevel]") {
  SystemParams p = cycle_params(10.2);
  p.delta12 = 0.7 * two_pi;
  p.delta23 = -0.3 * two_pi;
  const double z = 1.0 * two_pi;
  const MultiLevelModel m = build_rb87_model(p, z, 2);

  CHECK(m.cavity_g == p.g);
  CHECK(m.kappa == p.kappa);
  CHECK(m.gamma_d == p.gamma_d);
  CHECK(m.fock_cutoff == 2);
  CHECK(m.cavity_offset == Catch::Approx(-(p.delta12 + p.delta23)));
  CHECK(m.trap_levels == std::vector<int>{5, 6});

  SECTION("rotating-frame offsets") {
    CHECK(m.level_offsets[0] == 0.0);
    CHECK(m.level_offsets[1] == Catch::Approx(-p.delta12));
    CHECK(m.level_offsets[2] == Catch::Approx(-(p.delta12 + p.delta23)));
    CHECK(m.level_offsets[3] == Catch::Approx(-p.delta12 - z / 2));
    CHECK(m.level_offsets[4] ==
          Catch::Approx(-(p.delta12 + p.delta23) - 2.0 * z / 3.0));
    CHECK(m.level_offsets[5] == Catch::Approx(-p.delta12 - z));
    CHECK(m.level_offsets[6] == Catch::Approx(z / 2));
  }

  SECTION("drive couplings") {
    REQUIRE(m.couplings.size() == 3);
    CHECK(m.couplings[0].a == 0);
    CHECK(m.couplings[0].b == 1);
    CHECK(m.couplings[0].rabi == Catch::Approx(p.omega12));
    CHECK(m.couplings[1].a == 1);
    CHECK(m.couplings[1].b == 2);
    CHECK(m.couplings[1].rabi == Catch::Approx(p.omega23));
    CHECK(m.couplings[2].a == 3);
    CHECK(m.couplings[2].b == 4);
    CHECK(m.couplings[2].rabi == Catch::Approx(p.omega23 / 2));
  }

  SECTION("decay branching") {
    REQUIRE(m.decay_channels.size() == 8);
    double w3 = 0, we = 0;
    for (const DecayChannel& c : m.decay_channels) {
      CHECK(c.rate == Catch::Approx(c.weight * (p.gamma13 + p.gamma23)));
      CHECK_FALSE(c.photon_class);  // cavity class only counted via kappa
      if (c.upper == 2) w3 += c.weight;
      if (c.upper == 4) we += c.weight;
    }
    CHECK(w3 == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(we == Catch::Approx(1.0).epsilon(1e-14));
    // the 3-level restriction gives gamma13:gamma23 = 3:2
    CHECK(m.decay_channels[0].rate / m.decay_channels[1].rate ==
          Catch::Approx(1.5).epsilon(1e-14));
  }

  SECTION("free-space variant") {
    const MultiLevelModel f = free_space_variant(m);
    CHECK(f.cavity_g == 0.0);
    CHECK_FALSE(f.cavity_photon_class);
    int in_class = 0;
    for (const DecayChannel& c : f.decay_channels)
      if (c.photon_class) {
        ++in_class;
        CHECK((c.lower == 0 || c.lower == 6));
      }
    CHECK(in_class == 3);  // 3->1, e'->1, e'->d2
  }
}

TEST_CASE("assembled operators", "[multilevel]") {
  SystemParams p = cycle_params(10.2);
  const AssembledModel am = assemble(build_rb87_model(p, two_pi, 2));
  const int nf = 3;
  REQUIRE(am.space.total_dim == 7 * nf);
  REQUIRE(am.collapse_ops.size() == 10);
  REQUIRE(am.counts_photon.size() == 10);
  CHECK(am.hamiltonian.is_hermitian());
  CHECK(am.fock_cutoff == 2);

  // only the cavity loss channel counts photons in the cavity variant
  for (int k = 0; k < 10; ++k) CHECK(am.counts_photon[k] == (k == 8));

  // cavity coupling element <1,n+1|H|3,n> = g sqrt(n+1)
  for (int n = 0; n + 1 < nf; ++n)
    CHECK(am.hamiltonian.matrix(0 * nf + n + 1, 2 * nf + n).real() ==
          Catch::Approx(p.g * std::sqrt(double(n + 1))).epsilon(1e-14));
  // repump drive element <g',n|H|e',n> = omega23/4
  CHECK(am.hamiltonian.matrix(3 * nf, 4 * nf).real() ==
        Catch::Approx(p.omega23 / 4).epsilon(1e-14));
  // dephasing collapse acts on |2>
  CHECK(am.collapse_ops[9].matrix(1 * nf, 1 * nf).real() ==
        Catch::Approx(std::sqrt(p.gamma_d)).epsilon(1e-14));
  // decay channel 3 -> g' carries weight 1/6
  CHECK(am.collapse_ops[2].matrix(3 * nf, 2 * nf).real() ==
        Catch::Approx(std::sqrt((p.gamma13 + p.gamma23) / 6)).epsilon(1e-14));

  const AssembledModel fm = assemble(free_space_variant(build_rb87_model(p)));
  CHECK(fm.counts_photon ==
        std::vector<bool>{true, false, false, true, false, false, false, true,
                          false, false});
}

TEST_CASE("master-equation photon budget of the full cycle",
          "[multilevel][slow]") {
  // March rho(t) from |1,0> with a cached step propagator and integrate the
  // photon flux in the cavity frequency class.  Reference totals from an
  // independent dense-solver implementation of the same model
  // (dt = 0.5 us, trapezoid + log-linear tail).
  const double dt = 0.5;

  SECTION("with the cavity: photons recycled many times") {
    const double t_max = 400.0;
    const AssembledModel am = assemble(build_rb87_model(cycle_params(10.2),
                                                        two_pi, 2));
    const int d = am.space.total_dim;
    const Liouvillian L = build_liouvillian(am.hamiltonian, am.collapse_ops);
    const Mat u = matrix_exponential((dt * L.matrix).eval());
    const Operator a = embed(annihilation_op(2), 1, am.space);
    const Mat num = (a.dagger() * a).matrix;

    Mat rho = Mat::Zero(d, d);
    rho(0, 0) = 1.0;
    Vec y = vectorize(rho);
    std::vector<double> ts, flux;
    for (double t = 0.0; t <= t_max + 1e-9; t += dt) {
      ts.push_back(t);
      flux.push_back(2 * (1.5 * two_pi) *
                     (num * unvectorize(y, d)).trace().real());
      y = u * y;
    }
    const double trap = trapezoid(ts, flux);
    const double tail = exponential_tail(ts, flux, t_max);
    CHECK(trap == Catch::Approx(69.303560708).epsilon(1e-4));
    CHECK(tail == Catch::Approx(38.922096638).epsilon(5e-3));
    CHECK(trap + tail == Catch::Approx(108.225657347).epsilon(2e-3));
  }

  SECTION("free space: single shot into the dark states") {
    const double t_max = 500.0;
    const MultiLevelModel fm =
        free_space_variant(build_rb87_model(cycle_params(10.2), two_pi, 0));
    const AssembledModel am = assemble(fm);
    const int d = am.space.total_dim;
    const Liouvillian L = build_liouvillian(am.hamiltonian, am.collapse_ops);
    const Mat u = matrix_exponential((dt * L.matrix).eval());
    // flux in the cavity frequency class: total decay rate times population
    // of each excited level, weighted by its in-class branching fraction
    const double gamma_total = 3.0 * two_pi;
    double w3 = 0, we = 0;
    for (const DecayChannel& c : fm.decay_channels)
      if (c.photon_class) (c.upper == 2 ? w3 : we) += c.weight;
    CHECK(w3 == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(we == Catch::Approx(0.5).epsilon(1e-14));
    const Mat p33 =
        embed(atomic_projector(3, 3, 7), 0, am.space).matrix;
    const Mat pee =
        embed(atomic_projector(5, 5, 7), 0, am.space).matrix;

    Mat rho = Mat::Zero(d, d);
    rho(0, 0) = 1.0;
    Vec y = vectorize(rho);
    std::vector<double> ts, flux;
    for (double t = 0.0; t <= t_max + 1e-9; t += dt) {
      ts.push_back(t);
      const Mat r = unvectorize(y, d);
      flux.push_back(2 * gamma_total *
                     (w3 * (p33 * r).trace().real() +
                      we * (pee * r).trace().real()));
      y = u * y;
    }
    const double total = trapezoid(ts, flux) + exponential_tail(ts, flux, t_max);
    CHECK(total == Catch::Approx(6.493385769).epsilon(1e-4));
    // detected photons at 26% efficiency: the mean free-space budget
    CHECK(0.26 * total == Catch::Approx(1.688280).epsilon(1e-3));
  }
}
