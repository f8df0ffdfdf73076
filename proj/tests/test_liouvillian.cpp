#include <catch2/catch_amalgamated.hpp>

#include "darkcavity/config.hpp"
#include "darkcavity/hilbert.hpp"
#include "darkcavity/liouvillian.hpp"
#include "darkcavity/model.hpp"
#include "darkcavity/types.hpp"

using namespace darkcavity;

TEST_CASE("vectorize/unvectorize roundtrip is column-major") {
  Mat m(2, 2);
  m << cplx(1, 1), cplx(2, 0), cplx(3, 0), cplx(4, -1);
  const Vec v = vectorize(m);
  REQUIRE(v.size() == 4);
  CHECK(v(1) == cplx(3, 0));  // column 0 stacks first
  CHECK(v(2) == cplx(2, 0));
  CHECK((unvectorize(v, 2) - m).norm() == 0.0);
}

TEST_CASE("Liouvillian reproduces the master equation action") {
  const SystemParams p = [] {
    SystemParams q;
    q.g = 1.3;
    q.kappa = 0.7;
    q.gamma13 = 0.2;
    q.gamma23 = 0.3;
    q.gamma_d = 0.1;
    q.omega12 = 0.4;
    q.omega23 = 0.9;
    q.fock_cutoff = 2;
    return q;
  }();
  const ModelRealization model = build_model(p);
  const Liouvillian L = build_liouvillian(model);
  const int d = L.space.total_dim;
  REQUIRE(L.matrix.rows() == d * d);

  // compare against the direct sandwich form on a random Hermitian rho
  Mat r = Mat::Random(d, d);
  r = ((r + r.adjoint()) / 2).eval();
  Mat rhs = cplx(0, -1) * (model.hamiltonian.matrix * r -
                           r * model.hamiltonian.matrix);
  for (const Operator& c : model.collapse_ops) {
    const Mat cdc = c.matrix.adjoint() * c.matrix;
    rhs += 2.0 * c.matrix * r * c.matrix.adjoint() - r * cdc - cdc * r;
  }
  CHECK((unvectorize(L.matrix * vectorize(r), d) - rhs).norm() <
        1e-12 * rhs.norm());

  // trace preservation: column sums of L over diagonal entries vanish
  Vec tr_row = Vec::Zero(d * d);
  for (int j = 0; j < d; ++j) tr_row(j * d + j) = 1.0;
  CHECK((L.matrix.transpose() * tr_row).norm() < 1e-11 * L.matrix.norm());
}

TEST_CASE("steady state of the driven cavity matches the coherent state") {
  const double delta = two_pi * 0.8, kappa = two_pi * 1.5;
  const cplx eps(two_pi * 0.35, two_pi * 0.1);
  const auto model = driven_cavity_model(delta, kappa, eps, 18);
  const Liouvillian L = build_liouvillian(model);
  const DensityMatrix rho = steady_state(L);
  const Operator a = annihilation_op(18);
  const cplx alpha = driven_cavity_alpha(delta, kappa, eps);

  CHECK(std::abs(expectation(rho, a) - alpha) < 1e-10);
  CHECK(std::abs(expectation(rho, a.dagger() * a).real() - std::norm(alpha)) <
        1e-10);
  CHECK(rho.trace_real() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("steady state of the full model: reference expectation values") {
  // g/2pi = 9.2 MHz parameter set; reference numbers from an independent
  // dense-solver implementation of the same master equation.
  const SystemParams p = preset_params("reduced-g");
  const Liouvillian L = build_liouvillian(build_model(p));
  const DensityMatrix rho = steady_state(L);

  const Operator a = embed(annihilation_op(p.fock_cutoff), 1, L.space);
  const Operator s22 = embed(atomic_projector(2, 2, 3), 0, L.space);
  const Operator s33 = embed(atomic_projector(3, 3, 3), 0, L.space);

  CHECK(expectation(rho, a.dagger() * a).real() ==
        Catch::Approx(0.01680680654453849).epsilon(1e-8));
  CHECK(expectation(rho, s33).real() ==
        Catch::Approx(0.0009471545358908846).epsilon(1e-8));
  CHECK(expectation(rho, s22).real() ==
        Catch::Approx(0.38330290414646917).epsilon(1e-8));

  SECTION("physicality") {
    CHECK(rho.trace_real() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK((rho.matrix - rho.matrix.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }

  SECTION("residual is small relative to the generator") {
    CHECK((L.matrix * vectorize(rho.matrix)).norm() <=
          1e-10 * L.matrix.norm());
  }
}

TEST_CASE("degenerate steady state is detected, not silently averaged") {
  // two-level atom with coherent drive and no dissipation at all: every
  // mixture of the +/- dressed states is stationary
  const HilbertSpace space({2});
  Mat h(2, 2);
  h << 0, 0.5, 0.5, 0;
  const Liouvillian L = build_liouvillian(Operator(space, h), {});
  CHECK_THROWS_AS(steady_state(L), DegenerateSteadyStateError);
}

TEST_CASE("evolve: both backends relax to the steady state") {
  const SystemParams p = preset_params("reduced-g");
  const Liouvillian L = build_liouvillian(build_model(p));
  const DensityMatrix rho_ss = steady_state(L);
  const DensityMatrix rho0 =
      DensityMatrix::pure(basis_state(L.space, {0, 0}));

  const DensityMatrix r1 = evolve(L, rho0, 2.0, EvolveBackend::adaptive_rk);
  const DensityMatrix r2 = evolve(L, rho0, 2.0, EvolveBackend::matrix_exp);
  CHECK(trace_distance(r1, r2) < 1e-7);
  CHECK(r1.trace_real() == Catch::Approx(1.0).epsilon(1e-9));

  const DensityMatrix late = evolve(L, rho0, 50.0, EvolveBackend::matrix_exp);
  CHECK(trace_distance(late, rho_ss) < 1e-6);

  CHECK_THROWS_AS(evolve(L, rho0, -1.0), ValidationError);
  CHECK(trace_distance(evolve(L, rho0, 0.0), rho0) == 0.0);
}

TEST_CASE("trace distance basics") {
  const HilbertSpace space({2});
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  const DensityMatrix a(space, p0), b(space, p1);
  CHECK(trace_distance(a, a) == 0.0);
  CHECK(trace_distance(a, b) == Catch::Approx(1.0));
}
