#pragma once

// Vectorized Lindblad superoperator, steady-state solve and time
// propagation.
//
// Vectorization is column-major (vec stacks columns), so
//   vec(A X B) = (B^T kron A) vec(X)
// and the master equation
//   drho/dt = -i[H,rho] + sum_i (2 C rho C^dag - rho C^dag C - C^dag C rho)
// becomes  dvec(rho)/dt = L vec(rho)  with
//   L = -i[(I kron H) - (H^T kron I)]
//       + sum_i [ 2 (conj(C) kron C) - I kron C^dag C - (C^dag C)^T kron I ].

#include "darkcavity/hilbert.hpp"
#include "darkcavity/model.hpp"
#include "darkcavity/ode.hpp"
#include "darkcavity/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <limits>

namespace darkcavity {

struct Liouvillian {
  HilbertSpace space;
  Mat matrix;  // D^2 x D^2
};

inline Vec vectorize(const Mat& rho) {
  return Eigen::Map<const Vec>(rho.data(), rho.size());
}
inline Mat unvectorize(const Vec& v, int d) {
  return Eigen::Map<const Mat>(v.data(), d, d);
}

inline Liouvillian build_liouvillian(const Operator& h,
                                     const std::vector<Operator>& collapse_ops) {
  const HilbertSpace& space = h.space;
  const int d = space.total_dim;
  const Mat id = Mat::Identity(d, d);
  Mat L = cplx(0, -1) * (kron(id, h.matrix) - kron(h.matrix.transpose(), id));
  for (const Operator& c : collapse_ops) {
    check_same_space(space, c.space, "build_liouvillian");
    const Mat cdc = c.matrix.adjoint() * c.matrix;
    L += 2.0 * kron(c.matrix.conjugate(), c.matrix);
    L -= kron(id, cdc);
    L -= kron(cdc.transpose(), id);
  }
  return Liouvillian{space, std::move(L)};
}

inline Liouvillian build_liouvillian(const ModelRealization& model) {
  return build_liouvillian(model.hamiltonian, model.collapse_ops);
}

// Null-space solve for L rho = 0 with tr(rho) = 1.  Primary path: replace
// row 0 with the trace constraint and LU-solve; fall back to an SVD
// null-space computation when the result is poorly conditioned.  The SVD
// path also detects a degenerate (dim > 1) null space.
inline DensityMatrix steady_state(const Liouvillian& L) {
  const int d = L.space.total_dim;
  const int d2 = d * d;
  const double l_norm = L.matrix.norm();

  auto finish = [&](Mat rho) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-300)
      throw SolverError("steady_state: traceless null vector");
    rho /= tr;
    return DensityMatrix(L.space, std::move(rho));
  };
  auto residual_ok = [&](const Mat& rho) {
    return (L.matrix * vectorize(rho)).norm() <= 1e-10 * l_norm;
  };

  Mat A = L.matrix;
  A.row(0).setZero();
  for (int j = 0; j < d; ++j) A(0, j * d + j) = 1.0;
  Vec b = Vec::Zero(d2);
  b(0) = 1.0;
  Eigen::PartialPivLU<Mat> lu(A);
  // Cheap conditioning estimate from the U diagonal; a ratio below 1e-13
  // means the trace-constrained system is (numerically) singular, which is
  // the degenerate-null-space case the SVD path diagnoses exactly.
  double u_min = std::numeric_limits<double>::infinity(), u_max = 0;
  for (int i = 0; i < d2; ++i) {
    const double u = std::abs(lu.matrixLU()(i, i));
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  if (u_min > 1e-13 * u_max) {
    Vec x = lu.solve(b);
    if (x.allFinite()) {
      DensityMatrix rho = finish(unvectorize(x, d));
      if (residual_ok(rho.matrix)) return rho;
    }
  }

  // SVD fallback: null vector of L itself.
  Eigen::BDCSVD<Mat> svd(L.matrix, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  int n_null = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= 1e-13 * smax) ++n_null;
  if (n_null > 1)
    throw DegenerateSteadyStateError(
        "steady_state: null space dimension exceeds 1");
  if (n_null == 0)
    throw SolverError("steady_state: linear solve failed and no null vector");
  DensityMatrix rho = finish(unvectorize(svd.matrixV().col(d2 - 1), d));
  if (!residual_ok(rho.matrix))
    throw SolverError("steady_state: residual exceeds tolerance");
  return rho;
}

enum class EvolveBackend { adaptive_rk, matrix_exp };

inline Mat matrix_exponential(const Mat& m) { return m.exp(); }

inline DensityMatrix evolve(const Liouvillian& L, const DensityMatrix& rho0,
                            double t,
                            EvolveBackend backend = EvolveBackend::adaptive_rk) {
  check_same_space(L.space, rho0.space, "evolve");
  if (t < 0) throw ValidationError("evolve: t must be >= 0");
  if (t == 0) return rho0;
  const int d = L.space.total_dim;
  Vec y;
  if (backend == EvolveBackend::matrix_exp) {
    y = matrix_exponential((t * L.matrix).eval()) * vectorize(rho0.matrix);
  } else {
    y = integrate_adaptive(
        [&](double, const Vec& v) -> Vec { return L.matrix * v; },
        vectorize(rho0.matrix), 0.0, t);
  }
  Mat rho = unvectorize(y, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(L.space, std::move(rho));
}

inline cplx expectation(const DensityMatrix& rho, const Operator& op) {
  check_same_space(rho.space, op.space, "expectation");
  return (op.matrix * rho.matrix).trace();
}

// (1/2)||rho1 - rho2||_1; the difference is Hermitian, so the singular
// values are the absolute eigenvalues.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  check_same_space(a.space, b.space, "trace_distance");
  Mat diff = a.matrix - b.matrix;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace darkcavity
