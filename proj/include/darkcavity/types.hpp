#pragma once

// Core value types shared by every module: Hilbert-space metadata, dense
// complex operators/states, and the error hierarchy.
//
// Conventions used throughout the library:
//   * all rates and frequencies are angular (rad/us); durations are in us
//   * subsystem order is fixed as (atom, cavity)
//   * Fock cutoff = highest retained photon number, so the cavity factor
//     has dimension cutoff+1

#include <Eigen/Dense>

#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace darkcavity {

using cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using Vec  = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double two_pi = 6.283185307179586476925286766559;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct SolverError : Error {
  using Error::Error;
};
struct DegenerateSteadyStateError : SolverError {
  using SolverError::SolverError;
};
struct ZeroPhotonError : Error {
  using Error::Error;
};
struct FitError : Error {
  using Error::Error;
};

struct HilbertSpace {
  std::vector<int> subsystem_dims;
  int total_dim = 0;

  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<int> dims) : subsystem_dims(std::move(dims)) {
    if (subsystem_dims.empty())
      throw DimensionError("HilbertSpace: needs at least one subsystem");
    total_dim = 1;
    for (int d : subsystem_dims) {
      if (d < 1) throw DimensionError("HilbertSpace: subsystem dimension < 1");
      total_dim *= d;
    }
  }

  bool operator==(const HilbertSpace& o) const {
    return subsystem_dims == o.subsystem_dims;
  }
  bool operator!=(const HilbertSpace& o) const { return !(*this == o); }
};

struct Operator {
  HilbertSpace space;
  Mat matrix;

  Operator() = default;
  Operator(HilbertSpace s, Mat m) : space(std::move(s)), matrix(std::move(m)) {
    if (matrix.rows() != space.total_dim || matrix.cols() != space.total_dim)
      throw DimensionError("Operator: matrix shape does not match space");
  }

  bool is_hermitian(double tol = 1e-12) const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }
  Operator dagger() const { return Operator(space, matrix.adjoint()); }
};

inline void check_same_space(const HilbertSpace& a, const HilbertSpace& b,
                             const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": space mismatch");
}

inline Operator operator*(const Operator& a, const Operator& b) {
  check_same_space(a.space, b.space, "operator product");
  return Operator(a.space, a.matrix * b.matrix);
}
inline Operator operator+(const Operator& a, const Operator& b) {
  check_same_space(a.space, b.space, "operator sum");
  return Operator(a.space, a.matrix + b.matrix);
}
inline Operator operator-(const Operator& a, const Operator& b) {
  check_same_space(a.space, b.space, "operator difference");
  return Operator(a.space, a.matrix - b.matrix);
}
inline Operator operator*(cplx c, const Operator& a) {
  return Operator(a.space, c * a.matrix);
}
inline Operator operator*(double c, const Operator& a) {
  return Operator(a.space, c * a.matrix);
}

struct StateVector {
  HilbertSpace space;
  Vec amplitudes;

  StateVector() = default;
  StateVector(HilbertSpace s, Vec v) : space(std::move(s)), amplitudes(std::move(v)) {
    if (amplitudes.size() != space.total_dim)
      throw DimensionError("StateVector: length does not match space");
  }
  double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
  HilbertSpace space;
  Mat matrix;

  DensityMatrix() = default;
  DensityMatrix(HilbertSpace s, Mat m) : space(std::move(s)), matrix(std::move(m)) {
    if (matrix.rows() != space.total_dim || matrix.cols() != space.total_dim)
      throw DimensionError("DensityMatrix: matrix shape does not match space");
  }

  static DensityMatrix pure(const StateVector& psi) {
    return DensityMatrix(psi.space,
                         psi.amplitudes * psi.amplitudes.adjoint());
  }
  double trace_real() const { return matrix.trace().real(); }
};

}  // namespace darkcavity
