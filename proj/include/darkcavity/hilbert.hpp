#pragma once

// Operator factory on tensor-product spaces: ladder operators, atomic
// projectors |i><j|, Kronecker products and single-subsystem embeddings.

#include "darkcavity/types.hpp"

namespace darkcavity {

// Kronecker product on raw matrices, row/col blocks ordered as (A-index, B-index).
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Cavity annihilation operator on |0>..|fock_cutoff>; <n-1|a|n> = sqrt(n).
// fock_cutoff = 0 is legal and gives the 1x1 zero operator: the photon
// space collapses to |0> when the cavity is removed from a model.
inline Operator annihilation_op(int fock_cutoff) {
  if (fock_cutoff < 0)
    throw DimensionError("annihilation_op: fock_cutoff must be >= 0");
  const int d = fock_cutoff + 1;
  Mat m = Mat::Zero(d, d);
  for (int n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(double(n));
  return Operator(HilbertSpace({d}), std::move(m));
}

// sigma_ij = |i><j| with one-based level indices.
inline Operator atomic_projector(int i, int j, int n_levels) {
  if (n_levels < 1) throw DimensionError("atomic_projector: n_levels must be >= 1");
  if (i < 1 || i > n_levels || j < 1 || j > n_levels)
    throw DimensionError("atomic_projector: level index out of range");
  Mat m = Mat::Zero(n_levels, n_levels);
  m(i - 1, j - 1) = 1.0;
  return Operator(HilbertSpace({n_levels}), std::move(m));
}

inline Operator identity_op(const HilbertSpace& space) {
  return Operator(space, Mat::Identity(space.total_dim, space.total_dim));
}

// Kronecker product of operators; result subsystem dims are concat(a, b).
inline Operator tensor(const Operator& a, const Operator& b) {
  std::vector<int> dims = a.space.subsystem_dims;
  dims.insert(dims.end(), b.space.subsystem_dims.begin(),
              b.space.subsystem_dims.end());
  return Operator(HilbertSpace(std::move(dims)), kron(a.matrix, b.matrix));
}

// Lift a single-subsystem operator to the full space (identity elsewhere).
inline Operator embed(const Operator& op, int subsystem_index,
                      const HilbertSpace& space) {
  const int n = int(space.subsystem_dims.size());
  if (subsystem_index < 0 || subsystem_index >= n)
    throw DimensionError("embed: subsystem index out of range");
  if (op.space.total_dim != space.subsystem_dims[subsystem_index])
    throw DimensionError("embed: operator dimension does not match subsystem");
  Mat m = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    if (k == subsystem_index)
      m = kron(m, op.matrix);
    else
      m = kron(m, Mat::Identity(space.subsystem_dims[k], space.subsystem_dims[k]));
  }
  return Operator(space, std::move(m));
}

// Basis state |indices> on a product space (indices zero-based per subsystem).
inline StateVector basis_state(const HilbertSpace& space,
                               const std::vector<int>& indices) {
  if (int(indices.size()) != int(space.subsystem_dims.size()))
    throw DimensionError("basis_state: index count mismatch");
  int flat = 0;
  for (size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= space.subsystem_dims[k])
      throw DimensionError("basis_state: index out of range");
    flat = flat * space.subsystem_dims[k] + indices[k];
  }
  Vec v = Vec::Zero(space.total_dim);
  v(flat) = 1.0;
  return StateVector(space, std::move(v));
}

}  // namespace darkcavity
