#pragma once

// Closed forms of the dark-state ladder: dark/bright triplet states, their
// energies, golden-rule decay rates, effective drives, Zeno factors and the
// effective ladder Hamiltonian, plus a residual check against the full model.
//
// Phase convention: dark states are built with real amplitudes and a
// nonnegative coefficient on |1,n>.

#include "darkcavity/hilbert.hpp"
#include "darkcavity/model.hpp"
#include "darkcavity/types.hpp"

#include <cmath>
#include <limits>

namespace darkcavity {

// |Psi_n^0>  propto  (Omega23/2)|1,n> - g sqrt(n)|2,n-1>
inline StateVector dark_state(int n, double g, double omega23,
                              int fock_cutoff) {
  if (n < 1 || n > fock_cutoff)
    throw DimensionError("dark_state: rung must satisfy 1 <= n <= cutoff");
  if (g == 0 && omega23 == 0)
    throw ValidationError("dark_state: g and omega23 cannot both vanish");
  const HilbertSpace space = model_space(fock_cutoff);
  const double c1 = omega23 / 2, c2 = -g * std::sqrt(double(n));
  const double norm = std::hypot(c1, c2);
  Vec v = Vec::Zero(space.total_dim);
  const int nf = fock_cutoff + 1;
  v(0 * nf + n) = c1 / norm;        // |1,n>
  v(1 * nf + (n - 1)) = c2 / norm;  // |2,n-1>
  return StateVector(space, std::move(v));
}

struct BrightStates {
  StateVector plus;   // eigenvalue +energy
  StateVector minus;  // eigenvalue -energy
  double energy;      // E_n = sqrt(n g^2 + omega23^2/4)
};

// |Psi_n^+-> propto g sqrt(n)|1,n> + (Omega23/2)|2,n-1> +- E_n|3,n-1>
inline BrightStates bright_states(int n, double g, double omega23,
                                  int fock_cutoff) {
  if (n < 1 || n > fock_cutoff)
    throw DimensionError("bright_states: rung must satisfy 1 <= n <= cutoff");
  const HilbertSpace space = model_space(fock_cutoff);
  const double gn = g * std::sqrt(double(n));
  const double en = std::sqrt(n * g * g + omega23 * omega23 / 4);
  if (en == 0)
    throw ValidationError("bright_states: g and omega23 cannot both vanish");
  const int nf = fock_cutoff + 1;
  auto make = [&](double sign) {
    Vec v = Vec::Zero(space.total_dim);
    v(0 * nf + n) = gn;
    v(1 * nf + (n - 1)) = omega23 / 2;
    v(2 * nf + (n - 1)) = sign * en;
    v /= v.norm();
    return StateVector(space, std::move(v));
  };
  return BrightStates{make(+1.0), make(-1.0), en};
}

// Golden-rule decay rate of rung n to n-1:
//   Gamma_n = kappa n [4 g^2 (n-1) + Omega23^2] / [4 g^2 n + Omega23^2]
inline double zeno_decay_rate(int n, double g, double omega23, double kappa) {
  if (n < 1) throw ValidationError("zeno_decay_rate: n must be >= 1");
  const double o2 = omega23 * omega23;
  const double denom = 4 * g * g * n + o2;
  if (denom == 0) return 0.0;
  return kappa * n * (4 * g * g * (n - 1) + o2) / denom;
}

// Effective drive of the n-1 -> n dark-state transition:
//   Omega_n = 2 Omega12 Omega23 g sqrt(n)
//             / [sqrt(4 g^2 n + Omega23^2) sqrt(4 g^2 (n-1) + Omega23^2)]
// (for n = 1 the second factor reduces to Omega23 and Omega_1 =
//  2 Omega12 g / sqrt(4 g^2 + Omega23^2)).
inline double effective_drive(int n, double g, double omega12,
                              double omega23) {
  if (n < 1) throw ValidationError("effective_drive: n must be >= 1");
  if (g == 0 && omega23 == 0)
    throw ValidationError("effective_drive: g and omega23 cannot both vanish");
  const double o2 = omega23 * omega23;
  const double f_n = std::sqrt(4 * g * g * n + o2);
  if (n == 1) return 2 * omega12 * g / f_n;
  const double f_nm1 = std::sqrt(4 * g * g * (n - 1) + o2);
  return 2 * omega12 * omega23 * g * std::sqrt(double(n)) / (f_n * f_nm1);
}

struct LadderPoint {
  int n = 0;
  double gamma_n = 0;    // rad/us
  double omega_n = 0;    // rad/us
  double zeno = 0;       // Omega_n / Gamma_n; +inf when Gamma_n = 0
  double zeno_rel = 0;   // Z_n / Z_1; NaN when Z_1 is not finite
};

inline LadderPoint zeno_factor(int n, const SystemParams& p) {
  auto z_of = [&](int m) {
    const double gam = zeno_decay_rate(m, p.g, p.omega23, p.kappa);
    const double om = effective_drive(m, p.g, p.omega12, p.omega23);
    return gam > 0 ? om / gam : std::numeric_limits<double>::infinity();
  };
  LadderPoint pt;
  pt.n = n;
  pt.gamma_n = zeno_decay_rate(n, p.g, p.omega23, p.kappa);
  pt.omega_n = effective_drive(n, p.g, p.omega12, p.omega23);
  pt.zeno = pt.gamma_n > 0 ? pt.omega_n / pt.gamma_n
                           : std::numeric_limits<double>::infinity();
  const double z1 = z_of(1);
  pt.zeno_rel = std::isfinite(pt.zeno) && std::isfinite(z1)
                    ? pt.zeno / z1
                    : std::numeric_limits<double>::quiet_NaN();
  return pt;
}

// Weak-drive ladder Hamiltonian in the dark-state basis {|Psi_0^0>..}:
// tridiagonal with <1|H|0> = -Omega12/2 and
// <n+1|H|n> = -Omega12 Omega23 / (4 g sqrt(n)) for n >= 1.
// Valid for Omega23 << g; the exact per-rung drive is effective_drive().
inline Operator effective_hamiltonian(const SystemParams& p, int n_max) {
  if (n_max < 1)
    throw ValidationError("effective_hamiltonian: n_max must be >= 1");
  if (p.g == 0)
    throw ValidationError("effective_hamiltonian: requires g > 0");
  const int d = n_max + 1;
  Mat h = Mat::Zero(d, d);
  h(1, 0) = h(0, 1) = -p.omega12 / 2;
  for (int n = 1; n + 1 <= n_max; ++n)
    h(n + 1, n) = h(n, n + 1) =
        -p.omega12 * p.omega23 / (4 * p.g * std::sqrt(double(n)));
  return Operator(HilbertSpace({d}), std::move(h));
}

inline bool effective_hamiltonian_regime_ok(const SystemParams& p) {
  return p.omega23 <= 0.25 * p.g;
}

struct DarknessRow {
  int n = 0;
  double h_residual = 0;        // ||H |Psi_n^0>|| at resonance, Omega12 = 0
  double excited_amplitude = 0; // total amplitude on |3,m> bare states
  double gamma_ratio_err = 0;   // | kappa |<n-1|a|n>|^2 / Gamma_n - 1 |
};

struct DarknessReport {
  std::vector<DarknessRow> rows;
  bool pass = true;
};

// Residual check tying the closed forms to the full Hamiltonian.  Detunings
// and Omega12 are forced to zero; the overlap/decay comparison is skipped at
// the truncation edge where a warrants no higher rung.
inline DarknessReport verify_darkness(SystemParams p, double tol = 1e-10) {
  p.delta12 = p.delta23 = p.omega12 = 0;
  const Operator h = build_hamiltonian(p);
  const HilbertSpace space = h.space;
  const Operator a = embed(annihilation_op(p.fock_cutoff), 1, space);
  DarknessReport rep;
  for (int n = 1; n <= p.fock_cutoff; ++n) {
    const StateVector psi = dark_state(n, p.g, p.omega23, p.fock_cutoff);
    DarknessRow row;
    row.n = n;
    row.h_residual = (h.matrix * psi.amplitudes).norm();
    const int nf = p.fock_cutoff + 1;
    row.excited_amplitude = psi.amplitudes.segment(2 * nf, nf).norm();
    if (n >= 2) {
      const StateVector below = dark_state(n - 1, p.g, p.omega23, p.fock_cutoff);
      const double overlap =
          std::norm(below.amplitudes.dot(a.matrix * psi.amplitudes));
      const double gam = zeno_decay_rate(n, p.g, p.omega23, p.kappa);
      row.gamma_ratio_err =
          gam > 0 ? std::abs(p.kappa * overlap / gam - 1.0) : 0.0;
    } else if (p.omega23 > 0) {
      // rung 1 decays to the true ground state |1,0>
      const StateVector ground = basis_state(space, {0, 0});
      const double overlap =
          std::norm(ground.amplitudes.dot(a.matrix * psi.amplitudes));
      const double gam = zeno_decay_rate(1, p.g, p.omega23, p.kappa);
      row.gamma_ratio_err =
          gam > 0 ? std::abs(p.kappa * overlap / gam - 1.0) : 0.0;
    }
    rep.pass = rep.pass && row.h_residual <= tol &&
               row.excited_amplitude <= tol && row.gamma_ratio_err <= tol;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace darkcavity
