#pragma once

// Rotating-frame Hamiltonian and collapse operators of the driven
// three-level atom + cavity system.
//
// Frame: both drives and the cavity rotate with the lasers, the cavity at
// the four-wave-mixing frequency (omega12 + omega23), so all operators are
// time independent.  Detuning sign convention: Delta = omega_laser -
// omega_transition.
//
//   H = -Delta12 sigma22 - (Delta12+Delta23)(sigma33 + a^dag a)
//       + g (a^dag sigma13 + sigma31 a)
//       + (Omega12/2)(sigma12 + sigma21) + (Omega23/2)(sigma23 + sigma32)
//
// Dissipation follows the 2C rho C^dag - rho C^dag C - C^dag C rho form, so
// kappa is the cavity FIELD decay rate (photon number decays at 2 kappa) and
// the |3> population decay rate is 2(gamma13+gamma23).

#include "darkcavity/hilbert.hpp"
#include "darkcavity/types.hpp"

namespace darkcavity {

struct SystemParams {
  double g = 0;         // atom-cavity coupling, rad/us
  double kappa = 0;     // cavity field decay, rad/us
  double gamma13 = 0;   // |3> -> |1> polarization decay, rad/us
  double gamma23 = 0;   // |3> -> |2> polarization decay, rad/us
  double gamma_d = 0;   // ground-state dephasing on |2>, rad/us
  double omega12 = 0;   // Raman-drive Rabi frequency, rad/us
  double omega23 = 0;   // 2<->3 drive Rabi frequency, rad/us
  double delta12 = 0;   // drive detuning, signed, rad/us
  double delta23 = 0;   // drive detuning, signed, rad/us
  int fock_cutoff = 5;  // highest retained photon number

  void validate() const {
    auto nonneg = [](double v, const char* name) {
      if (!(v >= 0))
        throw ValidationError(std::string("SystemParams: ") + name +
                              " must be >= 0");
    };
    nonneg(g, "g");
    nonneg(kappa, "kappa");
    nonneg(gamma13, "gamma13");
    nonneg(gamma23, "gamma23");
    nonneg(gamma_d, "gamma_d");
    nonneg(omega12, "omega12");
    nonneg(omega23, "omega23");
    if (fock_cutoff < 1)
      throw ValidationError("SystemParams: fock_cutoff must be >= 1");
  }
};

struct ModelRealization {
  Operator hamiltonian;
  std::vector<Operator> collapse_ops;  // [C1..C4] in fixed order
  SystemParams params;
};

inline HilbertSpace model_space(int fock_cutoff) {
  return HilbertSpace({3, fock_cutoff + 1});
}

inline Operator build_hamiltonian(const SystemParams& p) {
  p.validate();
  const HilbertSpace space = model_space(p.fock_cutoff);
  auto sig = [&](int i, int j) {
    return embed(atomic_projector(i, j, 3), 0, space);
  };
  const Operator a = embed(annihilation_op(p.fock_cutoff), 1, space);
  const Operator adag = a.dagger();

  Mat h = Mat::Zero(space.total_dim, space.total_dim);
  h -= p.delta12 * sig(2, 2).matrix;
  h -= (p.delta12 + p.delta23) * (sig(3, 3).matrix + (adag * a).matrix);
  h += p.g * ((adag * sig(1, 3)).matrix + (sig(3, 1) * a).matrix);
  h += 0.5 * p.omega12 * (sig(1, 2).matrix + sig(2, 1).matrix);
  h += 0.5 * p.omega23 * (sig(2, 3).matrix + sig(3, 2).matrix);
  return Operator(space, std::move(h));
}

// [sqrt(gamma13) sigma13, sqrt(gamma23) sigma23, sqrt(kappa) a,
//  sqrt(gamma_d) sigma22], in exactly this order.
inline std::vector<Operator> build_collapse_ops(const SystemParams& p) {
  p.validate();
  const HilbertSpace space = model_space(p.fock_cutoff);
  auto sig = [&](int i, int j) {
    return embed(atomic_projector(i, j, 3), 0, space);
  };
  std::vector<Operator> cs;
  cs.push_back(std::sqrt(p.gamma13) * sig(1, 3));
  cs.push_back(std::sqrt(p.gamma23) * sig(2, 3));
  cs.push_back(std::sqrt(p.kappa) * embed(annihilation_op(p.fock_cutoff), 1, space));
  cs.push_back(std::sqrt(p.gamma_d) * sig(2, 2));
  return cs;
}

inline ModelRealization build_model(const SystemParams& p) {
  return ModelRealization{build_hamiltonian(p), build_collapse_ops(p), p};
}

// Four-wave-mixing output frequency from energy conservation.
inline double fwm_frequency(double omega_1r, double omega_23, double omega_2r) {
  return omega_1r + omega_23 - omega_2r;
}

// Reference system with a closed-form steady state: an empty cavity under a
// coherent drive,  H = delta a^dag a + eps a^dag + conj(eps) a,  C = sqrt(k) a.
// The steady state is the coherent state with
//   <a> = -i eps / (kappa + i delta),   <a^dag a> = |<a>|^2,   g2 == 1.
inline ModelRealization driven_cavity_model(double delta, double kappa,
                                            cplx eps, int fock_cutoff) {
  if (kappa <= 0)
    throw ValidationError("driven_cavity_model: kappa must be > 0");
  const HilbertSpace space({fock_cutoff + 1});
  const Operator a = annihilation_op(fock_cutoff);
  const Operator adag = a.dagger();
  Mat h = delta * (adag * a).matrix;
  h += eps * adag.matrix + std::conj(eps) * a.matrix;
  SystemParams tag;  // bookkeeping only; not a three-level model
  tag.kappa = kappa;
  tag.fock_cutoff = fock_cutoff;
  return ModelRealization{Operator(space, std::move(h)),
                          {std::sqrt(kappa) * a},
                          tag};
}

inline cplx driven_cavity_alpha(double delta, double kappa, cplx eps) {
  return cplx(0, -1) * eps / cplx(kappa, delta);
}

}  // namespace darkcavity
