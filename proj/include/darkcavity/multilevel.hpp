#pragma once

// Seven-level Rb-87 model behind the Monte-Carlo simulation: the 3-level
// cycle {|1>,|2>,|3>} plus the neighbouring Zeeman states reached by
// spontaneous emission.
//
// Level order (zero-based index, mF labels of the D2 hyperfine manifold):
//   0 |1>  = F=1, m=+1      ground, cavity-coupled
//   1 |2>  = F=2, m=+2      ground, Raman-driven
//   2 |3>  = F'=2, m'=+2    excited, cavity-coupled
//   3 |g'> = F=2, m=+1      ground, repump path
//   4 |e'> = F'=2, m'=+1    excited, repump path
//   5 |d1> = F=2, m=0       uncoupled trap state
//   6 |d2> = F=1, m=0       uncoupled trap state
//
// Spontaneous decay branches by squared dipole matrix elements of the
// F'=2 -> F=1,2 Zeeman transitions:
//   from |3>  (m'=2): |1> 1/2, |2> 1/3, |g'> 1/6
//   from |e'> (m'=1): |1> 1/4, |2> 1/6, |g'> 1/12, |d1> 1/4, |d2> 1/4
// Each excited level decays with the same total polarization rate
// gamma13+gamma23; channel rates are branch weight times that total (so the
// 3-level restriction reproduces C1, C2 when gamma13:gamma23 = 3:2).
//
// The Omega23 laser also drives g'<->e' (pi transitions, matrix-element
// ratio 1/2) and is Zeeman-detuned there; in the rotating frame of the
// drives the extra level offsets for a Zeeman splitting Z are -Z/2 on |g'>
// and -(2/3) Z on |e'>, leaving the g'<->e' drive detuned by -Z/6 on
// resonance.  Photons on the F=1 <-> F'=2 (cavity) frequency class are the
// cavity channel and, in free space, the spontaneous channels landing on
// F=1 levels: 3->1, e'->1, e'->d2.

#include "darkcavity/hilbert.hpp"
#include "darkcavity/model.hpp"
#include "darkcavity/types.hpp"

#include <array>
#include <string>

namespace darkcavity {

struct LevelCoupling {
  int a = 0, b = 0;   // level indices (zero-based)
  double rabi = 0;    // rad/us; enters H as (rabi/2)(|a><b| + |b><a|)
};

struct DecayChannel {
  int upper = 0, lower = 0;
  double weight = 0;          // branching weight, sums to 1 per excited level
  double rate = 0;            // weight * total polarization decay, rad/us
  bool photon_class = false;  // counts as a photon on the cavity frequency
};

struct MultiLevelModel {
  std::array<std::string, 7> levels = {"1", "2", "3", "g'", "e'", "d1", "d2"};
  int fock_cutoff = 2;
  double cavity_g = 0;                 // 1 <-> 3
  double kappa = 0;                    // cavity field decay, rad/us
  double cavity_offset = 0;            // -(delta12+delta23) per photon
  std::vector<LevelCoupling> couplings;
  std::vector<DecayChannel> decay_channels;
  double gamma_d = 0;                  // dephasing on |2>
  std::array<double, 7> level_offsets{};  // rotating-frame diagonal, rad/us
  bool cavity_photon_class = true;     // cavity channel counts as photon
  std::vector<int> trap_levels = {5, 6};
};

inline MultiLevelModel build_rb87_model(const SystemParams& p,
                                        double zeeman_shift = two_pi * 1.0,
                                        int fock_cutoff = 2) {
  p.validate();
  MultiLevelModel m;
  m.fock_cutoff = fock_cutoff;
  m.cavity_g = p.g;
  m.kappa = p.kappa;
  m.cavity_offset = -(p.delta12 + p.delta23);
  m.gamma_d = p.gamma_d;

  const double Z = zeeman_shift;
  m.level_offsets = {0.0,
                     -p.delta12,
                     -(p.delta12 + p.delta23),
                     -p.delta12 - Z / 2,
                     -(p.delta12 + p.delta23) - 2.0 * Z / 3.0,
                     -p.delta12 - Z,
                     Z / 2};

  m.couplings.push_back({0, 1, p.omega12});        // effective Raman 1<->2
  m.couplings.push_back({1, 2, p.omega23});        // 2<->3
  m.couplings.push_back({3, 4, p.omega23 / 2});    // g'<->e', CG ratio 1/2

  const double gamma_total = p.gamma13 + p.gamma23;
  auto chan = [&](int up, int lo, double w) {
    m.decay_channels.push_back({up, lo, w, w * gamma_total, false});
  };
  chan(2, 0, 1.0 / 2);   // 3 -> 1
  chan(2, 1, 1.0 / 3);   // 3 -> 2 (re-enters the cycle)
  chan(2, 3, 1.0 / 6);   // 3 -> g'
  chan(4, 0, 1.0 / 4);   // e' -> 1
  chan(4, 1, 1.0 / 6);   // e' -> 2
  chan(4, 3, 1.0 / 12);  // e' -> g'
  chan(4, 5, 1.0 / 4);   // e' -> d1
  chan(4, 6, 1.0 / 4);   // e' -> d2
  return m;
}

// Cavity coupling off; photon counting re-bound to the spontaneous channels
// on the cavity (F=1 <-> F'=2) frequency class.
inline MultiLevelModel free_space_variant(const MultiLevelModel& in) {
  MultiLevelModel m = in;
  m.cavity_g = 0;
  m.cavity_photon_class = false;
  for (DecayChannel& c : m.decay_channels)
    c.photon_class = (c.lower == 0 || c.lower == 6);  // lands on F=1
  return m;
}

// Concrete operators on the 7-level x Fock space, ready for the Liouvillian
// or the trajectory engine.  Collapse order: decay channels as listed, then
// cavity loss, then dephasing.
struct AssembledModel {
  HilbertSpace space;
  Operator hamiltonian;
  std::vector<Operator> collapse_ops;
  std::vector<bool> counts_photon;      // parallel to collapse_ops
  std::array<std::string, 7> level_names;
  std::vector<int> trap_levels;
  int fock_cutoff = 0;
};

inline AssembledModel assemble(const MultiLevelModel& m) {
  const HilbertSpace space({7, m.fock_cutoff + 1});
  auto sig = [&](int i, int j) {  // zero-based here
    return embed(atomic_projector(i + 1, j + 1, 7), 0, space);
  };
  const Operator a = embed(annihilation_op(m.fock_cutoff), 1, space);
  const Operator adag = a.dagger();

  Mat h = Mat::Zero(space.total_dim, space.total_dim);
  for (int l = 0; l < 7; ++l) h += m.level_offsets[l] * sig(l, l).matrix;
  h += m.cavity_offset * (adag * a).matrix;
  h += m.cavity_g * ((adag * sig(0, 2)).matrix + (sig(2, 0) * a).matrix);
  for (const LevelCoupling& c : m.couplings)
    h += 0.5 * c.rabi * (sig(c.a, c.b).matrix + sig(c.b, c.a).matrix);

  AssembledModel out;
  out.space = space;
  out.hamiltonian = Operator(space, std::move(h));
  out.level_names = m.levels;
  out.trap_levels = m.trap_levels;
  out.fock_cutoff = m.fock_cutoff;
  for (const DecayChannel& c : m.decay_channels) {
    out.collapse_ops.push_back(std::sqrt(c.rate) * sig(c.lower, c.upper));
    out.counts_photon.push_back(c.photon_class);
  }
  out.collapse_ops.push_back(std::sqrt(m.kappa) * a);
  out.counts_photon.push_back(m.cavity_photon_class);
  out.collapse_ops.push_back(std::sqrt(m.gamma_d) * sig(1, 1));
  out.counts_photon.push_back(false);
  return out;
}

}  // namespace darkcavity
