#pragma once

// Steady-state observables: photon correlation functions via the quantum
// regression theorem, emission rates, the cavity-population-per-excitation
// figure of merit, and the emission spectrum.

#include "darkcavity/liouvillian.hpp"
#include "darkcavity/types.hpp"

#include <cmath>
#include <cstdint>
#include <map>

namespace darkcavity {

struct CorrelationSeries {
  std::vector<double> tau_grid;  // us, strictly increasing, starts at 0
  std::vector<double> values;    // g2(tau), nonnegative
};

namespace detail {

// Propagator cache keyed by step length; uniform grids cost one exponential.
class StepPropagator {
 public:
  explicit StepPropagator(const Mat& l) : l_(l) {}
  const Mat& get(double dt) {
    const std::int64_t key = std::llround(dt * 1e12);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, matrix_exponential((dt * l_).eval())).first;
    return it->second;
  }

 private:
  const Mat& l_;
  std::map<std::int64_t, Mat> cache_;
};

inline double mean_photon(const DensityMatrix& rho, const Operator& a) {
  return expectation(rho, a.dagger() * a).real();
}

inline void require_photons(double n) {
  if (n <= 1e-14)
    throw ZeroPhotonError("steady state carries no photons; g2 undefined");
}

}  // namespace detail

// g2(tau) = tr(a^dag a exp(L tau)(a rho_ss a^dag)) / tr(a^dag a rho_ss)^2.
// The seed a rho a^dag is propagated unnormalized.
inline CorrelationSeries g2_correlation(const Liouvillian& L,
                                        const DensityMatrix& rho_ss,
                                        const Operator& a,
                                        const std::vector<double>& tau_grid) {
  check_same_space(L.space, rho_ss.space, "g2_correlation");
  check_same_space(L.space, a.space, "g2_correlation");
  if (tau_grid.empty() || tau_grid.front() != 0.0)
    throw ValidationError("g2_correlation: tau grid must start at 0");
  for (size_t k = 1; k < tau_grid.size(); ++k)
    if (!(tau_grid[k] > tau_grid[k - 1]))
      throw ValidationError("g2_correlation: tau grid must be strictly increasing");

  const double nbar = detail::mean_photon(rho_ss, a);
  detail::require_photons(nbar);
  const Mat num_op = (a.dagger() * a).matrix;
  const double denom = nbar * nbar;

  detail::StepPropagator prop(L.matrix);
  Vec seed = vectorize((a.matrix * rho_ss.matrix * a.matrix.adjoint()).eval());
  const int d = L.space.total_dim;

  CorrelationSeries out;
  out.tau_grid = tau_grid;
  out.values.reserve(tau_grid.size());
  for (size_t k = 0; k < tau_grid.size(); ++k) {
    if (k > 0) seed = prop.get(tau_grid[k] - tau_grid[k - 1]) * seed;
    const double val =
        (num_op * unvectorize(seed, d)).trace().real() / denom;
    out.values.push_back(std::max(val, 0.0));
  }
  return out;
}

// Equal-time correlation <a^dag a^dag a a>/<a^dag a>^2, no propagation.
inline double g2_zero(const DensityMatrix& rho_ss, const Operator& a) {
  const double nbar = detail::mean_photon(rho_ss, a);
  detail::require_photons(nbar);
  const Operator ad = a.dagger();
  const double num = expectation(rho_ss, ad * ad * a * a).real();
  return num / (nbar * nbar);
}

// Detected photon rate: flux out of the cavity is 2 kappa <a^dag a> under
// this library's dissipator convention, thinned by the detection chain.
inline double emission_rate(const DensityMatrix& rho_ss, const Operator& a,
                            double kappa, double efficiency) {
  if (efficiency < 0 || efficiency > 1)
    throw ValidationError("emission_rate: efficiency must be in [0,1]");
  return 2.0 * kappa * detail::mean_photon(rho_ss, a) * efficiency;
}

// <a^dag a> / <sigma33>: cavity photons per excited-state population.  The
// atom is subsystem 0; level |3> is its third state.
inline double figure_of_merit(const DensityMatrix& rho_ss) {
  const int n_atom = rho_ss.space.subsystem_dims.at(0);
  if (n_atom < 3)
    throw DimensionError("figure_of_merit: atom subsystem has no level |3>");
  const Operator s33 = embed(atomic_projector(3, 3, n_atom), 0, rho_ss.space);
  const int cutoff = rho_ss.space.subsystem_dims.at(1) - 1;
  const Operator a = embed(annihilation_op(cutoff), 1, rho_ss.space);
  const double pop3 = expectation(rho_ss, s33).real();
  if (pop3 <= 1e-14)
    throw SolverError("figure_of_merit: <sigma33> vanishes");
  return detail::mean_photon(rho_ss, a) / pop3;
}

struct SpectrumSeries {
  std::vector<double> omega_grid;  // rad/us
  std::vector<double> values;      // incoherent spectrum S(omega)
  double coherent = 0;             // |<a>|^2 delta component, reported apart
};

// Wiener-Khinchin spectrum of the regression correlator
//   c(tau) = tr(a^dag exp(L tau)(a rho_ss)) - |<a>|^2,
//   S(omega) = 2 Re int_0^tau_max dtau e^{-i omega tau} c(tau)
// by trapezoidal integration; tau_max should cover ~30 relaxation times.
inline SpectrumSeries g1_spectrum(const Liouvillian& L,
                                  const DensityMatrix& rho_ss,
                                  const Operator& a,
                                  const std::vector<double>& omega_grid,
                                  double tau_max, int n_tau) {
  check_same_space(L.space, rho_ss.space, "g1_spectrum");
  if (n_tau < 2 || tau_max <= 0)
    throw ValidationError("g1_spectrum: need tau_max > 0 and n_tau >= 2");
  detail::require_photons(detail::mean_photon(rho_ss, a));

  const int d = L.space.total_dim;
  const cplx a_mean = expectation(rho_ss, a);
  const double coherent = std::norm(a_mean);
  const double dtau = tau_max / (n_tau - 1);
  const Mat step = matrix_exponential((dtau * L.matrix).eval());

  std::vector<cplx> corr(n_tau);
  Vec seed = vectorize((a.matrix * rho_ss.matrix).eval());
  for (int k = 0; k < n_tau; ++k) {
    if (k > 0) seed = step * seed;
    corr[k] = (a.matrix.adjoint() * unvectorize(seed, d)).trace() - coherent;
  }

  SpectrumSeries out;
  out.omega_grid = omega_grid;
  out.coherent = coherent;
  out.values.reserve(omega_grid.size());
  for (double w : omega_grid) {
    cplx integral = 0;
    for (int k = 0; k < n_tau; ++k) {
      const double weight = (k == 0 || k == n_tau - 1) ? 0.5 : 1.0;
      integral += weight * std::exp(cplx(0, -w * k * dtau)) * corr[k];
    }
    out.values.push_back(2.0 * (integral * dtau).real());
  }
  return out;
}

}  // namespace darkcavity
