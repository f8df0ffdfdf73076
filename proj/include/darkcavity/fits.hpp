#pragma once

// Least-squares fits used on simulated data: damped sinusoid for g2(tau)
// oscillations and exponential decay for count-rate extrapolation.  Both use
// a small Levenberg-Marquardt loop with deterministic initial guesses.

#include "darkcavity/observables.hpp"
#include "darkcavity/types.hpp"

#include <cmath>
#include <limits>

namespace darkcavity {

struct DampedSinusoidFit {
  double frequency = 0;     // angular, rad/us
  double decay_rate = 0;    // 1/us
  double amplitude = 0;
  double offset = 0;
  double phase = 0;         // rad, in (-pi, pi]
  double residual_rms = 0;
};

struct ExpDecayFit {
  double initial_rate = 0;        // counts per us at t = 0
  double decay_constant = 0;      // 1/us
  double extrapolated_total = 0;  // initial_rate / decay_constant
  double residual_rms = 0;
};

namespace detail {

// Generic Levenberg-Marquardt on residual r(theta) with analytic Jacobian.
// Returns false if no convergence within max_iter.
template <typename ResidualFn, typename JacobianFn>
bool levenberg_marquardt(RVec& theta, ResidualFn&& resid, JacobianFn&& jac,
                         int max_iter = 400) {
  double lambda = 1e-3;
  RVec r = resid(theta);
  double cost = r.squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    RMat J = jac(theta);
    RMat JtJ = J.transpose() * J;
    RVec g = J.transpose() * r;
    bool stepped = false;
    for (int tries = 0; tries < 60; ++tries) {
      RMat A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
      RVec delta = A.ldlt().solve(g);
      RVec trial = theta - delta;
      RVec rt = resid(trial);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        const double rel = (cost - ct) / std::max(cost, 1e-300);
        theta = trial;
        r = std::move(rt);
        cost = ct;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel < 1e-13) return true;
        break;
      }
      lambda *= 8.0;
      if (lambda > 1e12) return true;  // stuck at a (good enough) minimum
    }
    if (!stepped) return true;
  }
  return false;
}

inline double wrap_phase(double p) {
  while (p > M_PI) p -= 2 * M_PI;
  while (p <= -M_PI) p += 2 * M_PI;
  return p;
}

}  // namespace detail

// Model: offset + amplitude * exp(-decay * tau) * cos(omega * tau + phase).
// Initial frequency from the discrete-Fourier peak of the detrended series,
// decay from a log-envelope regression.
inline DampedSinusoidFit fit_damped_sinusoid(const CorrelationSeries& series) {
  const auto& tau = series.tau_grid;
  const auto& val = series.values;
  const int n = int(tau.size());
  if (n < 20)
    throw ValidationError("fit_damped_sinusoid: need at least 20 points");

  const double span = tau.back() - tau.front();
  double mean = 0;
  for (double v : val) mean += v;
  mean /= n;

  // DFT scan for the initial frequency (handles non-uniform grids).
  double w0 = 0, best = -1;
  const double w_max = M_PI * n / span;  // ~Nyquist for near-uniform grids
  const int n_scan = 8 * n;
  for (int k = 1; k <= n_scan; ++k) {
    const double w = w_max * k / n_scan;
    cplx s = 0;
    for (int i = 0; i < n; ++i)
      s += (val[i] - mean) * std::exp(cplx(0, -w * tau[i]));
    if (std::abs(s) > best) {
      best = std::abs(s);
      w0 = w;
    }
  }
  if (2 * M_PI / w0 > span / 2.0)
    throw ValidationError(
        "fit_damped_sinusoid: series spans fewer than 2 oscillation periods");

  // Envelope decay estimate from |detrended| maxima over thirds.
  auto env = [&](int lo, int hi) {
    double m = 0;
    for (int i = lo; i < hi; ++i) m = std::max(m, std::abs(val[i] - mean));
    return std::max(m, 1e-12);
  };
  const double e0 = env(0, n / 3), e1 = env(2 * n / 3, n);
  const double dt_env = (tau[2 * n / 3] + tau[n - 1]) / 2 - tau[n / 6];
  double d0 = std::log(e0 / e1) / std::max(dt_env, 1e-12);
  d0 = std::clamp(d0, 0.0, 20.0 / span * 10);

  RVec theta(5);
  theta << mean, val[0] - mean, d0, w0, 0.0;  // offset, A, decay, omega, phase

  auto model = [&](const RVec& th, double t) {
    return th(0) + th(1) * std::exp(-th(2) * t) * std::cos(th(3) * t + th(4));
  };
  auto resid = [&](const RVec& th) {
    RVec r(n);
    for (int i = 0; i < n; ++i) r(i) = model(th, tau[i]) - val[i];
    return r;
  };
  auto jac = [&](const RVec& th) {
    RMat J(n, 5);
    for (int i = 0; i < n; ++i) {
      const double t = tau[i];
      const double e = std::exp(-th(2) * t);
      const double c = std::cos(th(3) * t + th(4));
      const double s = std::sin(th(3) * t + th(4));
      J(i, 0) = 1;
      J(i, 1) = e * c;
      J(i, 2) = -t * th(1) * e * c;
      J(i, 3) = -t * th(1) * e * s;
      J(i, 4) = -th(1) * e * s;
    }
    return J;
  };
  if (!detail::levenberg_marquardt(theta, resid, jac))
    throw FitError("fit_damped_sinusoid: no convergence; freq guess " +
                   std::to_string(w0 / two_pi) + " MHz");

  DampedSinusoidFit fit;
  fit.offset = theta(0);
  fit.amplitude = theta(1);
  fit.decay_rate = theta(2);
  fit.frequency = theta(3);
  fit.phase = theta(4);
  if (fit.amplitude < 0) {
    fit.amplitude = -fit.amplitude;
    fit.phase += M_PI;
  }
  if (fit.frequency < 0) {
    fit.frequency = -fit.frequency;
    fit.phase = -fit.phase;
  }
  fit.phase = detail::wrap_phase(fit.phase);
  if (fit.decay_rate < 0) {
    if (fit.decay_rate < -1e-9)
      throw FitError("fit_damped_sinusoid: growing envelope");
    fit.decay_rate = 0;
  }
  fit.residual_rms = std::sqrt(resid(theta).squaredNorm() / n);
  return fit;
}

// Linearized 1-sigma uncertainty of the fitted frequency from the
// Gauss-Newton covariance s^2 (J^T J)^{-1} at the converged parameters.
inline double damped_sinusoid_frequency_sigma(const CorrelationSeries& series,
                                              const DampedSinusoidFit& fit) {
  const auto& tau = series.tau_grid;
  const int n = int(tau.size());
  if (n <= 5) throw ValidationError("frequency_sigma: too few points");
  RMat J(n, 5);
  RVec r(n);
  for (int i = 0; i < n; ++i) {
    const double t = tau[i];
    const double e = std::exp(-fit.decay_rate * t);
    const double c = std::cos(fit.frequency * t + fit.phase);
    const double s = std::sin(fit.frequency * t + fit.phase);
    J(i, 0) = 1;
    J(i, 1) = e * c;
    J(i, 2) = -t * fit.amplitude * e * c;
    J(i, 3) = -t * fit.amplitude * e * s;
    J(i, 4) = -fit.amplitude * e * s;
    r(i) = fit.offset + fit.amplitude * e * c - series.values[i];
  }
  const double s2 = r.squaredNorm() / (n - 5);
  RMat cov = (J.transpose() * J).ldlt().solve(RMat::Identity(5, 5)) * s2;
  return std::sqrt(std::max(cov(3, 3), 0.0));
}

// Model: rate(t) = R0 exp(-lambda t); extrapolated_total = R0/lambda.
inline ExpDecayFit fit_exponential_decay(const std::vector<double>& times,
                                         const std::vector<double>& rates) {
  const int n = int(times.size());
  if (n < 10 || rates.size() != times.size())
    throw ValidationError("fit_exponential_decay: need >= 10 samples");
  double total = 0;
  for (double r : rates) {
    if (r < 0) throw ValidationError("fit_exponential_decay: negative rate");
    total += r;
  }
  if (total == 0)
    throw FitError("fit_exponential_decay: all rates zero, degenerate fit");

  // Rate-weighted log-linear initial guess.
  double sw = 0, st = 0, sl = 0, stt = 0, stl = 0;
  for (int i = 0; i < n; ++i) {
    if (rates[i] <= 0) continue;
    const double w = rates[i];
    const double l = std::log(rates[i]);
    sw += w;
    st += w * times[i];
    sl += w * l;
    stt += w * times[i] * times[i];
    stl += w * times[i] * l;
  }
  const double det = sw * stt - st * st;
  double lam0 = 0, lr0 = std::log(total / n);
  if (std::abs(det) > 1e-300) {
    lam0 = -(sw * stl - st * sl) / det;
    lr0 = (stt * sl - st * stl) / det;
  }
  lam0 = std::max(lam0, 0.0);

  RVec theta(2);
  theta << std::exp(lr0), lam0;  // R0, lambda
  auto resid = [&](const RVec& th) {
    RVec r(n);
    for (int i = 0; i < n; ++i)
      r(i) = th(0) * std::exp(-th(1) * times[i]) - rates[i];
    return r;
  };
  auto jac = [&](const RVec& th) {
    RMat J(n, 2);
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-th(1) * times[i]);
      J(i, 0) = e;
      J(i, 1) = -times[i] * th(0) * e;
    }
    return J;
  };
  if (!detail::levenberg_marquardt(theta, resid, jac))
    throw FitError("fit_exponential_decay: no convergence");

  ExpDecayFit fit;
  fit.initial_rate = theta(0);
  fit.decay_constant = std::max(theta(1), 0.0);
  fit.extrapolated_total =
      fit.decay_constant > 1e-12
          ? fit.initial_rate / fit.decay_constant
          : std::numeric_limits<double>::infinity();
  fit.residual_rms = std::sqrt(resid(theta).squaredNorm() / n);
  return fit;
}

}  // namespace darkcavity
