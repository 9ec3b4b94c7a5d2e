#pragma once

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <stdexcept>

namespace wavebound::special {

/// Riemann zeta at an integer argument, exact trivial zeros for negative evens.
inline double zeta_int(int s) {
  if (s == 1) throw std::domain_error("zeta pole at s = 1");
  if (s == 0) return -0.5;
  if (s < 0) {
    const int n = -s;
    if (n % 2 == 0) return 0.0;
    // zeta(-n) = -B_{n+1} / (n + 1) for odd n
    return -boost::math::bernoulli_b2n<double>((n + 1) / 2) / (n + 1);
  }
  return boost::math::zeta(static_cast<double>(s));
}

/// Polylogarithm Li_s(x) for integer s >= 2 and real 0 <= x <= 1.
///
/// Direct power series for x <= 1/2; otherwise the expansion about x = 1 in
/// mu = log x, which converges for |mu| < 2 pi.
inline double polylog(int s, double x) {
  if (s < 2) throw std::domain_error("polylog implemented for s >= 2");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("polylog implemented for 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return zeta_int(s);
  if (x <= 0.5) {
    double sum = 0.0;
    double xk = x;
    for (int k = 1; k < 200; ++k) {
      const double term = xk / std::pow(static_cast<double>(k), s);
      sum += term;
      if (term < 1e-17 * sum) break;
      xk *= x;
    }
    return sum;
  }
  const double mu = std::log(x);
  double harmonic = 0.0;
  for (int j = 1; j <= s - 1; ++j) harmonic += 1.0 / j;
  double fact = 1.0;  // k!
  double mu_k = 1.0;  // mu^k
  double sum = 0.0;
  // |mu| < log 2, so terms shrink like (|mu| / 2 pi)^k.
  for (int k = 0; k < 40; ++k) {
    if (k > 0) {
      fact *= k;
      mu_k *= mu;
    }
    double term;
    if (k == s - 1)
      term = mu_k / fact * (harmonic - std::log(-mu));
    else
      term = zeta_int(s - k) * mu_k / fact;
    sum += term;
  }
  return sum;
}

}  // namespace wavebound::special
