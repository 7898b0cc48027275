#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

// Reference evaluations that share no code with the library.

namespace oracle {

// Euler's integral
//   2F1(a,b;c;x) = Gamma(c) / (Gamma(b) Gamma(c-b)) int_0^1 t^{b-1} (1-t)^{c-b-1} (1-xt)^{-a} dt,
// valid for c > b > 0 and x < 1. The symmetry in (a, b) is used when b <= 0.
inline double euler_2f1(double a, double b, double c, double x) {
  if (!(b > 0.0 && c > b)) std::swap(a, b);
  boost::math::quadrature::tanh_sinh<double> ts;
  // xc is the signed distance to the nearer endpoint, accurate where t is close to 0 or 1
  auto f = [&](double t, double xc) {
    const double lo = xc < 0.0 ? -xc : t;
    const double hi = xc > 0.0 ? xc : 1.0 - t;
    return std::pow(lo, b - 1.0) * std::pow(hi, c - b - 1.0) * std::pow(1.0 - x * t, -a);
  };
  const double integral = ts.integrate(f, 0.0, 1.0);
  return std::tgamma(c) / (std::tgamma(b) * std::tgamma(c - b)) * integral;
}

// Volterra kernel assembled from the Euler-integral 2F1. gap = t - s may be
// passed separately when s is close to t.
inline double kernel(double h, double t, double s, double gap = -1.0) {
  if (s >= t) return 0.0;
  if (gap <= 0.0) gap = t - s;
  return std::pow(gap, h - 0.5) / std::tgamma(h + 0.5) * euler_2f1(h - 0.5, 0.5 - h, h + 0.5, 1.0 - t / s);
}

// int_0^t kernel(t, s)^2 ds by tanh-sinh.
inline double kernel_square_integral(double h, double t) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto left = [&](double s) {
    if (s < 1e-200) return 0.0;  // omitted mass is below 1e-40 for any H in (0,1)
    const double k = kernel(h, t, s);
    return k * k;
  };
  // right half with u = (t-s)^{2H}, which absorbs the (t-s)^{2H-1} factor of the square
  const double p = 2.0 * h;
  auto right = [&](double u) {
    const double s = t - std::pow(u, 1.0 / p);
    const double reg = euler_2f1(h - 0.5, 0.5 - h, h + 0.5, 1.0 - t / s) / std::tgamma(h + 0.5);
    return reg * reg / p;
  };
  return ts.integrate(left, 0.0, 0.5 * t, 1e-12) + ts.integrate(right, 0.0, std::pow(0.5 * t, p), 1e-12);
}

// e^{-rT} E[(S-K)^+ + 1{S>K}] for lognormal S_T, integrating the payoff against
// the density of log S_T over (log K, infinity).
inline double lognormal_call_plus_binary(double s0, double strike, double r, double sigma, double t) {
  const double m = std::log(s0) + (r - 0.5 * sigma * sigma) * t;
  const double sd = sigma * std::sqrt(t);
  const double lk = std::log(strike);
  const double log_norm = std::log(sd * std::sqrt(2.0 * std::numbers::pi));
  auto log_density = [&](double x) {
    const double z = (x - m) / sd;
    return -0.5 * z * z - log_norm;
  };
  boost::math::quadrature::exp_sinh<double> es;
  const double v = es.integrate([&](double u) {
    const double x = lk + u;
    const double ld = log_density(x);
    return std::exp(x + ld) + (1.0 - strike) * std::exp(ld);
  }, 0.0, std::numeric_limits<double>::infinity());
  return std::exp(-r * t) * v;
}

}  // namespace oracle
