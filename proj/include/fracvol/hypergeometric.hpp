#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "fracvol/core.hpp"

namespace fracvol {

namespace detail {

inline bool is_nonpositive_integer(double v) noexcept { return v <= 0.0 && v == std::floor(v); }

/// 1/Gamma(x), zero at the poles.
inline double reciprocal_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

inline constexpr int kSeriesTermCap = 1'000'000;
inline constexpr double kSeriesRelTol = 1e-14;

/// Gauss series sum_n (a)_n (b)_n / ((c)_n n!) x^n for |x| < 1.
/// Terminates early when a or b is a nonpositive integer.
inline double gauss_series(double a, double b, double c, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < kSeriesTermCap; ++n) {
    const double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;
    if (std::abs(term) <= kSeriesRelTol * std::abs(sum) && std::abs(ratio) < 1.0) return sum;
  }
  throw convergence_error("2F1 series did not converge within " + std::to_string(kSeriesTermCap) + " terms");
}

}  // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; x) for real x < 1.
///
/// Negative arguments are mapped into [0, 1) with the Pfaff transformation
/// 2F1(a,b;c;x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1)). Arguments in (1/2, 1)
/// go through the z -> 1-z connection formula unless c-a-b is an integer, in
/// which case the plain series is summed up to the term cap.
///
/// The parameter triple is fixed at construction so that the gamma-function
/// prefactors of the connection formula are computed once; the Volterra
/// kernel evaluates the same triple millions of times.
class GaussHypergeometric {
 public:
  GaussHypergeometric(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (detail::is_nonpositive_integer(c)) {
      throw domain_error("2F1: c must not be a nonpositive integer");
    }
    polynomial_ = detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b);
    // Parameters after the Pfaff map (a, c-b; c).
    pfaff_ = Connection::make(a, c - b, c);
    direct_ = Connection::make(a, b, c);
  }

  double operator()(double x) const {
    if (std::isnan(x)) throw domain_error("2F1: argument is NaN");
    if (x >= 1.0) throw domain_error("2F1: argument must be < 1, got " + std::to_string(x));
    if (polynomial_ || x == 0.0) return detail::gauss_series(a_, b_, c_, x);
    if (x < 0.0) {
      const double z = x / (x - 1.0);
      return std::pow(1.0 - x, -a_) * eval_unit(pfaff_, a_, c_ - b_, z);
    }
    return eval_unit(direct_, a_, b_, x);
  }

 private:
  struct Connection {
    bool usable = false;
    double s = 0.0;      // c - a - b
    double front = 0.0;  // Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b))
    double back = 0.0;   // Gamma(c)Gamma(a+b-c) / (Gamma(a)Gamma(b))

    static Connection make(double a, double b, double c) {
      Connection k;
      k.s = c - a - b;
      const double frac = k.s - std::round(k.s);
      if (std::abs(frac) < 1e-8) return k;
      k.usable = true;
      const double gc = std::tgamma(c);
      k.front = gc * std::tgamma(k.s) * detail::reciprocal_gamma(c - a) * detail::reciprocal_gamma(c - b);
      k.back = gc * std::tgamma(-k.s) * detail::reciprocal_gamma(a) * detail::reciprocal_gamma(b);
      return k;
    }
  };

  // 2F1(a,b;c;z) for z in [0,1).
  double eval_unit(const Connection& k, double a, double b, double z) const {
    if (z <= 0.5 || !k.usable) return detail::gauss_series(a, b, c_, z);
    const double w = 1.0 - z;
    double value = k.front * detail::gauss_series(a, b, a + b - c_ + 1.0, w);
    if (k.back != 0.0) {
      value += k.back * std::pow(w, k.s) * detail::gauss_series(c_ - a, c_ - b, k.s + 1.0, w);
    }
    return value;
  }

  double a_, b_, c_;
  bool polynomial_ = false;
  Connection pfaff_;
  Connection direct_;
};

/// One-shot evaluation of 2F1(a, b; c; x), x < 1.
inline double gauss_2f1(double a, double b, double c, double x) { return GaussHypergeometric(a, b, c)(x); }

}  // namespace fracvol
