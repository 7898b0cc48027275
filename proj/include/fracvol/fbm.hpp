#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracvol/core.hpp"
#include "fracvol/hypergeometric.hpp"

namespace fracvol {

/// E[W_t W_s] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
inline double fbm_covariance(HurstParam h, double t, double s) {
  if (t < 0.0 || s < 0.0) throw domain_error("fbm_covariance: times must be nonnegative");
  const double two_h = 2.0 * h.value();
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

/// Variance of the raw Volterra integral: int_0^t kernel(t,s)^2 ds = V_H t^{2H} with
/// V_H = Gamma(2-2H) cos(pi H) / (pi H (1-2H)). Equals 1 at H = 1/2.
inline double kernel_variance_factor(HurstParam h) {
  const double hv = h.value();
  const double d = 0.5 - hv;
  if (d == 0.0) return 1.0;
  // cos(pi H) / (1 - 2H) = sin(pi d) / (2 d)
  return std::tgamma(2.0 - 2.0 * hv) * std::sin(std::numbers::pi * d) / (2.0 * d) / (std::numbers::pi * hv);
}

/// Evaluates the raw Volterra kernel
///   (t-s)^{H-1/2} / Gamma(H+1/2) * 2F1(H-1/2, 1/2-H; H+1/2; 1 - t/s)   for s < t
/// and 0 for s >= t.
class VolterraKernel {
 public:
  explicit VolterraKernel(HurstParam h)
      : h_(h),
        exponent_(h.value() - 0.5),
        inv_gamma_(1.0 / std::tgamma(h.value() + 0.5)),
        f21_(h.value() - 0.5, 0.5 - h.value(), h.value() + 0.5) {}

  HurstParam hurst() const noexcept { return h_; }

  double operator()(double t, double s) const {
    if (!(t > 0.0) || !(s > 0.0)) throw domain_error("kernel: t and s must be positive");
    if (s >= t) return 0.0;
    return std::pow(t - s, exponent_) * inv_gamma_ * f21_(1.0 - t / s);
  }

  /// Kernel without the (t-s)^{H-1/2} factor.
  double regular_part(double t, double s) const { return inv_gamma_ * f21_(1.0 - t / s); }

 private:
  HurstParam h_;
  double exponent_;
  double inv_gamma_;
  GaussHypergeometric f21_;
};

inline double kernel(HurstParam h, double t, double s) { return VolterraKernel(h)(t, s); }

/// Lower-triangular matrix of kernel weights, indexed 1 <= i <= j <= N:
///   weight(j, i) = V_H^{-1/2} (1/dt) int_{t_{i-1}}^{t_i} kernel(t_j, s) ds
/// on regular cells. The singular cell of each row (the diagonal cell for
/// H < 1/2, the first cell for H > 1/2) instead carries the root mean square
///   V_H^{-1/2} sqrt((1/dt) int kernel(t_j, s)^2 ds),
/// so no variance is lost where the kernel blows up. The V_H^{-1/2} factor
/// makes the synthesized path have Var W_t = t^{2H}.
class KernelWeights {
 public:
  KernelWeights(HurstParam h, TimeGrid grid, std::vector<double> packed)
      : h_(h), grid_(grid), packed_(std::move(packed)) {
    const std::size_t n = grid_.n_steps();
    if (packed_.size() != n * (n + 1) / 2) throw std::invalid_argument("KernelWeights: packed size mismatch");
  }

  HurstParam hurst() const noexcept { return h_; }
  const TimeGrid& grid() const noexcept { return grid_; }

  double at(std::size_t j, std::size_t i) const {
    if (j < 1 || j > grid_.n_steps() || i < 1 || i > j) {
      throw std::out_of_range("KernelWeights: need 1 <= i <= j <= N, got (" + std::to_string(j) + ", " +
                              std::to_string(i) + ")");
    }
    return packed_[offset(j) + (i - 1)];
  }

  /// Entries (j,1..j).
  std::span<const double> row(std::size_t j) const {
    if (j < 1 || j > grid_.n_steps()) throw std::out_of_range("KernelWeights: row out of range");
    return {packed_.data() + offset(j), j};
  }

 private:
  static std::size_t offset(std::size_t j) noexcept { return (j - 1) * j / 2; }

  HurstParam h_;
  TimeGrid grid_;
  std::vector<double> packed_;
};

namespace detail {

using Gauss16 = boost::math::quadrature::gauss<double, 16>;

// int_a^b kernel(t, s) ds with the substitution u = (t-s)^{H+1/2}, which
// removes the (t-s)^{H-1/2} factor at the right endpoint b = t.
inline double integrate_to_diagonal(const VolterraKernel& k, double t, double a) {
  const double p = k.hurst().value() + 0.5;
  const double upper = std::pow(t - a, p);
  const double inv_p = 1.0 / p;
  auto integrand = [&](double u) {
    const double s = t - std::pow(u, inv_p);
    return k.regular_part(t, s) * inv_p;
  };
  return Gauss16::integrate(integrand, 0.0, upper);
}

// int_a^t kernel(t, s)^2 ds with u = (t-s)^{2H}.
inline double square_to_diagonal(const VolterraKernel& k, double t, double a) {
  const double p = 2.0 * k.hurst().value();
  const double inv_p = 1.0 / p;
  auto integrand = [&](double u) {
    const double r = k.regular_part(t, t - std::pow(u, inv_p));
    return r * r * inv_p;
  };
  return Gauss16::integrate(integrand, 0.0, std::pow(t - a, p));
}

// int_0^b kernel(t, s)^2 ds with s = v^{1/q}, q = 2 - 2H (H > 1/2).
inline double square_from_origin(const VolterraKernel& k, double t, double b) {
  const double q = 2.0 - 2.0 * k.hurst().value();
  const double inv_q = 1.0 / q;
  auto integrand = [&](double v) {
    const double s = std::pow(v, inv_q);
    const double kv = k(t, s);
    return kv * kv * std::pow(s, 1.0 - q) * inv_q;
  };
  return Gauss16::integrate(integrand, 0.0, std::pow(b, q));
}

}  // namespace detail

/// Builds the kernel weights with 16-point Gauss-Legendre per cell.
inline KernelWeights kernel_weights(HurstParam h, const TimeGrid& grid) {
  const std::size_t n = grid.n_steps();
  const double dt = grid.dt();
  const VolterraKernel k(h);
  const double scale = 1.0 / (dt * std::sqrt(kernel_variance_factor(h)));
  const bool origin_singular = h.value() > 0.5;

  std::vector<double> packed;
  packed.reserve(n * (n + 1) / 2);
  for (std::size_t j = 1; j <= n; ++j) {
    const double tj = grid.point(j);
    for (std::size_t i = 1; i <= j; ++i) {
      const double lo = grid.point(i - 1);
      const double hi = grid.point(i);
      const bool singular = origin_singular ? i == 1 : (h.value() < 0.5 && i == j);
      if (singular) {
        double sq = 0.0;
        if (i == j && origin_singular) {
          const double mid = 0.5 * hi;
          sq = detail::square_from_origin(k, tj, mid) + detail::square_to_diagonal(k, tj, mid);
        } else if (i == j) {
          sq = detail::square_to_diagonal(k, tj, lo);
        } else {
          sq = detail::square_from_origin(k, tj, hi);
        }
        packed.push_back(std::sqrt(sq * dt) * scale);
        continue;
      }
      const double integral = i == j ? detail::integrate_to_diagonal(k, tj, lo)
                                     : detail::Gauss16::integrate([&](double s) { return k(tj, s); }, lo, hi);
      packed.push_back(integral * scale);
    }
  }
  return KernelWeights(h, grid, std::move(packed));
}

/// W[0] = 0, W[j] = sum_{i=1..j} weight(j,i) * dv[i-1], where dv[i-1] is the
/// Brownian increment over [t_{i-1}, t_i].
inline std::vector<double> fbm_from_increments(const KernelWeights& w, std::span<const double> dv) {
  const std::size_t n = w.grid().n_steps();
  if (dv.size() != n) {
    throw std::invalid_argument("fbm_from_increments: expected " + std::to_string(n) + " increments, got " +
                                std::to_string(dv.size()));
  }
  std::vector<double> path(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const auto r = w.row(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i) acc += r[i] * dv[i];
    path[j] = acc;
  }
  return path;
}

/// Exact-law fBm sampler on a grid: Cholesky factor of the covariance matrix
/// of (W_{t_1}, ..., W_{t_N}).
class CholeskyFbm {
 public:
  CholeskyFbm(HurstParam h, const TimeGrid& grid) : grid_(grid) {
    const std::size_t n = grid.n_steps();
    Eigen::MatrixXd cov(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        cov(a, b) = cov(b, a) = fbm_covariance(h, grid.point(a + 1), grid.point(b + 1));
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw convergence_error("fBm covariance is not numerically positive definite; grid too fine");
    }
    factor_ = llt.matrixL();
  }

  const Eigen::MatrixXd& factor() const noexcept { return factor_; }

  std::vector<double> sample(std::span<const double> gauss) const {
    const std::size_t n = grid_.n_steps();
    if (gauss.size() != n) throw std::invalid_argument("CholeskyFbm: expected one normal draw per step");
    std::vector<double> path(n + 1, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b <= a; ++b) acc += factor_(a, b) * gauss[b];
      path[a + 1] = acc;
    }
    return path;
  }

 private:
  TimeGrid grid_;
  Eigen::MatrixXd factor_;
};

inline std::vector<double> fbm_cholesky_oracle(HurstParam h, const TimeGrid& grid, std::span<const double> gauss) {
  return CholeskyFbm(h, grid).sample(gauss);
}

}  // namespace fracvol
