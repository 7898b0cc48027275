#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracvol/core.hpp"
#include "fracvol/dynamics.hpp"
#include "fracvol/fbm.hpp"

// Pathwise Malliavin derivatives of the regularized volatility driver Z and of
// the log-price X on the simulation grid.
//
// Index conventions: t_index is a grid point (0..N). u_index is a noise cell:
// u = k refers to the increment over [t_{k-1}, t_k], so a perturbation at u
// first moves z[u]. Every derivative vanishes for u > t.
//
// Z carries the drift (1/2) f Lambda_eps, so the linearized equation for D_u Z
// has coefficient (1/2) F_eps and the exponentials below integrate (1/2) F_eps.
// Inner integrals are left-point sums on the grid.

namespace fracvol {

/// F_eps(t,z) = df/dz(t,z) Lambda_eps(z) + f(t,z) Lambda_eps'(z), the z-derivative of f Lambda_eps.
class MalliavinCoefficient {
 public:
  MalliavinCoefficient(DriftSpec drift, double epsilon) : drift_(std::move(drift)), epsilon_(epsilon) {
    if (!(epsilon >= 0.0)) throw domain_error("MalliavinCoefficient: epsilon must be nonnegative");
  }

  double operator()(double t, double z) const {
    if (epsilon_ == 0.0 && !(z > 0.0)) throw domain_error("F_eps is singular at z <= 0 when epsilon = 0");
    return drift_.df_dz(t, z) * lambda_eps(z, epsilon_) + drift_.f(t, z) * lambda_eps_prime(z, epsilon_);
  }

  const DriftSpec& drift() const noexcept { return drift_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  DriftSpec drift_;
  double epsilon_;
};

inline double coefficient_F(const MalliavinCoefficient& mc, double t, double z) { return mc(t, z); }

/// Pointwise eps -> 0 limit of F_eps for z > 0: f_z/z - f/z^2.
inline double coefficient_F_limit(const DriftSpec& drift, double t, double z) {
  if (!(z > 0.0)) throw domain_error("coefficient_F_limit: z must be positive");
  return drift.df_dz(t, z) / z - drift.f(t, z) / (z * z);
}

namespace detail {

inline void check_indices(std::size_t u, std::size_t t, std::size_t n) {
  if (t > n || u > n) throw std::out_of_range("Malliavin derivative: index beyond grid");
}

inline void check_alive(const ZPath& zpath, std::size_t t) {
  if (!zpath.alive_through(t)) throw domain_error("Malliavin derivative: path hit zero before the requested time");
}

// F_eps(t_i, z_i) dt / 2 for i = u..t-1.
inline std::vector<double> half_coefficients(const ZPath& zpath, const MalliavinCoefficient& mc,
                                             const TimeGrid& grid, std::size_t u, std::size_t t) {
  std::vector<double> k;
  k.reserve(t - u);
  const double half_dt = 0.5 * grid.dt();
  for (std::size_t i = u; i < t; ++i) k.push_back(mc(grid.point(i), zpath.z[i]) * half_dt);
  return k;
}

}  // namespace detail

/// Derivative of Z_t with respect to the fBm at time u:
///   (nu/2) exp( (1/2) sum_{i=u}^{t-1} F_eps(t_i, z_i) dt ).
inline double dW_z(std::size_t u_index, std::size_t t_index, const ZPath& zpath, const MalliavinCoefficient& mc,
                   double nu, const TimeGrid& grid) {
  detail::check_indices(u_index, t_index, grid.n_steps());
  if (u_index > t_index) return 0.0;
  detail::check_alive(zpath, t_index);
  double exponent = 0.0;
  for (double k : detail::half_coefficients(zpath, mc, grid, u_index, t_index)) exponent += k;
  return 0.5 * nu * std::exp(exponent);
}

/// Derivative of Z_t with respect to the Brownian increment of cell u (through the kernel):
///   (nu/2) [ c(t,u) + sum_{s=u}^{t-1} c(s,u) (1/2) F_eps(t_s, z_s) dt exp((1/2) sum_{r=s+1}^{t-1} F_eps dt) ]
/// with c the cell-averaged kernel weights.
inline double dV_z(std::size_t u_index, std::size_t t_index, const ZPath& zpath, const MalliavinCoefficient& mc,
                   double nu, const KernelWeights& weights) {
  const TimeGrid& grid = weights.grid();
  detail::check_indices(u_index, t_index, grid.n_steps());
  if (u_index > t_index || u_index == 0) return 0.0;
  detail::check_alive(zpath, t_index);

  const auto k = detail::half_coefficients(zpath, mc, grid, u_index, t_index);
  double tail = 0.0;  // (1/2) sum_{r=s+1}^{t-1} F dt
  double acc = 0.0;
  for (std::size_t s = t_index; s-- > u_index;) {
    const double ks = k[s - u_index];
    acc += weights.at(s, u_index) * ks * std::exp(tail);
    tail += ks;
  }
  return 0.5 * nu * (weights.at(t_index, u_index) + acc);
}

/// D_u Z_k for k = 0..t (zero before u).
inline std::vector<double> dV_z_profile(std::size_t u_index, std::size_t t_index, const ZPath& zpath,
                                        const MalliavinCoefficient& mc, double nu, const KernelWeights& weights) {
  std::vector<double> d(t_index + 1, 0.0);
  for (std::size_t j = u_index; j <= t_index; ++j) d[j] = dV_z(u_index, j, zpath, mc, nu, weights);
  return d;
}

/// Derivative of X_T with respect to the independent Brownian motion V~ on cell u:
/// sqrt(1-rho^2) sigma(y_{u-1}). Z does not depend on V~.
inline double dVtilde_x(std::size_t u_index, double rho, const VolFunction& vol, const ZPath& zpath) {
  if (!(std::abs(rho) < 1.0)) throw domain_error("dVtilde_x: requires |rho| < 1");
  if (u_index == 0 || u_index >= zpath.y.size()) throw std::out_of_range("dVtilde_x: cell index out of range");
  return std::sqrt(1.0 - rho * rho) * vol(zpath.y[u_index - 1]);
}

/// Volatility-channel part of D^B_u X_t in a market where the fBm is driven by
/// B itself (bundle built with rho = 1):
///   sum_{k=u}^{t-1} sigma'(y_k) D_u Y_k db_k - sum_{k=u}^{t-1} sigma(y_k) sigma'(y_k) D_u Y_k dt,
/// with D_u Y_k = 2 z_k D_u Z_k.
inline double dB_x(std::size_t u_index, std::size_t t_index, const ZPath& zpath, const PathBundle& bundle,
                   const MalliavinCoefficient& mc, double nu, const KernelWeights& weights, const VolFunction& vol) {
  detail::check_indices(u_index, t_index, bundle.grid.n_steps());
  if (u_index > t_index || u_index == 0) return 0.0;
  const double dt = bundle.grid.dt();
  const auto dz = dV_z_profile(u_index, t_index > u_index ? t_index - 1 : u_index, zpath, mc, nu, weights);
  double acc = 0.0;
  for (std::size_t k = u_index; k < t_index; ++k) {
    const double dy = 2.0 * zpath.z[k] * dz[k];
    const double sp = vol.derivative(zpath.y[k]);
    acc += sp * dy * bundle.db[k] - vol(zpath.y[k]) * sp * dy * dt;
  }
  return acc;
}

/// Full D^B_u X_t: the instantaneous term sigma(y_{u-1}) plus dB_x.
inline double dB_x_total(std::size_t u_index, std::size_t t_index, const ZPath& zpath, const PathBundle& bundle,
                         const MalliavinCoefficient& mc, double nu, const KernelWeights& weights,
                         const VolFunction& vol) {
  if (u_index > t_index || u_index == 0) return 0.0;
  return vol(zpath.y[u_index - 1]) + dB_x(u_index, t_index, zpath, bundle, mc, nu, weights, vol);
}

// ---------------------------------------------------------------------------
// Finite-difference oracles: re-simulate under bumped noise, same seeds.
// ---------------------------------------------------------------------------

/// Forward difference of z[t] under W^H_s -> W^H_s + delta 1{s >= t_u}.
inline double fd_dW_z(const RegularizedZConfig& cfg, const PathBundle& bundle, std::size_t u_index,
                      std::size_t t_index, double delta) {
  const ZPath base = simulate_z(cfg, bundle);
  PathBundle bumped = bundle;
  for (std::size_t i = u_index; i < bumped.wh.size(); ++i) bumped.wh[i] += delta;
  const ZPath moved = simulate_z(cfg, bumped);
  return (moved.z[t_index] - base.z[t_index]) / delta;
}

/// Forward difference of z[t] under dV[u] -> dV[u] + delta with the fBm re-synthesized.
inline double fd_dV_z(const RegularizedZConfig& cfg, const PathBundle& bundle, const KernelWeights& weights,
                      std::size_t u_index, std::size_t t_index, double delta) {
  const ZPath base = simulate_z(cfg, bundle);
  PathBundle bumped = bundle;
  bumped.dv.at(u_index - 1) += delta;
  bumped.resynthesize(weights);
  const ZPath moved = simulate_z(cfg, bumped);
  return (moved.z[t_index] - base.z[t_index]) / delta;
}

/// Forward difference of the log-price x[t] under dV~[u] -> dV~[u] + delta.
inline double fd_dVtilde_x(const RegularizedZConfig& cfg, const PathBundle& bundle, const KernelWeights& weights,
                           const VolFunction& vol, double s0, double eta, std::size_t u_index, std::size_t t_index,
                           double delta) {
  const ZPath z = simulate_z(cfg, bundle);
  const auto base = log_price_path(s0, eta, vol, z, bundle);
  PathBundle bumped = bundle;
  bumped.dvt.at(u_index - 1) += delta;
  bumped.resynthesize(weights);
  const ZPath z2 = simulate_z(cfg, bumped);
  const auto moved = log_price_path(s0, eta, vol, z2, bumped);
  return (moved[t_index] - base[t_index]) / delta;
}

/// Forward difference of the log-price x[t] under dB[u] -> dB[u] + delta, for a
/// bundle with rho = 1 so that B also drives the fBm.
inline double fd_dB_x(const RegularizedZConfig& cfg, const PathBundle& bundle, const KernelWeights& weights,
                      const VolFunction& vol, double s0, double eta, std::size_t u_index, std::size_t t_index,
                      double delta) {
  if (bundle.rho != 1.0) throw std::invalid_argument("fd_dB_x: bundle must be built with rho = 1");
  const ZPath z = simulate_z(cfg, bundle);
  const auto base = log_price_path(s0, eta, vol, z, bundle);
  PathBundle bumped = bundle;
  bumped.dv.at(u_index - 1) += delta;
  bumped.resynthesize(weights);
  const ZPath z2 = simulate_z(cfg, bumped);
  const auto moved = log_price_path(s0, eta, vol, z2, bumped);
  return (moved[t_index] - base[t_index]) / delta;
}

}  // namespace fracvol
