#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fracvol/core.hpp"
#include "fracvol/fbm.hpp"
#include "fracvol/rng.hpp"

namespace fracvol {

// ---------------------------------------------------------------------------
// Drift of the volatility driver Z
// ---------------------------------------------------------------------------

/// f(t,z) = -theta z^2. Z itself is then an Ornstein-Uhlenbeck process.
struct OrnsteinUhlenbeckDrift {
  double theta;
};

/// f(t,z) = mu - theta z^2.
struct StandardFcirDrift {
  double mu;
  double theta;
};

/// f(t,z) = amplitude (1 - e^{-2 theta t}) + level - theta z^2.
struct TimeVaryingDrift {
  double amplitude;
  double theta;
  double level;
};

class DriftSpec {
 public:
  using Kind = std::variant<OrnsteinUhlenbeckDrift, StandardFcirDrift, TimeVaryingDrift>;

  static DriftSpec ornstein_uhlenbeck(double theta) {
    require_nonnegative(theta, "theta");
    return DriftSpec(OrnsteinUhlenbeckDrift{theta});
  }

  static DriftSpec standard_fcir(double mu, double theta) {
    require_positive(theta, "theta");
    return DriftSpec(StandardFcirDrift{mu, theta});
  }

  /// f(t,z) = nu^2/(2 theta) (1 - e^{-2 theta t}) + (c - theta z^2).
  static DriftSpec time_varying(double nu, double theta, double c) {
    require_positive(nu, "nu");
    require_positive(theta, "theta");
    require_positive(c, "c");
    return DriftSpec(TimeVaryingDrift{nu * nu / (2.0 * theta), theta, c});
  }

  /// f(t,y) = sigma^2/2 (1 - e^{-2 kappa t}) + kappa (c - y^2).
  static DriftSpec time_varying_kappa_form(double sigma, double kappa, double c) {
    require_positive(sigma, "sigma");
    require_positive(kappa, "kappa");
    require_positive(c, "c");
    return DriftSpec(TimeVaryingDrift{0.5 * sigma * sigma, kappa, kappa * c});
  }

  const Kind& kind() const noexcept { return kind_; }

  double f(double t, double z) const {
    return std::visit(
        [&](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, OrnsteinUhlenbeckDrift>) {
            return -d.theta * z * z;
          } else if constexpr (std::is_same_v<D, StandardFcirDrift>) {
            return d.mu - d.theta * z * z;
          } else {
            return d.amplitude * (1.0 - std::exp(-2.0 * d.theta * t)) + d.level - d.theta * z * z;
          }
        },
        kind_);
  }

  double df_dz(double /*t*/, double z) const {
    return std::visit([&](const auto& d) { return -2.0 * d.theta * z; }, kind_);
  }

  bool is_ornstein_uhlenbeck() const noexcept { return std::holds_alternative<OrnsteinUhlenbeckDrift>(kind_); }

 private:
  explicit DriftSpec(Kind k) : kind_(k) {}

  static void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw validation_error(std::string("drift parameter ") + name + " must be positive");
  }
  static void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0)) throw validation_error(std::string("drift parameter ") + name + " must be nonnegative");
  }

  Kind kind_;
};

/// Time-varying drift used for the sample-path figures: sigma = 0.1, kappa = 1, c = 2.
inline DriftSpec drift_figure_preset(double sigma = 0.1, double kappa = 1.0, double c = 2.0) {
  return DriftSpec::time_varying_kappa_form(sigma, kappa, c);
}

// ---------------------------------------------------------------------------
// Volatility map sigma(y)
// ---------------------------------------------------------------------------

/// sigma(y) = sqrt(y + a)
struct SqrtShiftVol {
  double a;
};
/// sigma(y) = a y + b
struct AffineVol {
  double a;
  double b;
};
/// sigma(y) = sqrt(y^2 + c)
struct SqrtQuadVol {
  double c;
};

class VolFunction {
 public:
  using Kind = std::variant<SqrtShiftVol, AffineVol, SqrtQuadVol>;

  static VolFunction sqrt_shift(double a) {
    if (!(a >= 0.0)) throw validation_error("sqrt-shift volatility needs a >= 0");
    return VolFunction(SqrtShiftVol{a});
  }
  static VolFunction affine(double a, double b) {
    if (!(b >= 0.0) || !(a >= 0.0)) throw validation_error("affine volatility needs a, b >= 0");
    return VolFunction(AffineVol{a, b});
  }
  static VolFunction sqrt_quad(double c) {
    if (!(c >= 0.0)) throw validation_error("sqrt-quad volatility needs c >= 0");
    return VolFunction(SqrtQuadVol{c});
  }
  static VolFunction constant(double sigma) { return affine(0.0, sigma); }

  const Kind& kind() const noexcept { return kind_; }

  double operator()(double y) const {
    return std::visit(
        [&](const auto& v) -> double {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, SqrtShiftVol>) {
            return std::sqrt(y + v.a);
          } else if constexpr (std::is_same_v<V, AffineVol>) {
            return v.a * y + v.b;
          } else {
            return std::sqrt(y * y + v.c);
          }
        },
        kind_);
  }

  double derivative(double y) const {
    return std::visit(
        [&](const auto& v) -> double {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, SqrtShiftVol>) {
            return 0.5 / std::sqrt(y + v.a);
          } else if constexpr (std::is_same_v<V, AffineVol>) {
            return v.a;
          } else {
            return y / std::sqrt(y * y + v.c);
          }
        },
        kind_);
  }

  /// sigma(y) > 0 for every y >= 0.
  bool strictly_positive() const noexcept {
    return std::visit(
        [](const auto& v) -> bool {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, SqrtShiftVol>) {
            return v.a > 0.0;
          } else if constexpr (std::is_same_v<V, AffineVol>) {
            return v.b > 0.0;
          } else {
            return v.c > 0.0;
          }
        },
        kind_);
  }

  std::string label() const {
    return std::visit(
        [](const auto& v) -> std::string {
          using V = std::decay_t<decltype(v)>;
          auto num = [](double x) {
            std::string s = std::to_string(x);
            s.erase(s.find_last_not_of('0') + 1);
            if (s.back() == '.') s.pop_back();
            return s;
          };
          if constexpr (std::is_same_v<V, SqrtShiftVol>) {
            return "sqrt(y+" + num(v.a) + ")";
          } else if constexpr (std::is_same_v<V, AffineVol>) {
            return (v.a == 1.0 ? std::string("y") : num(v.a) + "y") + "+" + num(v.b);
          } else {
            return "sqrt(y^2+" + num(v.c) + ")";
          }
        },
        kind_);
  }

 private:
  explicit VolFunction(Kind k) : kind_(k) {}
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Regularization Lambda_eps(z) = (z 1{z>0} + eps)^{-1}
// ---------------------------------------------------------------------------

inline double lambda_eps(double z, double epsilon) {
  if (epsilon < 0.0) throw domain_error("lambda_eps: epsilon must be nonnegative");
  const double denom = (z > 0.0 ? z : 0.0) + epsilon;
  if (denom == 0.0) throw domain_error("lambda_eps: division by zero (epsilon = 0 and z <= 0)");
  return 1.0 / denom;
}

/// 0 for z < 0, -(z + eps)^{-2} for z >= 0.
inline double lambda_eps_prime(double z, double epsilon) {
  if (epsilon < 0.0) throw domain_error("lambda_eps_prime: epsilon must be nonnegative");
  if (z < 0.0) {
    if (epsilon == 0.0) throw domain_error("lambda_eps_prime: undefined for epsilon = 0 and z <= 0");
    return 0.0;
  }
  const double denom = z + epsilon;
  if (denom == 0.0) throw domain_error("lambda_eps_prime: division by zero (epsilon = 0 and z = 0)");
  return -1.0 / (denom * denom);
}

/// Default regularization: 0.01 for H <= 1/2, none above.
inline double auto_epsilon(HurstParam h) noexcept { return h.value() <= 0.5 ? 0.01 : 0.0; }

// ---------------------------------------------------------------------------
// Regularized fractional CIR driver
// ---------------------------------------------------------------------------

struct RegularizedZConfig {
  DriftSpec drift;
  double epsilon = 0.0;
  double nu = 0.0;  ///< noise coefficient; the SDE carries nu/2
  double z0 = 1.0;
  /// When false (Ornstein-Uhlenbeck drift only) Z may cross zero: Y = Z^2 with
  /// no stopping and the drift uses the exact ratio f(t,z)/z = -theta z.
  bool freeze_at_zero = true;

  void validate() const {
    if (!(epsilon >= 0.0)) throw validation_error("epsilon must be nonnegative");
    if (!(nu >= 0.0)) throw validation_error("nu must be nonnegative");
    if (!(z0 > 0.0)) throw validation_error("z0 must be positive");
    if (!freeze_at_zero && !drift.is_ornstein_uhlenbeck()) {
      throw validation_error("unfrozen mode is only defined for the Ornstein-Uhlenbeck drift");
    }
  }

  /// Drift of Z at (t, z): (1/2) f(t,z) Lambda_eps(z), or (1/2) f/z in unfrozen mode.
  double z_drift(double t, double z) const {
    if (!freeze_at_zero) {
      return -0.5 * std::get<OrnsteinUhlenbeckDrift>(drift.kind()).theta * z;
    }
    return 0.5 * drift.f(t, z) * lambda_eps(z, epsilon);
  }
};

/// One realization of the driving noise on a grid.
struct PathBundle {
  TimeGrid grid;
  double rho = 0.0;
  std::vector<double> dv;   ///< increments of V, dv[k] on [t_k, t_{k+1}]
  std::vector<double> dvt;  ///< increments of V~
  std::vector<double> db;   ///< rho dv + sqrt(1-rho^2) dvt
  std::vector<double> wh;   ///< fBm at grid points, wh[0] = 0
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;

  /// Recomputes db and wh after dv or dvt was modified.
  void resynthesize(const KernelWeights& weights) {
    const double rc = std::sqrt(1.0 - rho * rho);
    for (std::size_t k = 0; k < dv.size(); ++k) db[k] = rho * dv[k] + rc * dvt[k];
    wh = fbm_from_increments(weights, dv);
  }
};

inline PathBundle correlated_bundle(const TimeGrid& grid, double rho, const KernelWeights& weights,
                                    std::uint64_t seed, std::uint64_t path_index) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw validation_error("rho must lie in [-1, 1]");
  if (!(weights.grid() == grid)) throw std::invalid_argument("correlated_bundle: kernel weights built on a different grid");

  const std::size_t n = grid.n_steps();
  const double sdt = std::sqrt(grid.dt());
  PathBundle b{grid, rho, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), {}, seed,
               path_index};
  NormalStream sv(seed, path_index, Stream::V);
  NormalStream svt(seed, path_index, Stream::VTilde);
  for (std::size_t k = 0; k < n; ++k) b.dv[k] = sdt * sv.normal();
  for (std::size_t k = 0; k < n; ++k) b.dvt[k] = sdt * svt.normal();
  b.resynthesize(weights);
  return b;
}

struct ZPath {
  std::vector<double> z;
  std::vector<double> y;
  /// First grid index with z <= 0; empty if the path stayed positive.
  std::optional<std::size_t> tau_index;

  bool alive_through(std::size_t j) const noexcept { return !tau_index || j < *tau_index; }
};

/// Euler scheme z[i+1] = z[i] + (1/2) f(t_i,z_i) Lambda_eps(z_i) dt + (nu/2)(wh[i+1] - wh[i]).
/// The path is frozen at zero from the first grid index where z <= 0.
inline ZPath simulate_z(const RegularizedZConfig& cfg, const PathBundle& bundle) {
  const TimeGrid& grid = bundle.grid;
  const std::size_t n = grid.n_steps();
  const double dt = grid.dt();
  if (bundle.wh.size() != n + 1) throw std::invalid_argument("simulate_z: fBm path length does not match grid");

  ZPath p{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0), std::nullopt};
  p.z[0] = cfg.z0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = p.z[i];
    if (cfg.freeze_at_zero && zi <= 0.0) {
      p.tau_index = i;
      break;
    }
    p.z[i + 1] = zi + cfg.z_drift(grid.point(i), zi) * dt + 0.5 * cfg.nu * (bundle.wh[i + 1] - bundle.wh[i]);
  }
  if (cfg.freeze_at_zero && !p.tau_index && p.z[n] <= 0.0) p.tau_index = n;

  const std::size_t live = p.tau_index.value_or(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    if (i < live) {
      p.y[i] = p.z[i] * p.z[i];
    } else {
      p.z[i] = 0.0;
      p.y[i] = 0.0;
    }
  }
  return p;
}

struct StockPath {
  std::vector<double> s;
  std::vector<double> x;  ///< log s; NaN once the price is nonpositive
  bool nonpositive = false;
};

/// Euler scheme s[i+1] = s[i] (1 + eta dt + sigma(y_i) db_i). A path whose
/// price reaches s <= 0 is flagged and held at 0 afterwards.
inline StockPath simulate_stock(double s0, double eta, const VolFunction& vol, const ZPath& zpath,
                                const PathBundle& bundle) {
  if (!(s0 > 0.0)) throw validation_error("initial price must be positive");
  const std::size_t n = bundle.grid.n_steps();
  const double dt = bundle.grid.dt();
  StockPath p{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, std::numeric_limits<double>::quiet_NaN()),
              false};
  p.s[0] = s0;
  p.x[0] = std::log(s0);
  for (std::size_t i = 0; i < n; ++i) {
    const double next = p.s[i] * (1.0 + eta * dt + vol(zpath.y[i]) * bundle.db[i]);
    if (!(next > 0.0)) {
      p.nonpositive = true;
      break;
    }
    p.s[i + 1] = next;
    p.x[i + 1] = std::log(next);
  }
  return p;
}

/// s[N] of simulate_stock without storing the path; empty when the path is flagged.
inline std::optional<double> terminal_price(double s0, double eta, const VolFunction& vol, const ZPath& zpath,
                                            const PathBundle& bundle) {
  const std::size_t n = bundle.grid.n_steps();
  const double dt = bundle.grid.dt();
  double s = s0;
  for (std::size_t i = 0; i < n; ++i) {
    s = s * (1.0 + eta * dt + vol(zpath.y[i]) * bundle.db[i]);
    if (!(s > 0.0)) return std::nullopt;
  }
  return s;
}

/// Log-price from the Ito form x[i+1] = x[i] + (eta - sigma_i^2/2) dt + sigma_i db_i.
/// Used where the continuous-time log-return is differentiated along a path.
inline std::vector<double> log_price_path(double s0, double eta, const VolFunction& vol, const ZPath& zpath,
                                          const PathBundle& bundle) {
  const std::size_t n = bundle.grid.n_steps();
  const double dt = bundle.grid.dt();
  std::vector<double> x(n + 1);
  x[0] = std::log(s0);
  for (std::size_t i = 0; i < n; ++i) {
    const double sig = vol(zpath.y[i]);
    x[i + 1] = x[i] + (eta - 0.5 * sig * sig) * dt + sig * bundle.db[i];
  }
  return x;
}

}  // namespace fracvol
