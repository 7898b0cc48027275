#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <locale>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracvol/config.hpp"
#include "fracvol/core.hpp"
#include "fracvol/dynamics.hpp"
#include "fracvol/fbm.hpp"
#include "fracvol/hypergeometric.hpp"
#include "fracvol/malliavin.hpp"
#include "fracvol/pricing.hpp"
#include "fracvol/rng.hpp"

// Runtime invariant checks shared by `fracvol verify` and the acceptance
// binary. A check never throws: exceptions are turned into failures.

namespace fracvol {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

enum class VerifyLevel { Fast, Full };

namespace detail {

class Detail {
 public:
  Detail() { out_.imbue(std::locale::classic()); }

  template <class T>
  Detail& operator<<(const T& v) {
    out_ << v;
    return *this;
  }
  Detail& num(double v, int digits = 4) {
    out_.precision(digits);
    out_ << v;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline CheckResult guarded(std::string name, const std::function<CheckResult()>& body) {
  try {
    CheckResult r = body();
    r.name = std::move(name);
    return r;
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("exception: ") + e.what()};
  }
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline std::string hurst_tag(double h) {
  Detail d;
  d << "H=" << h;
  return d.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kernel and fBm
// ---------------------------------------------------------------------------

/// H = 1/2: every weight is 1 and the synthesized path is the cumulative sum of dV.
inline CheckResult check_kernel_degeneracy(std::size_t n = 64) {
  return detail::guarded("kernel degeneracy at H=0.5", [&] {
    const TimeGrid grid(1.0, n);
    const KernelWeights w = kernel_weights(HurstParam(0.5), grid);
    double max_w = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      for (double c : w.row(j)) max_w = std::max(max_w, std::abs(c - 1.0));
    }
    NormalStream ns(7, 0, Stream::V);
    std::vector<double> dv(n);
    for (auto& x : dv) x = std::sqrt(grid.dt()) * ns.normal();
    const auto path = fbm_from_increments(w, dv);
    double cum = 0.0, max_p = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      cum += dv[j - 1];
      max_p = std::max(max_p, std::abs(path[j] - cum));
    }
    detail::Detail d;
    d << "max |c-1| = ";
    d.num(max_w, 3) << ", max |W - cumsum| = ";
    d.num(max_p, 3);
    return CheckResult{{}, max_w <= 1e-12 && max_p <= 1e-15, d.str()};
  });
}

/// Trivial Gauss hypergeometric identities: x = 0, a = 0 and the a = -1 polynomial.
inline CheckResult check_hypergeometric_identities() {
  return detail::guarded("2F1 identities", [] {
    double worst = 0.0;
    worst = std::max(worst, std::abs(gauss_2f1(0.2, 0.3, 1.2, 0.0) - 1.0));
    for (double x : {-50.0, -2.0, -0.3, 0.4, 0.9}) worst = std::max(worst, std::abs(gauss_2f1(0.0, 0.7, 1.3, x) - 1.0));
    for (double x : {-7.0, -2.0, -0.5, 0.5}) {
      const double want = 1.0 + (-1.0 * 0.3 / 1.2) * x;
      worst = std::max(worst, detail::rel_err(gauss_2f1(-1.0, 0.3, 1.2, x), want));
    }
    detail::Detail d;
    d << "max deviation ";
    d.num(worst, 3);
    return CheckResult{{}, worst <= 1e-12, d.str()};
  });
}

/// Implied covariance sum_i c[j][i] c[k][i] dt against the exact fBm covariance:
/// late indices (j,k >= N/4) within late_tol, the rest within early_tol.
inline CheckResult check_covariance(double h, std::size_t n, double late_tol = 0.02, double early_tol = 0.05) {
  return detail::guarded("covariance " + detail::hurst_tag(h) + " N=" + std::to_string(n), [&] {
    const HurstParam hp(h);
    const TimeGrid grid(1.0, n);
    const KernelWeights w = kernel_weights(hp, grid);
    double late = 0.0, early = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const auto rj = w.row(j);
      for (std::size_t k = 1; k <= j; ++k) {
        const auto rk = w.row(k);
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += rj[i] * rk[i];
        const double err = detail::rel_err(acc * grid.dt(), fbm_covariance(hp, grid.point(j), grid.point(k)));
        if (j >= n / 4 && k >= n / 4) {
          late = std::max(late, err);
        } else {
          early = std::max(early, err);
        }
      }
    }
    detail::Detail d;
    d << "late ";
    d.num(late, 3) << " (tol " << late_tol << "), early ";
    d.num(early, 3) << " (tol " << early_tol << ")";
    return CheckResult{{}, late <= late_tol && early <= early_tol, d.str()};
  });
}

/// L L^T of the Cholesky oracle against the covariance matrix, entrywise.
inline CheckResult check_cholesky(double h, std::size_t n, double tol = 1e-10) {
  return detail::guarded("Cholesky reconstruction " + detail::hurst_tag(h) + " N=" + std::to_string(n), [&] {
    const HurstParam hp(h);
    const TimeGrid grid(1.0, n);
    const CholeskyFbm chol(hp, grid);
    const Eigen::MatrixXd rebuilt = chol.factor() * chol.factor().transpose();
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        worst = std::max(worst, std::abs(rebuilt(a, b) - fbm_covariance(hp, grid.point(a + 1), grid.point(b + 1))));
      }
    }
    detail::Detail d;
    d << "max |LL^T - C| = ";
    d.num(worst, 3);
    return CheckResult{{}, worst <= tol, d.str()};
  });
}

/// Bumping dV[i] leaves W[j] for j < i unchanged; synthesis is linear.
inline CheckResult check_causality_linearity(double h, std::size_t n = 48) {
  return detail::guarded("causality and linearity " + detail::hurst_tag(h), [&] {
    const TimeGrid grid(1.0, n);
    const KernelWeights w = kernel_weights(HurstParam(h), grid);
    NormalStream s1(11, 0, Stream::V), s2(11, 1, Stream::V);
    std::vector<double> a(n), b(n), mix(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = s1.normal();
      b[i] = s2.normal();
      mix[i] = 2.0 * a[i] - 0.5 * b[i];
    }
    const auto wa = fbm_from_increments(w, a);
    const auto wb = fbm_from_increments(w, b);
    const auto wm = fbm_from_increments(w, mix);
    double lin = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      lin = std::max(lin, std::abs(wm[j] - (2.0 * wa[j] - 0.5 * wb[j])) / (1.0 + std::abs(wm[j])));
    }
    bool causal = true;
    for (std::size_t i = 1; i <= n; i += 7) {
      auto bumped = a;
      bumped[i - 1] += 1.0;
      const auto wbmp = fbm_from_increments(w, bumped);
      for (std::size_t j = 0; j < i; ++j) causal = causal && wbmp[j] == wa[j];
    }
    detail::Detail d;
    d << "linearity residual ";
    d.num(lin, 3) << (causal ? ", causal" : ", NOT causal");
    return CheckResult{{}, causal && lin <= 1e-12, d.str()};
  });
}

/// Sample variance of W_T over Volterra paths within z_max standard errors of T^{2H}.
inline CheckResult check_terminal_variance(double h, std::size_t n, std::size_t paths, std::uint64_t seed = 0,
                                           double z_max = 3.0) {
  return detail::guarded("terminal variance " + detail::hurst_tag(h) + " N=" + std::to_string(n), [&] {
    const TimeGrid grid(1.0, n);
    const KernelWeights w = kernel_weights(HurstParam(h), grid);
    const auto last = w.row(n);
    CompensatedSum sum, sq;
    for (std::size_t p = 0; p < paths; ++p) {
      NormalStream ns(seed, p, Stream::V);
      const double sdt = std::sqrt(grid.dt());
      double wt = 0.0;
      for (std::size_t i = 0; i < n; ++i) wt += last[i] * sdt * ns.normal();
      sum.add(wt);
      sq.add(wt * wt);
    }
    const double m = static_cast<double>(paths);
    const double mean = sum.value() / m;
    const double var = (sq.value() - m * mean * mean) / (m - 1.0);
    const double target = 1.0;  // T^{2H} at T = 1
    const double se = target * std::sqrt(2.0 / (m - 1.0));
    const double z = (var - target) / se;
    detail::Detail d;
    d << "var ";
    d.num(var, 5) << " vs 1, z = ";
    d.num(z, 3);
    return CheckResult{{}, std::abs(z) <= z_max, d.str()};
  });
}

// ---------------------------------------------------------------------------
// Malliavin derivatives against finite differences
// ---------------------------------------------------------------------------

struct FdSetup {
  double hurst = 0.7;
  std::size_t n_steps = 200;
  std::size_t pairs = 10;
  double delta = 1e-4;
  double nu = 0.4;
  std::uint64_t seed = 2024;
};

namespace detail {

struct FdProbe {
  PathBundle bundle;
  ZPath zpath;
  std::size_t u;
  std::size_t t;
};

// Draws (bundle, u, t) with the path alive through t, both on the base and on
// a bumped path.
inline std::vector<FdProbe> fd_probes(const FdSetup& s, const RegularizedZConfig& cfg, const KernelWeights& w,
                                      double rho) {
  std::mt19937_64 rng(s.seed);
  std::vector<FdProbe> out;
  for (std::uint64_t path = 0; out.size() < s.pairs && path < 100 * s.pairs; ++path) {
    PathBundle b = correlated_bundle(w.grid(), rho, w, s.seed, path);
    ZPath z = simulate_z(cfg, b);
    std::uniform_int_distribution<std::size_t> pick_u(1, s.n_steps);
    const std::size_t u = pick_u(rng);
    std::uniform_int_distribution<std::size_t> pick_t(u, s.n_steps);
    const std::size_t t = pick_t(rng);
    if (!z.alive_through(t)) continue;
    PathBundle moved = b;
    moved.dv[u - 1] += s.delta;
    moved.resynthesize(w);
    if (!simulate_z(cfg, moved).alive_through(t)) continue;
    out.push_back({std::move(b), std::move(z), u, t});
  }
  if (out.size() < s.pairs) throw convergence_error("could not find enough surviving probe paths");
  return out;
}

inline RegularizedZConfig fd_z_config(const FdSetup& s) {
  return RegularizedZConfig{DriftSpec::standard_fcir(0.1, 0.6), auto_epsilon(HurstParam(s.hurst)), s.nu, 1.0, true};
}

}  // namespace detail

/// dW_z within tol_w and dV_z within tol_v of forward differences on random (u,t) pairs.
inline std::vector<CheckResult> check_malliavin_fd(const FdSetup& s, double tol_w = 0.01, double tol_v = 0.02) {
  const std::string tag = detail::hurst_tag(s.hurst);
  double worst_w = 0.0, worst_v = 0.0;
  std::string failure;
  try {
    const TimeGrid grid(1.0, s.n_steps);
    const KernelWeights w = kernel_weights(HurstParam(s.hurst), grid);
    const RegularizedZConfig cfg = detail::fd_z_config(s);
    const MalliavinCoefficient mc(cfg.drift, cfg.epsilon);
    for (const auto& p : detail::fd_probes(s, cfg, w, 0.5)) {
      const double aw = dW_z(p.u, p.t, p.zpath, mc, cfg.nu, grid);
      const double fw = fd_dW_z(cfg, p.bundle, p.u, p.t, s.delta);
      worst_w = std::max(worst_w, detail::rel_err(aw, fw));
      const double av = dV_z(p.u, p.t, p.zpath, mc, cfg.nu, w);
      const double fv = fd_dV_z(cfg, p.bundle, w, p.u, p.t, s.delta);
      worst_v = std::max(worst_v, detail::rel_err(av, fv));
    }
  } catch (const std::exception& e) {
    failure = std::string("exception: ") + e.what();
  }
  auto make = [&](const std::string& name, double worst, double tol) {
    if (!failure.empty()) return CheckResult{name, false, failure};
    detail::Detail d;
    d << "max rel err ";
    d.num(worst, 3) << " over " << s.pairs << " pairs (tol " << tol << ")";
    return CheckResult{name, worst <= tol, d.str()};
  };
  return {make("dW_z vs finite difference " + tag, worst_w, tol_w),
          make("dV_z vs finite difference " + tag, worst_v, tol_v)};
}

/// dVtilde_x against a forward difference of the log-price under a dV~ bump.
inline CheckResult check_dvtilde_fd(const FdSetup& s, double tol = 0.01) {
  return detail::guarded("dVtilde_x vs finite difference " + detail::hurst_tag(s.hurst), [&] {
    const TimeGrid grid(1.0, s.n_steps);
    const KernelWeights w = kernel_weights(HurstParam(s.hurst), grid);
    const RegularizedZConfig cfg = detail::fd_z_config(s);
    const VolFunction vol = VolFunction::sqrt_shift(0.1);
    const double rho = 0.5;
    double worst = 0.0;
    for (const auto& p : detail::fd_probes(s, cfg, w, rho)) {
      const double a = dVtilde_x(p.u, rho, vol, p.zpath);
      const double f = fd_dVtilde_x(cfg, p.bundle, w, vol, 1.0, 0.2, p.u, p.t, s.delta);
      worst = std::max(worst, detail::rel_err(a, f));
    }
    detail::Detail d;
    d << "max rel err ";
    d.num(worst, 3) << " (tol " << tol << ")";
    return CheckResult{{}, worst <= tol, d.str()};
  });
}

/// sigma(y_{u-1}) + dB_x against a forward difference when B drives the fBm.
inline CheckResult check_db_fd(const FdSetup& s, double tol = 0.02) {
  return detail::guarded("dB_x vs finite difference " + detail::hurst_tag(s.hurst), [&] {
    const TimeGrid grid(1.0, s.n_steps);
    const KernelWeights w = kernel_weights(HurstParam(s.hurst), grid);
    const RegularizedZConfig cfg = detail::fd_z_config(s);
    const MalliavinCoefficient mc(cfg.drift, cfg.epsilon);
    const VolFunction vol = VolFunction::sqrt_shift(0.1);
    double worst = 0.0;
    for (const auto& p : detail::fd_probes(s, cfg, w, 1.0)) {
      const double a = dB_x_total(p.u, p.t, p.zpath, p.bundle, mc, cfg.nu, w, vol);
      const double f = fd_dB_x(cfg, p.bundle, w, vol, 1.0, 0.2, p.u, p.t, s.delta);
      worst = std::max(worst, detail::rel_err(a, f));
    }
    detail::Detail d;
    d << "max rel err ";
    d.num(worst, 3) << " (tol " << tol << ")";
    return CheckResult{{}, worst <= tol, d.str()};
  });
}

// ---------------------------------------------------------------------------
// Pricing
// ---------------------------------------------------------------------------

/// Central difference of payoff_L against payoff_h away from the strike, and L(K) = 0.
inline CheckResult check_payoff_calculus(double strike = 1.0) {
  return detail::guarded("payoff antiderivative", [&] {
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; used < 100; ++i) {
      const double x = 0.5 + 0.01 * static_cast<double>(i) + 0.0037;
      if (std::abs(x - strike) < 1e-3) continue;
      ++used;
      const double step = 1e-6;
      const double num = (payoff_L(x + step, strike) - payoff_L(x - step, strike)) / (2.0 * step);
      const double want = payoff_h(x, strike);
      worst = std::max(worst, want == 0.0 ? std::abs(num) : detail::rel_err(num, want));
    }
    const bool at_strike = payoff_L(strike, strike) == 0.0;
    detail::Detail d;
    d << "max rel err ";
    d.num(worst, 3) << (at_strike ? ", L(K) = 0" : ", L(K) != 0");
    return CheckResult{{}, worst <= 1e-6 && at_strike, d.str()};
  });
}

/// With sigma = 0 the price path compounds deterministically.
inline CheckResult check_deterministic_compounding() {
  return detail::guarded("sigma = 0 compounding", [] {
    PricingConfig cfg;
    cfg.grid = TimeGrid(1.0, 100);
    cfg.vol = VolFunction::constant(0.0);
    cfg.n_sims = 5;
    cfg.n_trials = 2;
    const MCEstimate e = estimate_direct(cfg);
    const double st = cfg.s0 * std::pow(1.0 + cfg.eta * cfg.grid.dt(), 100.0);
    const double want = std::exp(-cfg.rate) * payoff_h(st, cfg.strike);
    detail::Detail d;
    d << "price ";
    d.num(e.mean, 10) << " vs ";
    d.num(want, 10);
    return CheckResult{{}, detail::rel_err(e.mean, want) <= 1e-12, d.str()};
  });
}

/// Philox4x32-10 known-answer vectors.
inline CheckResult check_philox() {
  return detail::guarded("Philox4x32-10 known answers", [] {
    using P = Philox4x32;
    const bool ok = P::block({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u} &&
                    P::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
                        P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu} &&
                    P::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
                        P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};
    return CheckResult{{}, ok, ok ? "3/3 vectors" : "mismatch"};
  });
}

/// Constant volatility, nu = 0, rho = 0: both estimators within z_max SE of the lognormal price.
inline CheckResult check_constant_vol_oracle(std::size_t sims = 500, std::size_t trials = 100,
                                             std::size_t steps = 500, double z_max = 3.0) {
  return detail::guarded("constant-vol closed form", [&] {
    PricingConfig cfg;
    cfg.grid = TimeGrid(1.0, steps);
    cfg.hurst = HurstParam(0.5);
    cfg.z = RegularizedZConfig{DriftSpec::standard_fcir(0.1, 0.6), 0.01, 0.0, 1.0, true};
    cfg.vol = VolFunction::constant(0.2);
    cfg.eta = 0.2;
    cfg.rate = 0.2;
    cfg.rho = 0.0;
    cfg.n_sims = sims;
    cfg.n_trials = trials;
    const PricingResult r = run_trials(cfg, Estimator::Both);
    const double bs = black_scholes_oracle(1.0, 1.0, 0.2, 0.2, 1.0);
    const double zd = (r.direct->mean - bs) / r.direct->std_err;
    const double zm = (r.malliavin->mean - bs) / r.malliavin->std_err;
    const bool no_excl = r.direct->n_excluded == 0;
    detail::Detail d;
    d << "oracle ";
    d.num(bs, 6) << ", direct ";
    d.num(r.direct->mean, 6) << " (z ";
    d.num(zd, 3) << "), malliavin ";
    d.num(r.malliavin->mean, 6) << " (z ";
    d.num(zm, 3) << "), excluded " << r.direct->n_excluded;
    return CheckResult{{}, std::abs(zd) <= z_max && std::abs(zm) <= z_max && no_excl, d.str()};
  });
}

/// Direct and Malliavin means on common paths within z_max combined standard errors.
inline CheckResult check_estimator_agreement(double h, std::size_t sims = 500, std::size_t steps = 500,
                                             std::size_t trials = 100, unsigned threads = 1, double z_max = 3.0) {
  return detail::guarded("estimator agreement " + detail::hurst_tag(h), [&] {
    RunConfig rc = table_preset(1).base;
    rc.hurst = h;
    rc.sims = sims;
    rc.steps = steps;
    rc.trials = trials;
    rc.threads = threads;
    rc.set_vol(VolFunction::sqrt_shift(0.1));
    const PricingResult r = run_trials(rc.pricing(), Estimator::Both);
    const double se = std::hypot(r.direct->std_err, r.malliavin->std_err);
    const double gap = std::abs(r.direct->mean - r.malliavin->mean);
    detail::Detail d;
    d << "direct ";
    d.num(r.direct->mean, 6) << ", malliavin ";
    d.num(r.malliavin->mean, 6) << ", gap/SE ";
    d.num(gap / se, 3);
    return CheckResult{{}, gap <= z_max * se, d.str()};
  });
}

/// Direct-estimator mean of a table cell within tol of the published value.
inline CheckResult check_table_cell(int table, std::size_t row, double h, double tol = 0.08, unsigned threads = 1) {
  detail::Detail name;
  name << "table " << table << " row " << row << " " << detail::hurst_tag(h);
  return detail::guarded(name.str(), [&] {
    const TablePreset t = table_preset(table);
    const auto it = std::find(t.hursts.begin(), t.hursts.end(), h);
    if (it == t.hursts.end()) throw validation_error("H is not a table column");
    const double ref = t.reference.at(row)[static_cast<std::size_t>(it - t.hursts.begin())].mean;
    RunConfig rc = t.base;
    rc.hurst = h;
    rc.threads = threads;
    rc.set_vol(t.rows.at(row));
    const MCEstimate e = estimate_direct(rc.pricing());
    detail::Detail d;
    d << "mean ";
    d.num(e.mean, 6) << " vs reference ";
    d.num(ref, 6) << " (tol " << tol << "), cv ";
    d.num(e.cv, 3);
    return CheckResult{{}, std::abs(e.mean - ref) <= tol, d.str()};
  });
}

// ---------------------------------------------------------------------------
// Volatility driver
// ---------------------------------------------------------------------------

/// Fraction of paths of the time-varying driver that hit zero before T.
inline CheckResult check_positivity(std::size_t paths = 10000, std::size_t steps = 500, double max_rate = 0.001) {
  return detail::guarded("positivity H=0.7 eps=0", [&] {
    const TimeGrid grid(1.0, steps);
    const KernelWeights w = kernel_weights(HurstParam(0.7), grid);
    const RegularizedZConfig cfg{DriftSpec::time_varying(0.4, 1.0, 0.02), 0.0, 0.4, 1.0, true};
    std::size_t hits = 0;
    for (std::size_t p = 0; p < paths; ++p) {
      if (simulate_z(cfg, correlated_bundle(grid, 0.5, w, 99, p)).tau_index) ++hits;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(paths);
    detail::Detail d;
    d << hits << " of " << paths << " paths hit zero";
    return CheckResult{{}, rate <= max_rate, d.str()};
  });
}

/// sup-norm gaps between successive eps in {0.1, 0.05, 0.025} are nonincreasing on enough bundles.
inline CheckResult check_eps_convergence(std::size_t bundles = 100, std::size_t steps = 500, double min_share = 0.9) {
  return detail::guarded("eps convergence H=0.7", [&] {
    const TimeGrid grid(1.0, steps);
    const KernelWeights w = kernel_weights(HurstParam(0.7), grid);
    auto run = [&](const PathBundle& b, double eps) {
      return simulate_z(RegularizedZConfig{DriftSpec::standard_fcir(0.1, 0.6), eps, 0.4, 1.0, true}, b).z;
    };
    auto sup_gap = [](const std::vector<double>& a, const std::vector<double>& b) {
      double m = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    };
    std::size_t good = 0;
    for (std::size_t p = 0; p < bundles; ++p) {
      const PathBundle b = correlated_bundle(grid, 0.5, w, 5, p);
      const auto z1 = run(b, 0.1), z2 = run(b, 0.05), z3 = run(b, 0.025);
      if (sup_gap(z2, z3) <= sup_gap(z1, z2)) ++good;
    }
    const double share = static_cast<double>(good) / static_cast<double>(bundles);
    detail::Detail d;
    d << good << " of " << bundles << " bundles nonincreasing";
    return CheckResult{{}, share >= min_share, d.str()};
  });
}

/// Lambda_eps decreases in eps for z in (0, 1].
inline CheckResult check_lambda_monotone() {
  return detail::guarded("Lambda_eps monotone in eps", [] {
    bool ok = true;
    for (double z = 0.001; z <= 1.0; z += 0.0173) {
      ok = ok && lambda_eps(z, 0.1) < lambda_eps(z, 0.05) && lambda_eps(z, 0.05) < lambda_eps(z, 0.0);
    }
    return CheckResult{{}, ok, ok ? "strict on the sampled points" : "violated"};
  });
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_verify(VerifyLevel level, unsigned threads = 1) {
  std::vector<CheckResult> out;
  out.push_back(check_kernel_degeneracy());
  out.push_back(check_hypergeometric_identities());
  out.push_back(check_philox());
  for (double h : {0.1, 0.3, 0.7, 0.9}) {
    for (std::size_t n : {16u, 32u}) out.push_back(check_covariance(h, n));
    out.push_back(check_cholesky(h, 32));
    out.push_back(check_causality_linearity(h));
  }
  for (double h : {0.3, 0.7}) {
    FdSetup s;
    s.hurst = h;
    for (auto& r : check_malliavin_fd(s)) out.push_back(std::move(r));
    out.push_back(check_dvtilde_fd(s));
    out.push_back(check_db_fd(s));
  }
  out.push_back(check_lambda_monotone());
  out.push_back(check_payoff_calculus());
  out.push_back(check_deterministic_compounding());
  if (level == VerifyLevel::Fast) return out;

  for (double h : {0.3, 0.7}) out.push_back(check_terminal_variance(h, 256, 10000));
  out.push_back(check_positivity());
  out.push_back(check_eps_convergence());
  out.push_back(check_constant_vol_oracle());
  for (double h : {0.3, 0.5, 0.7}) out.push_back(check_estimator_agreement(h, 500, 500, 100, threads));
  out.push_back(check_table_cell(1, 0, 0.5, 0.08, threads));
  out.push_back(check_table_cell(3, 0, 0.5, 0.08, threads));
  return out;
}

}  // namespace fracvol
