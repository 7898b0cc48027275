#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "fracvol/core.hpp"
#include "fracvol/dynamics.hpp"
#include "fracvol/fbm.hpp"

namespace fracvol {

/// European call plus binary with a common strike: (x-K)^+ + 1{x>K}.
inline double payoff_h(double x, double strike) { return std::max(x - strike, 0.0) + (x > strike ? 1.0 : 0.0); }

/// Antiderivative of payoff_h vanishing below the strike: (x-K)(x-K+2)/2 for x >= K.
inline double payoff_L(double x, double strike) {
  if (x < strike) return 0.0;
  const double m = x - strike;
  return 0.5 * m * (m + 2.0);
}

struct PayoffSpec {
  double strike;

  explicit PayoffSpec(double k) : strike(k) {
    if (!(k > 0.0)) throw validation_error("strike must be positive");
  }
  double h(double x) const { return payoff_h(x, strike); }
  double L(double x) const { return payoff_L(x, strike); }
};

/// Discretized weight (1/(T sqrt(1-rho^2))) sum_k dvt[k] / sigma(y[k]).
inline double malliavin_weight(const ZPath& zpath, const VolFunction& vol, const PathBundle& bundle, double rho) {
  if (!(std::abs(rho) < 1.0)) throw domain_error("Malliavin weight requires |rho| < 1");
  const std::size_t n = bundle.grid.n_steps();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double sig = vol(zpath.y[k]);
    if (!(sig > 0.0)) throw domain_error("Malliavin weight requires sigma(y) > 0 along the path");
    acc += bundle.dvt[k] / sig;
  }
  return acc / (bundle.grid.t_end() * std::sqrt(1.0 - rho * rho));
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Lognormal closed form for the call-plus-binary payoff:
///   s0 N(d1) - K e^{-rT} N(d2) + e^{-rT} N(d2).
inline double black_scholes_oracle(double s0, double strike, double r, double sigma, double t) {
  if (!(s0 > 0.0) || !(strike > 0.0) || !(sigma > 0.0) || !(t > 0.0) || !(r >= 0.0)) {
    throw domain_error("black_scholes_oracle: s0, K, sigma, T must be positive and r nonnegative");
  }
  const double sd = sigma * std::sqrt(t);
  const double d1 = (std::log(s0 / strike) + (r + 0.5 * sigma * sigma) * t) / sd;
  const double d2 = d1 - sd;
  const double disc = std::exp(-r * t);
  return s0 * standard_normal_cdf(d1) - strike * disc * standard_normal_cdf(d2) + disc * standard_normal_cdf(d2);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimators
// ---------------------------------------------------------------------------

enum class Estimator { Direct, Malliavin, Both };

struct PricingConfig {
  TimeGrid grid{1.0, 500};
  HurstParam hurst{0.5};
  RegularizedZConfig z{DriftSpec::standard_fcir(0.1, 0.6), 0.01, 2.0, 1.0, true};
  VolFunction vol = VolFunction::sqrt_shift(0.1);
  double eta = 0.2;
  double rate = 0.2;
  double rho = 0.5;
  double s0 = 1.0;
  double strike = 1.0;
  std::size_t n_sims = 500;
  std::size_t n_trials = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate(Estimator which) const {
    z.validate();
    if (!(rho >= -1.0 && rho <= 1.0)) throw validation_error("rho must lie in [-1, 1]");
    if (!(s0 > 0.0)) throw validation_error("spot must be positive");
    if (!(strike > 0.0)) throw validation_error("strike must be positive");
    if (n_sims < 1) throw validation_error("need at least one simulation per trial");
    if (n_trials < 2) throw validation_error("need at least two trials for the dispersion estimate");
    if (which != Estimator::Direct) {
      if (!(std::abs(rho) < 1.0)) throw validation_error("Malliavin estimator requires |rho| < 1");
      if (!vol.strictly_positive()) {
        throw validation_error("Malliavin estimator requires sigma(y) > 0; the weight is undefined without noise");
      }
    }
  }
};

struct PathOutcome {
  double terminal_price = 0.0;
  double weight = 0.0;  ///< Malliavin weight, 0 when not requested
  bool excluded = false;
};

inline PathOutcome simulate_path_outcome(const PricingConfig& cfg, const KernelWeights& weights,
                                         std::uint64_t path_index, bool with_weight) {
  const PathBundle bundle = correlated_bundle(cfg.grid, cfg.rho, weights, cfg.seed, path_index);
  const ZPath zpath = simulate_z(cfg.z, bundle);
  PathOutcome out;
  const auto st = terminal_price(cfg.s0, cfg.eta, cfg.vol, zpath, bundle);
  if (!st) {
    out.excluded = true;
    return out;
  }
  out.terminal_price = *st;
  if (with_weight) out.weight = malliavin_weight(zpath, cfg.vol, bundle, cfg.rho);
  return out;
}

struct MCEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  double cv = 0.0;
  std::size_t n_sims = 0;
  std::size_t n_trials = 0;
  std::size_t n_excluded = 0;
  std::uint64_t seed = 0;
  bool flagged = false;  ///< exclusion rate reached 0.5%
  std::vector<double> trial_means;
};

/// Grand mean, trial standard deviation / sqrt(trials) and CV = trial std / mean.
inline MCEstimate summarize_trials(std::vector<double> trial_means, std::size_t n_sims, std::size_t n_excluded,
                                   std::uint64_t seed) {
  MCEstimate e;
  e.n_sims = n_sims;
  e.n_trials = trial_means.size();
  e.n_excluded = n_excluded;
  e.seed = seed;
  CompensatedSum sum;
  for (double m : trial_means) sum.add(m);
  const double n = static_cast<double>(trial_means.size());
  e.mean = sum.value() / n;
  CompensatedSum sq;
  for (double m : trial_means) sq.add((m - e.mean) * (m - e.mean));
  const double sd = trial_means.size() > 1 ? std::sqrt(sq.value() / (n - 1.0)) : 0.0;
  e.std_err = sd / std::sqrt(n);
  e.cv = sd / e.mean;
  e.flagged = static_cast<double>(n_excluded) >= 0.005 * static_cast<double>(n_sims) * n;
  e.trial_means = std::move(trial_means);
  return e;
}

struct PricingResult {
  std::optional<MCEstimate> direct;
  std::optional<MCEstimate> malliavin;
};

/// Runs n_trials trials of n_sims paths; trial k uses path indices
/// [k n_sims, (k+1) n_sims). Both estimators see the same paths. Trials are
/// distributed over threads but each trial is summed in path order, so the
/// result does not depend on the thread count.
inline PricingResult run_trials(const PricingConfig& cfg, Estimator which) {
  cfg.validate(which);
  const KernelWeights weights = kernel_weights(cfg.hurst, cfg.grid);
  const bool want_direct = which != Estimator::Malliavin;
  const bool want_malliavin = which != Estimator::Direct;
  const double discount = std::exp(-cfg.rate * cfg.grid.t_end());

  std::vector<double> direct_means(cfg.n_trials), malliavin_means(cfg.n_trials);
  std::vector<std::size_t> excluded(cfg.n_trials, 0);

  auto run_trial = [&](std::size_t trial) {
    CompensatedSum d, m;
    std::size_t n_ok = 0;
    for (std::size_t i = 0; i < cfg.n_sims; ++i) {
      const auto path = static_cast<std::uint64_t>(trial * cfg.n_sims + i);
      const PathOutcome o = simulate_path_outcome(cfg, weights, path, want_malliavin);
      if (o.excluded) {
        ++excluded[trial];
        continue;
      }
      ++n_ok;
      const double s = o.terminal_price;
      if (want_direct) d.add(discount * payoff_h(s, cfg.strike));
      if (want_malliavin) m.add(discount * payoff_L(s, cfg.strike) / s * (1.0 + o.weight));
    }
    const double denom = static_cast<double>(n_ok);
    direct_means[trial] = d.value() / denom;
    malliavin_means[trial] = m.value() / denom;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.n_trials)));
  if (workers == 1) {
    for (std::size_t k = 0; k < cfg.n_trials; ++k) run_trial(k);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < cfg.n_trials; k += workers) run_trial(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::size_t total_excluded = 0;
  for (auto e : excluded) total_excluded += e;
  PricingResult r;
  if (want_direct) r.direct = summarize_trials(direct_means, cfg.n_sims, total_excluded, cfg.seed);
  if (want_malliavin) r.malliavin = summarize_trials(malliavin_means, cfg.n_sims, total_excluded, cfg.seed);
  return r;
}

inline MCEstimate estimate_direct(const PricingConfig& cfg) { return *run_trials(cfg, Estimator::Direct).direct; }

inline MCEstimate estimate_malliavin(const PricingConfig& cfg) {
  return *run_trials(cfg, Estimator::Malliavin).malliavin;
}

}  // namespace fracvol
