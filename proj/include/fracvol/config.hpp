#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracvol/core.hpp"
#include "fracvol/dynamics.hpp"
#include "fracvol/pricing.hpp"

namespace fracvol {

/// Flat run configuration shared by the CLI subcommands. JSON keys are the
/// snake_case spelling of the command-line flags.
///
/// sigma selects the volatility map; its coefficients are read as
///   sqrt-shift: sqrt(y + sigma_a)
///   affine:     sigma_a * y + sigma_b
///   sqrt-quad:  sqrt(y^2 + sigma_a)
///
/// model selects the drift of Z:
///   ou      -theta z^2 (Z crosses zero freely unless ou_unfrozen is false)
///   fcir    mu - theta z^2
///   fcir-tv nu^2/(2 theta)(1 - e^{-2 theta t}) + c - theta z^2, or, when kappa is set,
///           nu^2/2 (1 - e^{-2 kappa t}) + kappa (c - z^2)
struct RunConfig {
  std::string model = "fcir";
  double hurst = 0.5;
  std::optional<double> epsilon;  // empty = auto
  double nu = 0.4;
  double theta = 0.6;
  double mu = 0.1;
  std::optional<double> kappa;
  double c = 0.02;
  double z0 = 1.0;
  bool ou_unfrozen = true;
  std::string sigma = "sqrt-shift";
  double sigma_a = 0.1;
  double sigma_b = 0.0;
  double eta = 0.2;
  double rate = 0.2;
  double rho = 0.5;
  double spot = 1.0;
  double strike = 1.0;
  double horizon = 1.0;
  std::size_t steps = 500;
  std::size_t sims = 500;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string estimator = "both";
  unsigned threads = 1;

  double resolved_epsilon() const { return epsilon ? *epsilon : auto_epsilon(HurstParam(hurst)); }

  Estimator estimator_kind() const {
    if (estimator == "direct") return Estimator::Direct;
    if (estimator == "malliavin") return Estimator::Malliavin;
    if (estimator == "both") return Estimator::Both;
    throw validation_error("estimator must be direct, malliavin or both, got '" + estimator + "'");
  }

  DriftSpec drift() const {
    if (model == "ou") return DriftSpec::ornstein_uhlenbeck(theta);
    if (model == "fcir") return DriftSpec::standard_fcir(mu, theta);
    if (model == "fcir-tv") {
      return kappa ? DriftSpec::time_varying_kappa_form(nu, *kappa, c) : DriftSpec::time_varying(nu, theta, c);
    }
    throw validation_error("model must be ou, fcir or fcir-tv, got '" + model + "'");
  }

  VolFunction vol() const {
    if (sigma == "sqrt-shift") return VolFunction::sqrt_shift(sigma_a);
    if (sigma == "affine") return VolFunction::affine(sigma_a, sigma_b);
    if (sigma == "sqrt-quad") return VolFunction::sqrt_quad(sigma_a);
    throw validation_error("sigma must be sqrt-shift, affine or sqrt-quad, got '" + sigma + "'");
  }

  void set_vol(const VolFunction& v) {
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SqrtShiftVol>) {
            sigma = "sqrt-shift";
            sigma_a = k.a;
            sigma_b = 0.0;
          } else if constexpr (std::is_same_v<K, AffineVol>) {
            sigma = "affine";
            sigma_a = k.a;
            sigma_b = k.b;
          } else {
            sigma = "sqrt-quad";
            sigma_a = k.c;
            sigma_b = 0.0;
          }
        },
        v.kind());
  }

  /// Throws validation_error on any inconsistent field.
  void validate() const {
    if (!(hurst > 0.0 && hurst < 1.0)) throw validation_error("hurst must lie strictly inside (0,1)");
    if (steps < 1 || sims < 1 || trials < 1) throw validation_error("steps, sims and trials must be >= 1");
    if (threads < 1) throw validation_error("threads must be >= 1");
    if (!(horizon > 0.0)) throw validation_error("horizon must be positive");
    if (!(std::abs(rho) <= 1.0)) throw validation_error("rho must lie in [-1, 1]");
    if (epsilon && !(*epsilon >= 0.0)) throw validation_error("epsilon must be nonnegative");
    (void)drift();
    (void)vol();
    (void)estimator_kind();
    z_config().validate();
  }

  RegularizedZConfig z_config() const {
    return RegularizedZConfig{drift(), resolved_epsilon(), nu, z0, !(model == "ou" && ou_unfrozen)};
  }

  PricingConfig pricing() const {
    validate();
    PricingConfig p;
    p.grid = TimeGrid(horizon, steps);
    p.hurst = HurstParam(hurst);
    p.z = z_config();
    p.vol = vol();
    p.eta = eta;
    p.rate = rate;
    p.rho = rho;
    p.s0 = spot;
    p.strike = strike;
    p.n_sims = sims;
    p.n_trials = trials;
    p.seed = seed;
    p.threads = threads;
    return p;
  }
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"model", c.model},     {"hurst", c.hurst},     {"epsilon", c.resolved_epsilon()},
                     {"nu", c.nu},           {"theta", c.theta},     {"mu", c.mu},
                     {"c", c.c},             {"z0", c.z0},           {"ou_unfrozen", c.ou_unfrozen},
                     {"sigma", c.sigma},     {"sigma_a", c.sigma_a}, {"sigma_b", c.sigma_b},
                     {"eta", c.eta},         {"rate", c.rate},       {"rho", c.rho},
                     {"spot", c.spot},       {"strike", c.strike},   {"horizon", c.horizon},
                     {"steps", c.steps},     {"sims", c.sims},       {"trials", c.trials},
                     {"seed", c.seed},       {"estimator", c.estimator}};
  j["kappa"] = c.kappa ? nlohmann::json(*c.kappa) : nlohmann::json(nullptr);
}

/// Overlays the keys present in j onto c. Unknown keys are rejected.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw validation_error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model") c.model = value.get<std::string>();
      else if (key == "hurst") c.hurst = value.get<double>();
      else if (key == "epsilon") {
        if (value.is_string() && value.get<std::string>() == "auto") c.epsilon.reset();
        else c.epsilon = value.get<double>();
      } else if (key == "nu") c.nu = value.get<double>();
      else if (key == "theta") c.theta = value.get<double>();
      else if (key == "mu") c.mu = value.get<double>();
      else if (key == "kappa") {
        if (value.is_null()) c.kappa.reset();
        else c.kappa = value.get<double>();
      } else if (key == "c") c.c = value.get<double>();
      else if (key == "z0") c.z0 = value.get<double>();
      else if (key == "ou_unfrozen") c.ou_unfrozen = value.get<bool>();
      else if (key == "sigma") c.sigma = value.get<std::string>();
      else if (key == "sigma_a") c.sigma_a = value.get<double>();
      else if (key == "sigma_b") c.sigma_b = value.get<double>();
      else if (key == "eta") c.eta = value.get<double>();
      else if (key == "rate") c.rate = value.get<double>();
      else if (key == "rho") c.rho = value.get<double>();
      else if (key == "spot") c.spot = value.get<double>();
      else if (key == "strike") c.strike = value.get<double>();
      else if (key == "horizon") c.horizon = value.get<double>();
      else if (key == "steps") c.steps = value.get<std::size_t>();
      else if (key == "sims") c.sims = value.get<std::size_t>();
      else if (key == "trials") c.trials = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "estimator") c.estimator = value.get<std::string>();
      else if (key == "threads") c.threads = value.get<unsigned>();
      else throw validation_error("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw validation_error("config key '" + key + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Sample-path figures: N = 1000, rho = 0.6, eta = r = 0.05, nu = 0.1,
/// sigma(y) = 0.8 y + 0.1, kappa = 1, c = 2, S0 = 100, ten paths.
inline RunConfig figure_preset(const std::string& id) {
  RunConfig c;
  c.model = "fcir-tv";
  c.kappa = 1.0;
  c.c = 2.0;
  c.nu = 0.1;
  c.z0 = 1.0;
  c.sigma = "affine";
  c.sigma_a = 0.8;
  c.sigma_b = 0.1;
  c.eta = 0.05;
  c.rate = 0.05;
  c.rho = 0.6;
  c.spot = 100.0;
  c.horizon = 1.0;
  c.steps = 1000;
  c.sims = 10;
  if (id == "2.1") {
    c.hurst = 0.15;
    c.epsilon = 0.01;
  } else if (id == "2.2") {
    c.hurst = 0.5;
    c.epsilon = 0.01;
  } else if (id == "2.3") {
    c.hurst = 0.65;
    c.epsilon = 0.0;
  } else if (id == "2.4") {
    c.hurst = 0.9;
    c.epsilon = 0.0;
  } else {
    throw validation_error("unknown figure preset '" + id + "' (expected 2.1, 2.2, 2.3 or 2.4)");
  }
  return c;
}

struct TableReference {
  double mean;
  double cv;
};

struct TablePreset {
  int id = 1;
  RunConfig base;
  std::array<double, 5> hursts{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<VolFunction> rows;
  /// reference[row][hurst index]
  std::vector<std::array<TableReference, 5>> reference;
};

/// Option-price tables. 1/2: mu - theta z^2 (direct / Malliavin); 3/4: the
/// time-varying drift with z0 = 1, nu = 0.4, c = 0.02, theta = 1. All use
/// eta = r = 0.2, rho = 0.5, T = 1, 500 steps x 500 sims x 100 trials and
/// S0 = K = 1 with auto epsilon.
inline TablePreset table_preset(int id) {
  TablePreset t;
  t.id = id;
  RunConfig& c = t.base;
  c.eta = 0.2;
  c.rate = 0.2;
  c.rho = 0.5;
  c.horizon = 1.0;
  c.steps = 500;
  c.sims = 500;
  c.trials = 100;
  c.spot = 1.0;
  c.strike = 1.0;
  c.z0 = 1.0;
  c.nu = 0.4;
  if (id == 1 || id == 2) {
    c.model = "fcir";
    c.mu = 0.1;
    c.theta = 0.6;
  } else if (id == 3 || id == 4) {
    c.model = "fcir-tv";
    c.theta = 1.0;
    c.c = 0.02;
  } else {
    throw validation_error("table must be 1, 2, 3 or 4");
  }
  c.estimator = (id % 2 == 1) ? "direct" : "malliavin";
  t.rows = {VolFunction::sqrt_shift(0.1), VolFunction::affine(1.0, 0.1), VolFunction::sqrt_quad(1.0)};

  using Row = std::array<TableReference, 5>;
  switch (id) {
    case 1:
      t.reference = {
          Row{{{0.774185342, 0.062159457}, {0.782211975, 0.015363114}, {0.775305642, 0.053605636},
               {0.765667823, 0.022561751}, {0.776062568, 0.061121985}}},
          Row{{{0.932824188, 0.023154477}, {0.959352477, 0.019764205}, {0.946670803, 0.008803027},
               {0.952432308, 0.016014640}, {0.948353316, 0.008871172}}},
          Row{{{0.707885444, 0.093317545}, {0.715438258, 0.077237936}, {0.695277007, 0.053520175},
               {0.720631067, 0.041407711}, {0.729078909, 0.085659766}}}};
      break;
    case 2:
      t.reference = {
          Row{{{0.79340973, 0.07560649}, {0.81121348, 0.04028921}, {0.78827183, 0.11421244},
               {0.76642501, 0.08935762}, {0.7704734, 0.13411309}}},
          Row{{{0.99910672, 0.09628926}, {0.95410606, 0.16524115}, {0.97622451, 0.06896021},
               {0.97074148, 0.10076119}, {1.013755924, 0.10492516}}},
          Row{{{0.67871381, 0.08759139}, {0.69286223, 0.09071164}, {0.66834204, 0.10850252},
               {0.69416225, 0.09554705}, {0.707316469, 0.07008638}}}};
      break;
    case 3:
      t.reference = {
          Row{{{0.757738549, 0.048177774}, {0.769114549, 0.057692257}, {0.756162793, 0.045562288},
               {0.756665572, 0.051234111}, {0.763148888, 0.043265712}}},
          Row{{{0.932035897, 0.012595508}, {0.934337494, 0.022642941}, {0.933212125, 0.024487},
               {0.928706032, 0.014969569}, {0.929103212, 0.01457107}}},
          Row{{{0.770104152, 0.088196662}, {0.782432528, 0.062946479}, {0.75433847, 0.069371091},
               {0.746931996, 0.072156192}, {0.75975843, 0.084981952}}}};
      break;
    default:
      t.reference = {
          Row{{{0.769174923, 0.159481951}, {0.79459017, 0.136648616}, {0.781942914, 0.157116756},
               {0.747618003, 0.12525256}, {0.755713234, 0.06592363}}},
          Row{{{0.94650013, 0.102404072}, {1.02769617, 0.128530355}, {0.919334248, 0.111971197},
               {0.983793301, 0.095406694}, {0.88152163, 0.101523439}}},
          Row{{{0.803170587, 0.273211512}, {0.793796973, 0.205160841}, {0.756164588, 0.210899491},
               {0.742696383, 0.203031148}, {0.759959966, 0.198280955}}}};
      break;
  }
  return t;
}

}  // namespace fracvol
