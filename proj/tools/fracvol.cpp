#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>

#include "fracvol/fracvol.hpp"

using namespace fracvol;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Every flag is optional so that only explicitly given values override the
// lower-precedence sources.
struct Flags {
  std::optional<std::string> model, epsilon, sigma, estimator, figure, config, out;
  std::optional<double> hurst, nu, theta, mu, kappa, c, z0, sigma_a, sigma_b, eta, rate, rho, spot, strike, horizon;
  std::optional<std::size_t> steps, sims, trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<bool> ou_unfrozen;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--model", f.model, "ou | fcir | fcir-tv");
  cmd->add_option("--hurst", f.hurst, "Hurst index in (0,1)");
  cmd->add_option("--epsilon", f.epsilon, "regularization epsilon or 'auto'");
  cmd->add_option("--nu", f.nu, "noise coefficient of Z");
  cmd->add_option("--theta", f.theta, "mean reversion");
  cmd->add_option("--mu", f.mu, "constant drift level (fcir)");
  cmd->add_option("--kappa", f.kappa, "kappa of the time-varying drift");
  cmd->add_option("--c", f.c, "level c of the time-varying drift");
  cmd->add_option("--z0", f.z0, "initial value of Z");
  cmd->add_option("--ou-unfrozen", f.ou_unfrozen, "let the OU driver cross zero (true|false)");
  cmd->add_option("--sigma", f.sigma, "sqrt-shift | affine | sqrt-quad");
  cmd->add_option("--sigma-a", f.sigma_a, "first volatility coefficient");
  cmd->add_option("--sigma-b", f.sigma_b, "second volatility coefficient (affine)");
  cmd->add_option("--eta", f.eta, "stock drift");
  cmd->add_option("--rate", f.rate, "discount rate");
  cmd->add_option("--rho", f.rho, "correlation between B and V");
  cmd->add_option("--spot", f.spot, "initial price");
  cmd->add_option("--strike", f.strike, "strike");
  cmd->add_option("--horizon", f.horizon, "maturity T");
  cmd->add_option("--steps", f.steps, "time steps");
  cmd->add_option("--sims", f.sims, "paths per trial");
  cmd->add_option("--trials", f.trials, "number of trials");
  cmd->add_option("--seed", f.seed, "master seed (default: FRACVOL_SEED or 0)");
  cmd->add_option("--estimator", f.estimator, "direct | malliavin | both");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--out", f.out, "output file (default stdout)");
}

template <class T>
void set_if(T& dst, const std::optional<T>& src) {
  if (src) dst = *src;
}

void apply_flags(RunConfig& cfg, const Flags& f) {
  set_if(cfg.model, f.model);
  if (f.epsilon) apply_json(cfg, json{{"epsilon", *f.epsilon == "auto" ? json("auto") : json(std::stod(*f.epsilon))}});
  set_if(cfg.sigma, f.sigma);
  set_if(cfg.estimator, f.estimator);
  set_if(cfg.hurst, f.hurst);
  set_if(cfg.nu, f.nu);
  set_if(cfg.theta, f.theta);
  set_if(cfg.mu, f.mu);
  if (f.kappa) cfg.kappa = *f.kappa;
  set_if(cfg.c, f.c);
  set_if(cfg.z0, f.z0);
  set_if(cfg.ou_unfrozen, f.ou_unfrozen);
  set_if(cfg.sigma_a, f.sigma_a);
  set_if(cfg.sigma_b, f.sigma_b);
  set_if(cfg.eta, f.eta);
  set_if(cfg.rate, f.rate);
  set_if(cfg.rho, f.rho);
  set_if(cfg.spot, f.spot);
  set_if(cfg.strike, f.strike);
  set_if(cfg.horizon, f.horizon);
  set_if(cfg.steps, f.steps);
  set_if(cfg.sims, f.sims);
  set_if(cfg.trials, f.trials);
  set_if(cfg.seed, f.seed);
  set_if(cfg.threads, f.threads);
}

std::uint64_t env_seed() {
  const char* s = std::getenv("FRACVOL_SEED");
  if (!s || !*s) return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw validation_error(std::string("FRACVOL_SEED is not an unsigned integer: '") + s + "'");
  }
}

// defaults < FRACVOL_SEED < --config < --figure < flags
RunConfig resolve(const Flags& f, RunConfig cfg = {}) {
  cfg.seed = env_seed();
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw std::runtime_error("cannot open config file '" + *f.config + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw validation_error("config file '" + *f.config + "' is not valid JSON: " + e.what());
    }
    apply_json(cfg, j);
  }
  if (f.figure) {
    RunConfig preset = figure_preset(*f.figure);
    preset.seed = cfg.seed;
    preset.threads = cfg.threads;
    cfg = preset;
  }
  apply_flags(cfg, f);
  cfg.validate();
  return cfg;
}

std::string num9(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(9);
  s << v;
  return s.str();
}

// Writes to --out, or stdout when absent.
class Sink {
 public:
  explicit Sink(const std::optional<std::string>& path) {
    if (path) {
      file_.open(*path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file '" + *path + "'");
    }
    stream().imbue(std::locale::classic());
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

json assumptions() {
  return json{{"spot_and_strike", "S0 = K = 1 unless overridden; the source tables do not state them"},
              {"discounting", "exp(-rT) E[payoff]"},
              {"excluded_paths", "paths with a nonpositive Euler price are dropped from both estimators"}};
}

int cmd_paths(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const PricingConfig pc = cfg.pricing();
  const KernelWeights w = kernel_weights(pc.hurst, pc.grid);
  Sink sink(f.out);
  auto& out = sink.stream();
  out << "path_id,t,S,Y,Z,WH\n";
  for (std::size_t p = 0; p < cfg.sims; ++p) {
    const PathBundle b = correlated_bundle(pc.grid, pc.rho, w, pc.seed, p);
    const ZPath z = simulate_z(pc.z, b);
    const StockPath s = simulate_stock(pc.s0, pc.eta, pc.vol, z, b);
    for (std::size_t i = 0; i < pc.grid.n_points(); ++i) {
      out << p << ',' << num9(pc.grid.point(i)) << ',' << num9(s.s[i]) << ',' << num9(z.y[i]) << ',' << num9(z.z[i])
          << ',' << num9(b.wh[i]) << '\n';
    }
  }
  const json meta{{"config_echo", cfg}, {"figure", f.figure ? json(*f.figure) : json(nullptr)}};
  if (f.out) {
    std::ofstream m(*f.out + ".json");
    if (!m) throw std::runtime_error("cannot write metadata next to '" + *f.out + "'");
    m << meta.dump(2) << '\n';
  } else {
    std::cerr << meta.dump() << '\n';
  }
  return 0;
}

json estimate_record(const char* name, const MCEstimate& e, const RunConfig& cfg, double wall) {
  return json{{"estimator", name},         {"config_echo", cfg},         {"mean", e.mean},
              {"cv", e.cv},                {"std_err", e.std_err},       {"n_excluded", e.n_excluded},
              {"n_sims", e.n_sims},        {"n_trials", e.n_trials},     {"seed", e.seed},
              {"flagged", e.flagged},      {"wall_time", wall},          {"assumptions", assumptions()}};
}

int cmd_price(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const auto start = std::chrono::steady_clock::now();
  const PricingResult r = run_trials(cfg.pricing(), cfg.estimator_kind());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json records = json::array();
  if (r.direct) records.push_back(estimate_record("direct", *r.direct, cfg, wall));
  if (r.malliavin) records.push_back(estimate_record("malliavin", *r.malliavin, cfg, wall));
  Sink sink(f.out);
  sink.stream() << records.dump(2) << '\n';
  return 0;
}

int cmd_table(int id, const Flags& f) {
  const TablePreset t = table_preset(id);
  const RunConfig base = resolve(f, t.base);
  Sink sink(f.out);
  auto& out = sink.stream();
  out << "sigma,H,mean,cv,paper_mean,paper_cv\n";
  for (std::size_t row = 0; row < t.rows.size(); ++row) {
    for (std::size_t k = 0; k < t.hursts.size(); ++k) {
      RunConfig cfg = base;
      cfg.hurst = t.hursts[k];
      if (!f.epsilon) cfg.epsilon.reset();
      if (!f.sigma) cfg.set_vol(t.rows[row]);
      const PricingResult r = run_trials(cfg.pricing(), cfg.estimator_kind());
      const MCEstimate& e = r.direct ? *r.direct : *r.malliavin;
      const TableReference& ref = t.reference[row][k];
      out << '"' << cfg.vol().label() << "\"," << num9(cfg.hurst) << ',' << num9(e.mean) << ',' << num9(e.cv) << ','
          << num9(ref.mean) << ',' << num9(ref.cv) << '\n';
      out.flush();
    }
  }
  return 0;
}

int cmd_verify(const std::string& level, unsigned threads) {
  const VerifyLevel lv = level == "full" ? VerifyLevel::Full : VerifyLevel::Fast;
  std::size_t failed = 0;
  const auto results = run_verify(lv, threads);
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    if (!r.pass) ++failed;
  }
  std::cout << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_kernel(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const TimeGrid grid(cfg.horizon, cfg.steps);
  const KernelWeights w = kernel_weights(HurstParam(cfg.hurst), grid);
  Sink sink(f.out);
  auto& out = sink.stream();
  out << "j,i,weight\n";
  for (std::size_t j = 1; j <= grid.n_steps(); ++j) {
    const auto row = w.row(j);
    for (std::size_t i = 1; i <= j; ++i) out << j << ',' << i << ',' << num9(row[i - 1]) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo pricing under fractional CIR stochastic volatility"};
  app.require_subcommand(1);

  Flags paths_f, price_f, table_f, kernel_f;
  auto* paths = app.add_subcommand("paths", "simulate sample paths to CSV");
  add_run_flags(paths, paths_f);
  paths->add_option("--figure", paths_f.figure, "figure preset: 2.1 | 2.2 | 2.3 | 2.4");

  auto* price = app.add_subcommand("price", "price the call-plus-binary payoff");
  add_run_flags(price, price_f);
  price->add_option("--figure", price_f.figure, "start from a figure preset");

  int table_id = 1;
  auto* table = app.add_subcommand("table", "reproduce one of the option-price tables");
  table->add_option("name", table_id, "table number 1-4")->required()->check(CLI::Range(1, 4));
  add_run_flags(table, table_f);

  std::string level = "fast";
  unsigned verify_threads = 1;
  auto* verify = app.add_subcommand("verify", "run the invariant checks");
  verify->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--threads", verify_threads, "worker threads for the pricing checks");

  auto* kern = app.add_subcommand("kernel", "dump the kernel weights to CSV");
  add_run_flags(kern, kernel_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*paths) return cmd_paths(paths_f);
    if (*price) return cmd_price(price_f);
    if (*table) return cmd_table(table_id, table_f);
    if (*verify) return cmd_verify(level, verify_threads);
    if (*kern) return cmd_kernel(kernel_f);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
