// Command line front end: simulate, estimate, sigma, diagnose.

#include "condcop/csv_io.hpp"
#include "condcop/mc_harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace condcop;

namespace {

ExperimentConfig
resolve_config(const std::string& path, bool paper, std::optional<std::uint64_t> seed)
{
  ExperimentConfig cfg = paper ? ExperimentConfig::paper() : ExperimentConfig::desk();
  if (!path.empty()) {
    const auto loaded = load_config(path);
    if (paper) {
      // keep the model and evaluation point from the file, scale from the preset
      cfg.model = loaded.model;
      cfg.u1 = loaded.u1;
      cfg.u2 = loaded.u2;
      cfg.master_seed = loaded.master_seed;
      cfg.threads = loaded.threads;
    } else {
      cfg = loaded;
    }
  }
  if (seed)
    cfg.master_seed = *seed;
  cfg.validate();
  return cfg;
}

int
cmd_sigma(double u1, double u2, double rho)
{
  std::printf("%.6f\n", limit_sigma(u1, u2, rho));
  return 0;
}

int
cmd_simulate(const ExperimentConfig& cfg, const fs::path& out)
{
  fs::create_directories(out);
  const double rho = cfg.model.rho12_given_X();
  const double copula = gaussian_copula(cfg.u1, cfg.u2, rho);
  const double sigma = limit_sigma(cfg.u1, cfg.u2, rho);
  std::cout << "rho12|X = " << rho << ", C(u) = " << copula
            << ", sigma(u) = " << sigma << '\n';

  std::vector<ReplicationRecord> all;
  std::vector<ProximityRow> proximity;
  NormalitySummary normality{ copula, sigma, {} };
  for (auto n : cfg.n_grid) {
    auto recs = run_replications(cfg, n);
    proximity.push_back(proximity_row(n, recs));
    normality.rows.push_back(normality_row(n, recs, copula, sigma));
    const auto& p = proximity.back();
    const auto& q = normality.rows.back();
    std::printf("n=%6zu  corr=%.4f  gap=%.4f  sd=%.4f  ks=%.4f (1%% crit %.4f)  "
                "ok=%zu failed=%zu\n",
                n, p.corr, p.gap, q.sd, q.ks, q.ks_critical, p.succeeded, p.failed);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  write_proximity(proximity, out / "proximity.csv");
  write_normality(normality, out);
  emit_csv(all, out / "replications.csv");
  return 0;
}

int
cmd_estimate(const fs::path& data,
             std::optional<double> h1,
             std::optional<double> h2,
             const BandwidthRule& rule,
             double u1,
             double u2,
             const fs::path& out)
{
  const auto table = csv::read(data);
  const bool trivariate = table.has("y1") && table.has("y2");
  const auto& xs = table.column("x");
  const std::size_t n = xs.size();
  const Bandwidths bw{ h1.value_or(rule(n)), h2.value_or(rule(n)) };
  bw.validate();

  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  if (bw.h1 >= 0.5 * (*xmax - *xmin))
    std::cerr << "warning: h1 = " << bw.h1 << " is at least half the range of x\n";

  fs::create_directories(out);
  if (!trivariate) {
    const ConditionalCdfFit fit(csv::read_pairs(data), bw);
    auto f = csv::open_for_write(out / "fhat.csv");
    f << "x,y,F_hat\n";
    const auto& ys = table.column("y");
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = fit.try_cdf(ys[i], xs[i]);
      f << csv::format(xs[i]) << ',' << csv::format(ys[i]) << ','
        << (v ? csv::format(*v) : std::string("nan")) << '\n';
    }
    std::cout << "wrote " << (out / "fhat.csv").string() << '\n';
    return 0;
  }

  const auto s = csv::read_triples(data);
  const ConditionalCdfFit f1(Sample1D(s.x, s.y1), bw);
  const ConditionalCdfFit f2(Sample1D(s.x, s.y2), bw);
  const auto p = pseudo_obs(s, f1, f2);
  csv::write_pseudo_obs(p, out / "pseudo_obs.csv");
  std::printf("C_n(%g, %g) = %.6f\n", u1, u2, empirical_copula(p, u1, u2));
  return 0;
}

int
cmd_diagnose(const ExperimentConfig& cfg,
             const std::string& data,
             std::optional<double> h1,
             std::optional<double> h2,
             const fs::path& out)
{
  fs::create_directories(out);
  std::vector<MonotonicityReport> reports;
  if (!data.empty()) {
    auto sample = csv::read_pairs(data);
    const auto n = sample.size();
    const Bandwidths bw{ h1.value_or(cfg.bandwidth(n)), h2.value_or(cfg.bandwidth(n)) };
    const ConditionalCdfFit fit(std::move(sample), bw);
    const auto xs = fit.sample().x();
    for (int k = 1; k <= 9; ++k) {
      const double x = xs.front() + (xs.back() - xs.front()) * k / 10.0;
      reports.push_back(fit.monotonicity_check(x, { cfg.gamma, 1.0 - cfg.gamma }));
    }
  } else {
    const auto rows = rate_scan(cfg);
    write_rates(rows, out / "rates.csv");
    for (const auto& r : rows)
      std::printf("n=%6zu  median sup|F-F^|=%.5f  median sup|Q-Q^|=%.5f  failed=%zu\n",
                  r.n, r.sup_cdf, r.sup_quantile, r.failed);
    reports = monotonicity_scan(cfg, cfg.n_grid.back(), 0);
  }
  csv::write_monotonicity(reports, out / "monotonicity.csv");
  std::size_t violations = 0;
  for (const auto& r : reports)
    violations += r.violation() ? 1 : 0;
  std::printf("monotonicity: %zu of %zu x-points flagged\n", violations, reports.size());
  return 0;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Smoothed local-linear conditional margins and the empirical "
                "conditional copula" };
  app.require_subcommand(1);

  double su1 = 0.5, su2 = 0.7, srho = 0.5;
  auto* sigma = app.add_subcommand("sigma", "Limit standard deviation of sqrt(n)(C_n(u) - C(u))");
  sigma->add_option("--u1", su1)->required();
  sigma->add_option("--u2", su2)->required();
  sigma->add_option("--rho", srho, "Gaussian copula correlation")->required();

  std::string config;
  bool paper = false;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  auto* simulate = app.add_subcommand("simulate", "Estimator-vs-oracle and normality experiments");
  simulate->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
  simulate->add_flag("--paper", paper, "Full-scale settings (slow)");
  simulate->add_option("--seed", seed, "Override the master seed");
  simulate->add_option("--out", out, "Output directory");

  std::string data;
  std::optional<double> h1, h2;
  double eu1 = 0.5, eu2 = 0.7;
  auto* estimate = app.add_subcommand("estimate", "Fit one dataset (x,y or x,y1,y2 CSV)");
  estimate->add_option("--data", data)->required()->check(CLI::ExistingFile);
  estimate->add_option("--h1", h1, "x bandwidth (default 0.5 n^-1/5)");
  estimate->add_option("--h2", h2, "y bandwidth (default 0.5 n^-1/5)");
  estimate->add_option("--u1", eu1);
  estimate->add_option("--u2", eu2);
  estimate->add_option("--out", out, "Output directory");

  auto* diagnose = app.add_subcommand("diagnose", "Rate scan and monotonicity reports");
  diagnose->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
  diagnose->add_option("--data", data, "x,y CSV for a monotonicity report")
    ->check(CLI::ExistingFile);
  diagnose->add_option("--h1", h1);
  diagnose->add_option("--h2", h2);
  diagnose->add_option("--seed", seed, "Override the master seed");
  diagnose->add_option("--out", out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sigma)
      return cmd_sigma(su1, su2, srho);
    if (*simulate)
      return cmd_simulate(resolve_config(config, paper, seed), out);
    if (*estimate)
      return cmd_estimate(data, h1, h2, BandwidthRule{}, eu1, eu2, out);
    if (*diagnose)
      return cmd_diagnose(resolve_config(config, false, seed), data, h1, h2, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
