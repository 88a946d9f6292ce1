#include "condcop/mc_harness.hpp"

#include "condcop/csv_io.hpp"
#include "condcop/loclin_cdf.hpp"
#include "condcop/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace condcop {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::uint64_t
splitmix64(std::uint64_t z) noexcept
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Runs fn(i) for i in [0, count) on `threads` workers. The first exception
// thrown by any task is rethrown after all workers have joined.
template <class Fn>
void
parallel_for(std::size_t count, std::size_t threads, Fn fn)
{
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
        next.store(count);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(worker);
  }
  if (error)
    std::rethrow_exception(error);
}

const std::vector<double>&
lattice_x()
{
  static const std::vector<double> xs{ 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9 };
  return xs;
}

const std::vector<double>&
lattice_y()
{
  static const std::vector<double> ys = [] {
    std::vector<double> v;
    for (int k = 1; k <= 33; ++k)
      v.push_back(k / 34.0);
    return v;
  }();
  return ys;
}

const std::vector<double>&
lattice_u()
{
  static const std::vector<double> us = [] {
    std::vector<double> v;
    for (int k = 0; k <= 16; ++k)
      v.push_back(0.1 + 0.05 * k);
    return v;
  }();
  return us;
}

ConditionalCdfFit
fit_margin(const TrivariateSample& s, int j, double h)
{
  return ConditionalCdfFit(Sample1D(s.x, j == 1 ? s.y1 : s.y2), Bandwidths{ h, h });
}

ConditionalMargin
oracle_margin(double rho)
{
  return [rho](double y, double x) { return conditional_margin(y, x, rho); };
}

} // namespace

double
BandwidthRule::operator()(std::size_t n) const
{
  return c * std::pow(static_cast<double>(n), exponent);
}

ExperimentConfig
ExperimentConfig::desk()
{
  return {};
}

ExperimentConfig
ExperimentConfig::paper()
{
  ExperimentConfig cfg;
  cfg.n_grid = { 100, 200, 500, 1000, 2000, 5000, 10000 };
  cfg.replications = 5000;
  return cfg;
}

void
ExperimentConfig::validate() const
{
  try {
    model.validate();
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(std::string("rho12/rho1X/rho2X: ") + e.what());
  }
  if (!(u1 > 0.0 && u1 < 1.0))
    throw std::invalid_argument("u1 must lie in (0, 1)");
  if (!(u2 > 0.0 && u2 < 1.0))
    throw std::invalid_argument("u2 must lie in (0, 1)");
  if (n_grid.empty())
    throw std::invalid_argument("n_grid must not be empty");
  for (auto n : n_grid) {
    if (n < 10)
      throw std::invalid_argument("n_grid entries must be >= 10");
    if (!(bandwidth(n) > 0.0) || !std::isfinite(bandwidth(n)))
      throw std::invalid_argument("bandwidth_c/bandwidth_exponent give h <= 0");
  }
  if (replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("gamma must lie in (0, 0.5)");
}

ExperimentConfig
load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }
  if (!j.is_object())
    throw std::runtime_error("config " + path.string() + ": expected an object");

  auto cfg = ExperimentConfig::desk();
  auto get = [&](const char* key, auto& target, bool required) {
    if (!j.contains(key)) {
      if (required)
        throw std::invalid_argument(std::string("missing required field ") + key);
      return;
    }
    try {
      j.at(key).get_to(target);
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument(std::string("invalid value for field ") + key);
    }
  };
  get("rho1X", cfg.model.rho1X, true);
  get("rho2X", cfg.model.rho2X, true);
  get("rho12", cfg.model.rho12, true);
  get("u1", cfg.u1, false);
  get("u2", cfg.u2, false);
  get("n_grid", cfg.n_grid, false);
  get("replications", cfg.replications, false);
  get("bandwidth_c", cfg.bandwidth.c, false);
  get("bandwidth_exponent", cfg.bandwidth.exponent, false);
  get("master_seed", cfg.master_seed, false);
  get("gamma", cfg.gamma, false);
  get("threads", cfg.threads, false);
  cfg.validate();
  return cfg;
}

std::uint64_t
replication_seed(std::uint64_t master, std::size_t n, std::size_t rep)
{
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  return splitmix64(h ^ (static_cast<std::uint64_t>(rep) * 0xd1b54a32d192ed03ULL));
}

std::size_t
worker_count(const ExperimentConfig& cfg)
{
  if (cfg.threads > 0)
    return cfg.threads;
  if (const char* env = std::getenv("CONDCOP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0)
      return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ReplicationRecord
run_replication(const ExperimentConfig& cfg,
                std::size_t n,
                std::size_t rep,
                ReplicationOptions opts)
{
  ReplicationRecord rec;
  rec.n = n;
  rec.rep = rep;
  rec.seed = replication_seed(cfg.master_seed, n, rep);

  const auto s = sample(cfg.model, n, rec.seed);
  const auto oracle =
    pseudo_obs(s, oracle_margin(cfg.model.rho1X), oracle_margin(cfg.model.rho2X));
  rec.c_oracle = EmpiricalCopula(oracle)(cfg.u1, cfg.u2);
  if (opts.oracle_only) {
    rec.c_hat = nan;
    return rec;
  }

  const double h = cfg.bandwidth(n);
  const auto f1 = fit_margin(s, 1, h);
  const auto f2 = fit_margin(s, 2, h);

  std::vector<double> v1, v2;
  v1.reserve(n);
  v2.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = f1.try_cdf(s.y1[i], s.x[i]);
    const auto b = f2.try_cdf(s.y2[i], s.x[i]);
    rec.degenerate_count += (a ? 0 : 1) + (b ? 0 : 1);
    if (a && b) {
      v1.push_back(*a);
      v2.push_back(*b);
    }
  }
  if (static_cast<double>(rec.degenerate_count) >
        max_degenerate_fraction * 2.0 * static_cast<double>(n) ||
      v1.empty()) {
    rec.failed = true;
    rec.c_hat = nan;
  } else {
    const PseudoObservations est(std::move(v1), std::move(v2), Provenance::estimated);
    rec.c_hat = EmpiricalCopula(est)(cfg.u1, cfg.u2);
  }

  if (opts.sup_margin_error) {
    double sup = 0.0;
    for (double x : lattice_x())
      for (double y : lattice_y()) {
        const auto f = f1.try_cdf(y, x);
        sup = std::max(sup, f ? std::abs(*f - conditional_margin(y, x, cfg.model.rho1X))
                              : std::numeric_limits<double>::infinity());
      }
    rec.sup_margin_error = sup;
  }
  return rec;
}

std::vector<ReplicationRecord>
run_replications(const ExperimentConfig& cfg, std::size_t n, ReplicationOptions opts)
{
  std::vector<ReplicationRecord> out(cfg.replications);
  parallel_for(cfg.replications, worker_count(cfg), [&](std::size_t r) {
    out[r] = run_replication(cfg, n, r, opts);
  });
  return out;
}

namespace {

std::vector<const ReplicationRecord*>
succeeded(const std::vector<ReplicationRecord>& recs)
{
  std::vector<const ReplicationRecord*> ok;
  for (const auto& r : recs)
    if (!r.failed)
      ok.push_back(&r);
  return ok;
}

} // namespace

ProximityRow
proximity_row(std::size_t n, const std::vector<ReplicationRecord>& recs)
{
  const auto ok = succeeded(recs);
  ProximityRow row{ n, nan, nan, ok.size(), recs.size() - ok.size() };
  if (ok.size() < 2)
    return row;
  std::vector<double> a, b;
  double gap = 0.0;
  for (const auto* r : ok) {
    a.push_back(r->c_hat);
    b.push_back(r->c_oracle);
    gap += std::abs(r->c_hat - r->c_oracle);
  }
  row.corr = stats::pearson(a, b);
  row.gap = std::sqrt(static_cast<double>(n)) * gap / static_cast<double>(ok.size());
  return row;
}

std::vector<ProximityRow>
experiment_proximity(const ExperimentConfig& cfg)
{
  cfg.validate();
  if (cfg.n_grid.size() < 2 || cfg.replications < 50)
    throw std::invalid_argument(
      "proximity experiment needs >= 2 sample sizes and >= 50 replications");
  std::vector<ProximityRow> rows;
  for (auto n : cfg.n_grid)
    rows.push_back(proximity_row(n, run_replications(cfg, n)));
  return rows;
}

NormalityRow
normality_row(std::size_t n,
              const std::vector<ReplicationRecord>& recs,
              double copula,
              double sigma)
{
  const auto ok = succeeded(recs);
  NormalityRow row{ n, nan, nan, nan, nan, ok.size(), recs.size() - ok.size(), {}, {} };
  if (ok.size() < 2)
    return row;

  const double rn = std::sqrt(static_cast<double>(n));
  std::vector<double> z;
  z.reserve(ok.size());
  for (const auto* r : ok)
    z.push_back(rn * (r->c_hat - copula));
  row.mean = stats::mean(z);
  row.sd = stats::sd(z);

  std::vector<double> standardized;
  standardized.reserve(z.size());
  for (double v : z)
    standardized.push_back(v / sigma);
  row.ks = stats::ks_statistic(standardized, std_normal_cdf);
  row.ks_critical = stats::ks_critical_value(z.size(), 0.01);

  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    row.qq.emplace_back(sigma * std_normal_quantile((static_cast<double>(i) + 0.5) / m),
                        z[i]);

  constexpr std::size_t bins = 25;
  const double lo = z.front();
  const double hi = z.back();
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  for (std::size_t b = 0; b < bins; ++b)
    row.histogram.push_back({ lo + width * static_cast<double>(b),
                              lo + width * static_cast<double>(b + 1), 0 });
  for (double v : z) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    row.histogram[std::min(b, bins - 1)].count++;
  }
  return row;
}

NormalitySummary
experiment_normality(const ExperimentConfig& cfg)
{
  cfg.validate();
  if (cfg.replications < 200)
    throw std::invalid_argument("normality experiment needs >= 200 replications");
  const double rho = cfg.model.rho12_given_X();
  NormalitySummary s{ gaussian_copula(cfg.u1, cfg.u2, rho),
                      limit_sigma(cfg.u1, cfg.u2, rho),
                      {} };
  for (auto n : cfg.n_grid)
    s.rows.push_back(normality_row(n, run_replications(cfg, n), s.copula, s.sigma));
  return s;
}

std::vector<RateRow>
rate_scan(const ExperimentConfig& cfg, RateScanOptions opts)
{
  cfg.validate();
  const double rhos[2] = { cfg.model.rho1X, cfg.model.rho2X };
  std::vector<RateRow> rows;
  for (auto n : cfg.n_grid) {
    std::vector<double> sup_cdf(cfg.replications, nan);
    std::vector<double> sup_q(cfg.replications, nan);
    parallel_for(cfg.replications, worker_count(cfg), [&](std::size_t r) {
      const auto s = sample(cfg.model, n, replication_seed(cfg.master_seed, n, r));
      const double h = cfg.bandwidth(n);
      double ec = 0.0, eq = 0.0;
      try {
        for (int j = 1; j <= 2; ++j) {
          const double rho = rhos[j - 1];
          if (opts.oracle_margins)
            continue; // the true margin reproduces itself exactly
          const auto fit = fit_margin(s, j, h);
          for (double x : lattice_x()) {
            for (double y : lattice_y())
              ec = std::max(ec, std::abs(fit.cdf(y, x) - conditional_margin(y, x, rho)));
            const auto qs = fit.quantiles(lattice_u(), x);
            for (std::size_t k = 0; k < qs.size(); ++k)
              eq = std::max(
                eq, std::abs(qs[k] - conditional_quantile(lattice_u()[k], x, rho)));
          }
        }
      } catch (const DegenerateDesign&) {
        return;
      } catch (const NoCrossing&) {
        return;
      }
      sup_cdf[r] = ec;
      sup_q[r] = eq;
    });

    std::vector<double> ok_cdf, ok_q;
    for (std::size_t r = 0; r < cfg.replications; ++r)
      if (!std::isnan(sup_cdf[r])) {
        ok_cdf.push_back(sup_cdf[r]);
        ok_q.push_back(sup_q[r]);
      }
    const std::size_t failed = cfg.replications - ok_cdf.size();
    rows.push_back({ n,
                     ok_cdf.empty() ? nan : stats::median(ok_cdf),
                     ok_q.empty() ? nan : stats::median(ok_q),
                     failed });
  }
  return rows;
}

std::vector<MonotonicityReport>
monotonicity_scan(const ExperimentConfig& cfg, std::size_t n, std::size_t rep)
{
  const auto s = sample(cfg.model, n, replication_seed(cfg.master_seed, n, rep));
  const auto fit = fit_margin(s, 1, cfg.bandwidth(n));
  std::vector<MonotonicityReport> out;
  for (double x : lattice_x())
    out.push_back(fit.monotonicity_check(x, { cfg.gamma, 1.0 - cfg.gamma }));
  return out;
}

void
emit_csv(const std::vector<ReplicationRecord>& recs, const std::filesystem::path& path)
{
  auto out = csv::open_for_write(path);
  out << "n,rep,seed,c_hat,c_oracle,degenerate_count,sup_margin_error,failed\n";
  for (const auto& r : recs) {
    out << r.n << ',' << r.rep << ',' << r.seed << ',' << csv::format(r.c_hat) << ','
        << csv::format(r.c_oracle) << ',' << r.degenerate_count << ','
        << (r.sup_margin_error ? csv::format(*r.sup_margin_error) : std::string{})
        << ',' << (r.failed ? 1 : 0) << '\n';
  }
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

std::vector<ReplicationRecord>
load_replications(const std::filesystem::path& path)
{
  const auto raw = csv::read_raw(path);
  const std::vector<std::string> expected{ "n",         "rep",
                                           "seed",      "c_hat",
                                           "c_oracle",  "degenerate_count",
                                           "sup_margin_error", "failed" };
  if (raw.header != expected)
    throw std::runtime_error(path.string() + ": unexpected replication header");
  std::vector<ReplicationRecord> out;
  for (const auto& row : raw.rows) {
    ReplicationRecord r;
    r.n = std::stoull(row[0]);
    r.rep = std::stoull(row[1]);
    r.seed = std::stoull(row[2]);
    r.c_hat = std::strtod(row[3].c_str(), nullptr);
    r.c_oracle = std::strtod(row[4].c_str(), nullptr);
    r.degenerate_count = std::stoull(row[5]);
    if (!row[6].empty())
      r.sup_margin_error = std::strtod(row[6].c_str(), nullptr);
    r.failed = row[7] == "1";
    out.push_back(r);
  }
  return out;
}

void
write_proximity(const std::vector<ProximityRow>& rows, const std::filesystem::path& path)
{
  auto out = csv::open_for_write(path);
  out << "n,corr,gap\n";
  for (const auto& r : rows)
    out << r.n << ',' << csv::format(r.corr) << ',' << csv::format(r.gap) << '\n';
}

void
write_normality(const NormalitySummary& s, const std::filesystem::path& dir)
{
  {
    auto out = csv::open_for_write(dir / "normality.csv");
    out << "n,sd,ks\n";
    for (const auto& r : s.rows)
      out << r.n << ',' << csv::format(r.sd) << ',' << csv::format(r.ks) << '\n';
  }
  for (const auto& r : s.rows) {
    auto qq = csv::open_for_write(dir / ("qq_" + std::to_string(r.n) + ".csv"));
    qq << "theoretical,empirical\n";
    for (const auto& [t, e] : r.qq)
      qq << csv::format(t) << ',' << csv::format(e) << '\n';
    auto hist = csv::open_for_write(dir / ("hist_" + std::to_string(r.n) + ".csv"));
    hist << "lo,hi,count\n";
    for (const auto& b : r.histogram)
      hist << csv::format(b.lo) << ',' << csv::format(b.hi) << ',' << b.count << '\n';
  }
}

void
write_rates(const std::vector<RateRow>& rows, const std::filesystem::path& path)
{
  auto out = csv::open_for_write(path);
  out << "n,sup_cdf_error,sup_quantile_error\n";
  for (const auto& r : rows)
    out << r.n << ',' << csv::format(r.sup_cdf) << ',' << csv::format(r.sup_quantile)
        << '\n';
}

} // namespace condcop
