#pragma once

#include "condcop/gauss_ref.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace condcop {

//! h = c * n^exponent, used for both h1 and h2.
struct BandwidthRule
{
  double c = 0.5;
  double exponent = -0.2;

  double operator()(std::size_t n) const;
};

struct ExperimentConfig
{
  GaussianCopulaSpec model{ 0.4, -0.2, 0.3689989 };
  double u1 = 0.5;
  double u2 = 0.7;
  std::vector<std::size_t> n_grid{ 250, 500, 1000, 2000 };
  std::size_t replications = 200;
  BandwidthRule bandwidth;
  std::uint64_t master_seed = 20170704;
  double gamma = 0.1;
  //! Worker threads; 0 means CONDCOP_THREADS or hardware concurrency.
  std::size_t threads = 0;

  //! Quick settings for routine runs.
  static ExperimentConfig desk();
  //! Full-scale settings: 5000 replications per n, n from 100 to 10000.
  static ExperimentConfig paper();

  //! Throws std::invalid_argument naming the offending field.
  void validate() const;
};

//! Reads a JSON object with keys rho1X, rho2X, rho12 (required), u1, u2,
//! n_grid, replications, bandwidth_c, bandwidth_exponent, master_seed,
//! gamma, threads (optional, desk defaults). Errors name the field.
ExperimentConfig load_config(const std::filesystem::path& path);

//! Per-replication seed, a pure function of (master, n, rep).
std::uint64_t replication_seed(std::uint64_t master, std::size_t n, std::size_t rep);

//! Number of worker threads for a config.
std::size_t worker_count(const ExperimentConfig& cfg);

struct ReplicationRecord
{
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double c_hat = 0.0;    //!< C-hat_n(u); NaN if failed or oracle-only
  double c_oracle = 0.0; //!< oracle C-hat_n(u)
  std::size_t degenerate_count = 0;
  std::optional<double> sup_margin_error;
  bool failed = false;
};

struct ReplicationOptions
{
  bool oracle_only = false;
  //! Also record sup over the diagnostic lattice of |F1-hat - F1|.
  bool sup_margin_error = false;
};

//! Fraction of the 2n pseudo-observation evaluations allowed to be
//! degenerate before a replication is marked failed.
inline constexpr double max_degenerate_fraction = 0.01;

//! Draw, fit both margins, build estimated and oracle pseudo-observations
//! and evaluate both empirical copulas at cfg.u. Deterministic in
//! (cfg.master_seed, n, rep).
ReplicationRecord run_replication(const ExperimentConfig& cfg,
                                  std::size_t n,
                                  std::size_t rep,
                                  ReplicationOptions opts = {});

//! cfg.replications independent runs at sample size n, ordered by rep.
std::vector<ReplicationRecord> run_replications(const ExperimentConfig& cfg,
                                                std::size_t n,
                                                ReplicationOptions opts = {});

struct ProximityRow
{
  std::size_t n;
  double corr;   //!< Pearson correlation of C-hat and oracle across reps
  double gap;    //!< sqrt(n) * mean |C-hat - oracle|
  std::size_t succeeded;
  std::size_t failed;
};

ProximityRow proximity_row(std::size_t n, const std::vector<ReplicationRecord>& recs);
std::vector<ProximityRow> experiment_proximity(const ExperimentConfig& cfg);

struct HistogramBin
{
  double lo;
  double hi;
  std::size_t count;
};

struct NormalityRow
{
  std::size_t n;
  double mean;        //!< of sqrt(n)(C-hat - C)
  double sd;
  double ks;          //!< KS of standardized draws against N(0, 1)
  double ks_critical; //!< 1% critical value
  std::size_t succeeded;
  std::size_t failed;
  std::vector<std::pair<double, double>> qq; //!< (theoretical, empirical)
  std::vector<HistogramBin> histogram;

  bool ks_pass() const noexcept { return ks <= ks_critical; }
};

struct NormalitySummary
{
  double copula; //!< C(u)
  double sigma;  //!< limit sigma(u)
  std::vector<NormalityRow> rows;
};

NormalityRow normality_row(std::size_t n,
                           const std::vector<ReplicationRecord>& recs,
                           double copula,
                           double sigma);
NormalitySummary experiment_normality(const ExperimentConfig& cfg);

struct RateRow
{
  std::size_t n;
  double sup_cdf;      //!< median over reps of sup |F-hat - F|
  double sup_quantile; //!< median over reps of sup |F-hat^- - F^-|
  std::size_t failed;
};

struct RateScanOptions
{
  //! Use the true margins in place of the estimator (errors are then 0).
  bool oracle_margins = false;
};

//! x in {0.1, ..., 0.9}; 33 y points per x; u in {0.1, 0.15, ..., 0.9};
//! both margins, sup taken over the lattice and the two margins.
std::vector<RateRow> rate_scan(const ExperimentConfig& cfg, RateScanOptions opts = {});

//! Monotonicity reports of margin 1 at x in {0.1, ..., 0.9}.
std::vector<MonotonicityReport> monotonicity_scan(const ExperimentConfig& cfg,
                                                  std::size_t n,
                                                  std::size_t rep);

//! Writes ReplicationRecord columns with 17 significant digits.
void emit_csv(const std::vector<ReplicationRecord>& recs,
              const std::filesystem::path& path);
std::vector<ReplicationRecord> load_replications(const std::filesystem::path& path);

void write_proximity(const std::vector<ProximityRow>& rows,
                     const std::filesystem::path& path);
void write_normality(const NormalitySummary& s, const std::filesystem::path& dir);
void write_rates(const std::vector<RateRow>& rows, const std::filesystem::path& path);

} // namespace condcop
