#pragma once

#include "condcop/copula_ranks.hpp"
#include "condcop/loclin_cdf.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace condcop::csv {

//! Column-oriented numeric table with a header row.
struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const noexcept
  {
    return columns.empty() ? 0 : columns.front().size();
  }
  //! Throws std::runtime_error naming the column if absent.
  const std::vector<double>& column(const std::string& name) const;
  bool has(const std::string& name) const;
};

//! Raw cells of a comma-separated file with a header row; blank lines are
//! skipped and every row must have as many cells as the header.
struct RawTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_raw(const std::filesystem::path& path);

//! Parses a comma-separated file of decimal floats. Empty cells and "nan"
//! read as NaN. Throws std::runtime_error with file and line on bad input.
Table read(const std::filesystem::path& path);

//! Shortest text that reads back to the same double (17 significant digits).
std::string format(double v);

//! Opens path for writing or throws std::runtime_error naming it.
std::ofstream open_for_write(const std::filesystem::path& path);

//! Reads a header `x,y` sample.
Sample1D read_pairs(const std::filesystem::path& path);
//! Reads a header `x,y1,y2` sample.
TrivariateSample read_triples(const std::filesystem::path& path);

//! Writes `v1,v2,provenance`.
void write_pseudo_obs(const PseudoObservations& p,
                      const std::filesystem::path& path);

//! Writes `x,min_density,violation_flag`.
void write_monotonicity(const std::vector<MonotonicityReport>& reports,
                        const std::filesystem::path& path);

} // namespace condcop::csv
