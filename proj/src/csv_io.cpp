#include "condcop/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace condcop::csv {

namespace {

std::string
trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string>
split(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

double
parse(const std::string& cell, const std::filesystem::path& path, std::size_t line)
{
  if (cell.empty())
    return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size())
    throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                             ": not a number: '" + cell + "'");
  return v;
}

} // namespace

const std::vector<double>&
Table::column(const std::string& name) const
{
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name)
      return columns[j];
  throw std::runtime_error("missing column '" + name + "'");
}

bool
Table::has(const std::string& name) const
{
  for (const auto& h : header)
    if (h == name)
      return true;
  return false;
}

RawTable
read_raw(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  RawTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty())
      continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(t.header.size()) +
                               " fields, got " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty())
    throw std::runtime_error(path.string() + ": empty file");
  return t;
}

Table
read(const std::filesystem::path& path)
{
  const auto raw = read_raw(path);
  Table t;
  t.header = raw.header;
  t.columns.resize(raw.header.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r)
    for (std::size_t j = 0; j < raw.header.size(); ++j)
      t.columns[j].push_back(parse(raw.rows[r][j], path, r + 2));
  return t;
}

std::string
format(double v)
{
  if (std::isnan(v))
    return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream
open_for_write(const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

Sample1D
read_pairs(const std::filesystem::path& path)
{
  const auto t = read(path);
  return Sample1D(t.column("x"), t.column("y"));
}

TrivariateSample
read_triples(const std::filesystem::path& path)
{
  const auto t = read(path);
  TrivariateSample s{ t.column("x"), t.column("y1"), t.column("y2") };
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!std::isfinite(s.x[i]) || !std::isfinite(s.y1[i]) || !std::isfinite(s.y2[i]))
      throw std::runtime_error(path.string() + ": non-finite value in row " +
                               std::to_string(i + 1));
  return s;
}

void
write_pseudo_obs(const PseudoObservations& p, const std::filesystem::path& path)
{
  auto out = open_for_write(path);
  out << "v1,v2,provenance\n";
  const auto tag = to_string(p.provenance());
  for (std::size_t i = 0; i < p.size(); ++i)
    out << format(p.v1()[i]) << ',' << format(p.v2()[i]) << ',' << tag << '\n';
}

void
write_monotonicity(const std::vector<MonotonicityReport>& reports,
                   const std::filesystem::path& path)
{
  auto out = open_for_write(path);
  out << "x,min_density,violation_flag\n";
  for (const auto& r : reports)
    out << format(r.x) << ',' << format(r.min_density) << ','
        << (r.violation() ? 1 : 0) << '\n';
}

} // namespace condcop::csv
