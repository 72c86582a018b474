#include "rpwy/sweep_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

constexpr std::size_t kColumns = 18;

std::size_t parse_index(const std::string& field, std::size_t line, const char* column) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw SchemaError(line, std::string("column ") + column + ": expected a non-negative integer, got '" + field + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

double parse_real(const std::string& field, std::size_t line, const char* column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw SchemaError(line, std::string("column ") + column + ": expected a real number, got '" + field + "'");
  }
  return v;
}

void write_sweep_csv(std::ostream& out, std::span<const RunResult> results) {
  out << kSweepHeader << '\n';
  for (const auto& r : results) {
    out << r.run_index << ',' << r.model.num_nuclei();
    for (std::size_t j = 0; j < kMaxNuclei; ++j) {
      out << ',';
      if (j < r.model.num_nuclei()) out << format_real(r.model.nuclei[j].coupling);
    }
    for (std::size_t j = 0; j < kMaxNuclei; ++j) {
      out << ',';
      if (j < r.model.num_nuclei()) out << (r.model.nuclei[j].site == Site::Donor ? 'D' : 'A');
    }
    out << ',' << format_real(r.model.exchange) << ',' << format_real(r.model.kappa_st) << ','
        << format_real(r.yield) << ',' << format_real(r.uncertainty) << ',' << format_real(r.derivative) << ','
        << format_real(r.c_st) << ',' << format_real(r.ratio) << ','
        << (r.flag == RunFlag::Ok ? "ok" : "numerical") << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const RunResult> results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_sweep_csv(out, results);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<RunResult> read_sweep_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw SchemaError(1, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepHeader) throw SchemaError(1, "unexpected header '" + line + "'");

  std::vector<RunResult> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != kColumns) {
      throw SchemaError(line_no, "expected " + std::to_string(kColumns) + " fields, got " + std::to_string(f.size()));
    }
    RunResult r;
    r.run_index = parse_index(f[0], line_no, "run_index");
    const std::size_t n = parse_index(f[1], line_no, "n_nuc");
    if (n > kMaxNuclei) throw SchemaError(line_no, "n_nuc exceeds " + std::to_string(kMaxNuclei));
    r.model.nuclei.resize(n);
    for (std::size_t j = 0; j < kMaxNuclei; ++j) {
      const std::string& a = f[2 + j];
      const std::string& site = f[6 + j];
      if (j < n) {
        r.model.nuclei[j].coupling = parse_real(a, line_no, "a");
        if (site == "D") {
          r.model.nuclei[j].site = Site::Donor;
        } else if (site == "A") {
          r.model.nuclei[j].site = Site::Acceptor;
        } else {
          throw SchemaError(line_no, "site must be D or A, got '" + site + "'");
        }
      } else if (!a.empty() || !site.empty()) {
        throw SchemaError(line_no, "nucleus columns beyond n_nuc must be empty");
      }
    }
    r.model.exchange = parse_real(f[10], line_no, "J");
    r.model.kappa_st = parse_real(f[11], line_no, "kappa_st");
    r.yield = parse_real(f[12], line_no, "Y");
    r.uncertainty = parse_real(f[13], line_no, "dY");
    r.derivative = parse_real(f[14], line_no, "dY_dB");
    r.c_st = parse_real(f[15], line_no, "c_st");
    r.ratio = parse_real(f[16], line_no, "ratio");
    if (f[17] == "ok") {
      r.flag = RunFlag::Ok;
    } else if (f[17] == "numerical") {
      r.flag = RunFlag::NumericalFailure;
    } else {
      throw SchemaError(line_no, "flag must be ok or numerical, got '" + f[17] + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunResult> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_sweep_csv(in);
}

}  // namespace rpwy
