#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rpwy/montecarlo.hpp"

namespace rpwy {

// Sweep CSV, one row per run, header mandatory:
//   run_index,n_nuc,a1,a2,a3,a4,site1,site2,site3,site4,J,kappa_st,Y,dY,dY_dB,c_st,ratio,flag
// Unused nucleus columns are empty. Sites are D or A; flag is ok or numerical.
// Reals are written with 17 significant digits, so a read-back is lossless.

inline constexpr const char* kSweepHeader =
    "run_index,n_nuc,a1,a2,a3,a4,site1,site2,site3,site4,J,kappa_st,Y,dY,dY_dB,c_st,ratio,flag";

/// %.17g
std::string format_real(double v);

void write_sweep_csv(std::ostream& out, std::span<const RunResult> results);
void write_sweep_csv(const std::filesystem::path& path, std::span<const RunResult> results);

/// Throws SchemaError with the line number on a malformed header or row.
std::vector<RunResult> read_sweep_csv(std::istream& in);
std::vector<RunResult> read_sweep_csv(const std::filesystem::path& path);

/// Splits one CSV line on commas (no quoting; none of the formats here need it).
std::vector<std::string> split_csv_line(const std::string& line);

/// Strict full-field parse; accepts inf and nan. Throws SchemaError(line, ...).
double parse_real(const std::string& field, std::size_t line, const char* column);

}  // namespace rpwy
