#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rpwy/dynamics.hpp"
#include "rpwy/montecarlo.hpp"

namespace rpwy::cli {

// Exit-code taxonomy, stable across releases.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,           // bad command line
  kValidation = 2,      // inputs violate a documented precondition
  kIo = 3,              // file could not be read or written
  kNumerical = 4,       // integration or linear-algebra failure
  kSchema = 5,          // malformed CSV / JSON record
  kBoundViolated = 6,   // verify-bound found runs above the slack
};

/// Parses argv and dispatches to a subcommand; every error is mapped to an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SimulateConfig {
  std::filesystem::path model_file;
  double field_b = 0.0;
  TimeGrid grid;
  std::optional<std::filesystem::path> csv_out;
  std::optional<std::filesystem::path> summary_out;
  bool coherence = true;
};

struct SweepConfig {
  SampleSpec spec;
  std::filesystem::path out;
  std::size_t workers = 0;
  bool quiet = false;
};

struct EnvelopeConfig {
  double exponent_m = 1.0;
  std::filesystem::path in;
};

struct VerifyBoundConfig {
  double slack = 1e-3;
  std::filesystem::path in;
};

struct TransduceConfig {
  double K = 1.0;
  double V = 1.0;
  std::optional<double> yield, derivative, uncertainty, c_st;
  std::optional<std::filesystem::path> from_run;
  std::size_t run_index = 0;
  std::optional<std::filesystem::path> out;
};

struct PlotdataConfig {
  std::filesystem::path in;
  std::filesystem::path out_dir;
  bool svg = false;
};

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out);
int cmd_sweep(const SweepConfig& cfg, std::ostream& out);
int cmd_envelope(const EnvelopeConfig& cfg, std::ostream& out);
int cmd_verify_bound(const VerifyBoundConfig& cfg, std::ostream& out);
int cmd_transduce(const TransduceConfig& cfg, std::ostream& out);
int cmd_plotdata(const PlotdataConfig& cfg, std::ostream& out);

/// Per-step time series written by `simulate`.
struct SeriesRow {
  double t = 0.0;
  double p_singlet = 0.0;
  double weight = 0.0;
  std::optional<double> c_st_instant;
};

inline constexpr const char* kSeriesHeader = "t,p_singlet,weight,c_st_instant";

std::vector<SeriesRow> read_series_csv(const std::filesystem::path& path);

struct PlotSeries {
  std::vector<std::size_t> run_index;
  std::vector<double> c_st, two_dy2, ratio;
  std::vector<double> overlay_x, overlay_identity, overlay_m1, overlay_m05;
};

/// Panel and overlay data derived from a sweep (flagged runs are dropped; the ratio panel
/// keeps only finite ratios). Overlays sample 200 points across the observed positive c_st range.
PlotSeries build_plot_series(const std::vector<RunResult>& runs);
std::string render_svg(const PlotSeries& series);

}  // namespace rpwy::cli
