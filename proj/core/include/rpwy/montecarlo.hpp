#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rpwy/dynamics.hpp"
#include "rpwy/spin_model.hpp"

namespace rpwy {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Randomized radical-pair study. Defaults: 0 <= a_j <= 10, |J| <= 10, 0 <= kappa_ST <= 5,
/// 5000 runs on the 10000-step grid to t = 10/k.
struct SampleSpec {
  std::size_t n_nuc = 1;
  std::size_t runs = 5000;
  std::uint64_t seed = 0;
  TimeGrid grid;
  Range a_range{0.0, 10.0};
  Range j_range{-10.0, 10.0};
  Range kappa_range{0.0, 5.0};
  /// Field at which Y, delta Y and C_ST are evaluated (units of k).
  double operating_field = 0.0;

  void validate() const;
};

enum class RunFlag { Ok, NumericalFailure };

struct RunResult {
  std::size_t run_index = 0;
  RadicalPairModel model;
  double yield = 0.0;        // Y
  double uncertainty = 0.0;  // delta Y
  double derivative = 0.0;   // |dY/dB|
  double c_st = 0.0;
  double ratio = 0.0;        // Y delta Y / |dY/dB|, +inf when |dY/dB| = 0
  RunFlag flag = RunFlag::Ok;
  std::string message;
};

struct SweepResult {
  SampleSpec spec;
  std::vector<RunResult> results;  // index order
  std::vector<std::size_t> failures;
};

/// Per-run generator seed: the splitmix64 finalizer applied to
/// seed + 0x9E3779B97F4A7C15 * (run_index + 1).
std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_index);

/// Draws, from std::mt19937_64 seeded with run_seed(seed, run_index) and u = (x >> 11) * 2^-53:
/// a_1..a_N, then (N >= 2 only) one site bit per nucleus from the top bit of the next output
/// (1 = acceptor), then J, then kappa_ST. With N = 1 the nucleus sits on the donor.
RadicalPairModel sample_model(std::uint64_t seed, std::size_t run_index, const SampleSpec& spec);

/// Propagates at B = 0 and B = k; Y, delta Y and C_ST come from the operating field.
/// Numerical failures are reported in the result flag, not thrown.
RunResult run_one(const RadicalPairModel& model, const TimeGrid& grid, double operating_field = 0.0);

struct SweepOptions {
  /// 0 selects default_workers().
  std::size_t workers = 0;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// RPWY_WORKERS if set to a positive integer, else std::thread::hardware_concurrency().
std::size_t default_workers();

/// Runs every sample. Output depends only on the spec, never on the worker count.
SweepResult sweep(const SampleSpec& spec, const SweepOptions& options = {});

struct BoundReport {
  std::vector<std::size_t> violators;  // run indices with c_st > 2 dY^2 + slack
  double max_excess = 0.0;             // max of c_st - 2 dY^2 over all runs (-inf when empty)
  std::size_t count() const noexcept { return violators.size(); }
};

BoundReport verify_bound(std::span<const RunResult> results, double slack);
inline BoundReport verify_bound(const SweepResult& s, double slack) { return verify_bound(s.results, slack); }

/// min over runs of ratio * c_st^m, skipping flagged runs, infinite ratios and c_st <= 0.
/// Throws ValidationError when no run qualifies.
double envelope_coefficient(std::span<const RunResult> results, double exponent_m);
inline double envelope_coefficient(const SweepResult& s, double m) { return envelope_coefficient(s.results, m); }

/// Re-runs the given results on a grid refined by `factor`.
std::vector<RunResult> recheck(std::span<const RunResult> runs, const TimeGrid& grid, std::size_t factor,
                               double operating_field = 0.0, const SweepOptions& options = {});

}  // namespace rpwy
