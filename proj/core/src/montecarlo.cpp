#include "rpwy/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "rpwy/coherence.hpp"
#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double draw(std::mt19937_64& gen, const Range& r) { return r.lo + (r.hi - r.lo) * unit_uniform(gen); }

void check_range(const Range& r, const char* name) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi)) {
    throw ValidationError(std::string(name) + " range must be finite with lo <= hi");
  }
}

// Index-ordered parallel map; each job writes only its own slot.
template <typename Job>
void parallel_for(std::size_t n, std::size_t workers, const SweepOptions& options, Job job) {
  workers = std::max<std::size_t>(1, std::min(workers == 0 ? default_workers() : workers, n));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      job(i);
      const std::size_t d = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, n);
      }
    }
  };
  if (workers == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
}

}  // namespace

void SampleSpec::validate() const {
  if (n_nuc < 1 || n_nuc > kMaxNuclei) throw ValidationError("n_nuc must be in 1..4");
  if (runs < 1) throw ValidationError("runs must be >= 1");
  grid.validate();
  check_range(a_range, "a");
  check_range(j_range, "J");
  check_range(kappa_range, "kappa_st");
  if (a_range.lo < 0.0) throw ValidationError("hyperfine couplings must be >= 0");
  if (kappa_range.lo < 0.0) throw ValidationError("kappa_st must be >= 0");
  if (!std::isfinite(operating_field)) throw ValidationError("operating field must be finite");
}

std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (run_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RadicalPairModel sample_model(std::uint64_t seed, std::size_t run_index, const SampleSpec& spec) {
  spec.validate();
  std::mt19937_64 gen(run_seed(seed, run_index));
  RadicalPairModel model;
  model.nuclei.resize(spec.n_nuc);
  for (auto& n : model.nuclei) n.coupling = draw(gen, spec.a_range);
  if (spec.n_nuc >= 2) {
    for (auto& n : model.nuclei) n.site = (gen() >> 63) ? Site::Acceptor : Site::Donor;
  }
  model.exchange = draw(gen, spec.j_range);
  model.kappa_st = draw(gen, spec.kappa_range);
  return model;
}

RunResult run_one(const RadicalPairModel& model, const TimeGrid& grid, double operating_field) {
  RunResult out;
  out.model = model;
  try {
    PropagationOptions light;
    light.keep_states = false;

    auto basis = std::make_shared<const SectorBasis>(model);
    CoherenceAccumulator acc(basis);
    PropagationOptions observed;
    observed.keep_states = false;
    observed.observer = acc.observer();
    const Trajectory at_op = propagate(model, operating_field, grid, observed);

    out.yield = singlet_yield(at_op);
    out.uncertainty = yield_uncertainty(at_op);
    out.c_st = acc.finish(at_op).c_st_avg;

    const double k = model.rate_k;
    const double y_zero = operating_field == 0.0 ? out.yield : singlet_yield(propagate(model, 0.0, grid, light));
    const double y_k = operating_field == k ? out.yield : singlet_yield(propagate(model, k, grid, light));
    out.derivative = std::abs(y_k - y_zero) / k;
    out.ratio = out.derivative == 0.0 ? std::numeric_limits<double>::infinity()
                                      : out.yield * out.uncertainty / out.derivative;
  } catch (const NumericalError& e) {
    out.flag = RunFlag::NumericalFailure;
    out.message = e.what();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.yield = out.uncertainty = out.derivative = out.c_st = out.ratio = nan;
  }
  return out;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("RPWY_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const SampleSpec& spec, const SweepOptions& options) {
  spec.validate();
  SweepResult out;
  out.spec = spec;
  out.results.resize(spec.runs);
  parallel_for(spec.runs, options.workers, options, [&](std::size_t i) {
    RunResult r = run_one(sample_model(spec.seed, i, spec), spec.grid, spec.operating_field);
    r.run_index = i;
    out.results[i] = std::move(r);
  });
  for (const auto& r : out.results) {
    if (r.flag != RunFlag::Ok) out.failures.push_back(r.run_index);
  }
  return out;
}

BoundReport verify_bound(std::span<const RunResult> results, double slack) {
  BoundReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    if (r.flag != RunFlag::Ok) continue;
    const double excess = r.c_st - 2.0 * r.uncertainty * r.uncertainty;
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > slack) rep.violators.push_back(r.run_index);
  }
  return rep;
}

double envelope_coefficient(std::span<const RunResult> results, double exponent_m) {
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& r : results) {
    if (r.flag != RunFlag::Ok || !std::isfinite(r.ratio) || !(r.c_st > 0.0)) continue;
    best = std::min(best, r.ratio * std::pow(r.c_st, exponent_m));
    any = true;
  }
  if (!any) throw ValidationError("envelope_coefficient: no run has a finite ratio and positive C_ST");
  return best;
}

std::vector<RunResult> recheck(std::span<const RunResult> runs, const TimeGrid& grid, std::size_t factor,
                               double operating_field, const SweepOptions& options) {
  const TimeGrid fine = grid.refined(factor);
  std::vector<RunResult> out(runs.size());
  parallel_for(runs.size(), options.workers, options, [&](std::size_t i) {
    out[i] = run_one(runs[i].model, fine, operating_field);
    out[i].run_index = runs[i].run_index;
  });
  return out;
}

}  // namespace rpwy
