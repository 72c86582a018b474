#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rpwy/sector_basis.hpp"
#include "rpwy/spin_model.hpp"

namespace rpwy {

/// Uniform grid on [0, t_max_over_k / k].
struct TimeGrid {
  double t_max_over_k = 10.0;
  std::size_t steps = 10000;
  /// States are retained (and coherence evaluated) every `coherence_stride` steps.
  std::size_t coherence_stride = 1;

  /// steps > 0, t_max > 0, stride >= 1 and stride divides steps.
  void validate() const;

  double t_max(double rate_k) const noexcept { return t_max_over_k / rate_k; }
  double dt(double rate_k) const noexcept { return t_max(rate_k) / static_cast<double>(steps); }

  /// Same span with `factor` times the steps (stride scaled alike).
  TimeGrid refined(std::size_t factor) const;
};

/// Called at every stride point, in time order, with the normalized state in sector blocks.
using StateObserver = std::function<void(std::size_t step, const SectorBlocks& state)>;

struct PropagationOptions {
  bool keep_states = true;
  StateObserver observer;
};

/// Result of one propagation of the trace-preserving master equation for rho~_t.
struct Trajectory {
  TimeGrid grid;
  RadicalPairModel model;
  double field_b = 0.0;
  /// Tr{rho~_t Q_S} at each of the steps + 1 grid points.
  std::vector<double> p_singlet;
  /// Grid indices and states retained at the stride points (empty unless keep_states).
  std::vector<std::size_t> state_steps;
  std::vector<SectorBlocks> states;
  std::shared_ptr<const SectorBasis> basis;
  /// Largest |Tr - 1| seen before renormalization.
  double max_trace_drift = 0.0;

  double dt() const noexcept { return grid.dt(model.rate_k); }
  double time(std::size_t step) const noexcept { return static_cast<double>(step) * dt(); }
  /// Reaction weight k e^{-kt}.
  double weight(std::size_t step) const;
  /// Retained state i in the product basis.
  DensityMatrix state(std::size_t i) const;
};

/// Integrates d rho~/dt = -i[H_B, rho~] - kappa_ST (Q_S rho~ + rho~ Q_S - 2 Q_S rho~ Q_S)
/// from rho_0 = Q_S / Tr{Q_S} with classical RK4 at the grid step. Each step is re-Hermitized
/// and trace-renormalized. Throws NumericalError on non-finite entries or trace drift > 1e-8.
Trajectory propagate(const RadicalPairModel& model, double field_b, const TimeGrid& grid,
                     const PropagationOptions& options = {});

/// Trapezoidal integral of k e^{-kt} f(t) over samples spaced `spacing` apart from t = 0.
double reaction_integral(std::span<const double> samples, double spacing, double rate_k);

struct YieldStats {
  double yield = 0.0;        // Y
  double uncertainty = 0.0;  // delta Y
  double derivative = 0.0;   // |dY/dB|
};

double singlet_yield(const Trajectory& traj);
double triplet_yield(const Trajectory& traj);
/// delta Y = [ int k e^{-kt} p (1 - p) dt ]^{1/2}
double yield_uncertainty(const Trajectory& traj);
/// |Y(B = k) - Y(B = 0)| / k, from two propagations.
double yield_derivative(const RadicalPairModel& model, const TimeGrid& grid);

}  // namespace rpwy
