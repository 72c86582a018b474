#include "rpwy/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

using RealMatrix = Eigen::MatrixXd;

// The isotropic Hamiltonian is real symmetric in the coupled basis, so a Hermitian block
// rho = R + iI splits into a symmetric R and an antisymmetric I and the generator acts as
//   dR/dt = (H I) + (H I)^T - kappa M.R
//   dI/dt = (H R)^T - (H R) - kappa M.I
// with M the mask of singlet-triplet (off-diagonal block) entries.
struct BlockIntegrator {
  RealMatrix h;
  RealMatrix st_mask;  // kappa folded in
  std::vector<Eigen::Index> singlet_diag;

  RealMatrix re, im;
  RealMatrix k_re[4], k_im[4];
  RealMatrix tmp_re, tmp_im, prod;

  void rhs(const RealMatrix& r, const RealMatrix& i, RealMatrix& out_r, RealMatrix& out_i) {
    prod.noalias() = h * i;
    out_r = prod + prod.transpose();
    prod.noalias() = h * r;
    out_i = prod.transpose() - prod;
    out_r -= st_mask.cwiseProduct(r);
    out_i -= st_mask.cwiseProduct(i);
  }

  void step(double dt) {
    rhs(re, im, k_re[0], k_im[0]);
    tmp_re = re + (0.5 * dt) * k_re[0];
    tmp_im = im + (0.5 * dt) * k_im[0];
    rhs(tmp_re, tmp_im, k_re[1], k_im[1]);
    tmp_re = re + (0.5 * dt) * k_re[1];
    tmp_im = im + (0.5 * dt) * k_im[1];
    rhs(tmp_re, tmp_im, k_re[2], k_im[2]);
    tmp_re = re + dt * k_re[2];
    tmp_im = im + dt * k_im[2];
    rhs(tmp_re, tmp_im, k_re[3], k_im[3]);
    re += (dt / 6.0) * (k_re[0] + 2.0 * k_re[1] + 2.0 * k_re[2] + k_re[3]);
    im += (dt / 6.0) * (k_im[0] + 2.0 * k_im[1] + 2.0 * k_im[2] + k_im[3]);
    // re-Hermitize
    tmp_re = 0.5 * (re + re.transpose());
    re.swap(tmp_re);
    tmp_im = 0.5 * (im - im.transpose());
    im.swap(tmp_im);
  }

  double trace() const { return re.trace(); }

  double singlet_population() const {
    double p = 0.0;
    for (auto k : singlet_diag) p += re(k, k);
    return p;
  }

  Operator state() const {
    Operator out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
  }
};

void check_finite(const std::vector<BlockIntegrator>& blocks, std::size_t step) {
  bool finite = true;
  double max_entry = 0.0;
  for (const auto& b : blocks) {
    if (!b.re.allFinite() || !b.im.allFinite()) finite = false;
    if (b.re.size()) max_entry = std::max({max_entry, b.re.cwiseAbs().maxCoeff(), b.im.cwiseAbs().maxCoeff()});
  }
  if (!finite) {
    std::ostringstream msg;
    msg << "non-finite state at step " << step << " (max finite entry " << max_entry << ")";
    throw NumericalError(msg.str());
  }
}

SectorBlocks snapshot(const std::vector<BlockIntegrator>& blocks) {
  SectorBlocks out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(b.state());
  return out;
}

}  // namespace

void TimeGrid::validate() const {
  if (!(std::isfinite(t_max_over_k) && t_max_over_k > 0.0)) throw ValidationError("t_max must be > 0");
  if (steps == 0) throw ValidationError("steps must be > 0");
  if (coherence_stride == 0) throw ValidationError("coherence stride must be >= 1");
  if (steps % coherence_stride != 0) throw ValidationError("coherence stride must divide the step count");
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
  TimeGrid g = *this;
  g.steps *= factor;
  g.coherence_stride *= factor;
  return g;
}

double Trajectory::weight(std::size_t step) const {
  return model.rate_k * std::exp(-model.rate_k * time(step));
}

DensityMatrix Trajectory::state(std::size_t i) const { return DensityMatrix(basis->to_product(states.at(i))); }

Trajectory propagate(const RadicalPairModel& model, double field_b, const TimeGrid& grid,
                     const PropagationOptions& options) {
  validate(model);
  grid.validate();
  if (!std::isfinite(field_b)) throw ValidationError("field B must be finite");

  Trajectory traj;
  traj.grid = grid;
  traj.model = model;
  traj.field_b = field_b;
  traj.basis = std::make_shared<const SectorBasis>(model);
  const SectorBasis& basis = *traj.basis;

  const SectorBlocks h_blocks = basis.to_blocks(build_hamiltonian(model, field_b));
  const double d_nuc = static_cast<double>(model.nuclear_dim());

  std::vector<BlockIntegrator> blocks(basis.num_sectors());
  for (std::size_t s = 0; s < basis.num_sectors(); ++s) {
    const Sector& sec = basis.sectors()[s];
    const auto m = static_cast<Eigen::Index>(sec.size());
    auto& b = blocks[s];
    if (h_blocks[s].imag().cwiseAbs().maxCoeff() > 1e-14) {
      throw NumericalError("Hamiltonian block is not real in the coupled basis");
    }
    b.h = h_blocks[s].real();
    b.st_mask = RealMatrix::Zero(m, m);
    b.re = RealMatrix::Zero(m, m);
    b.im = RealMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (sec.singlet[static_cast<std::size_t>(i)]) {
        b.singlet_diag.push_back(i);
        b.re(i, i) = 1.0 / d_nuc;
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        if (sec.singlet[static_cast<std::size_t>(i)] != sec.singlet[static_cast<std::size_t>(j)]) {
          b.st_mask(i, j) = model.kappa_st;
        }
      }
    }
  }

  const double dt = grid.dt(model.rate_k);
  traj.p_singlet.reserve(grid.steps + 1);

  auto record = [&](std::size_t step) {
    double p = 0.0;
    for (const auto& b : blocks) p += b.singlet_population();
    traj.p_singlet.push_back(p);
    if (step % grid.coherence_stride != 0) return;
    if (!options.keep_states && !options.observer) return;
    SectorBlocks snap = snapshot(blocks);
    if (options.observer) options.observer(step, snap);
    if (options.keep_states) {
      traj.state_steps.push_back(step);
      traj.states.push_back(std::move(snap));
    }
  };

  record(0);
  for (std::size_t step = 1; step <= grid.steps; ++step) {
    double tr = 0.0;
    for (auto& b : blocks) {
      b.step(dt);
      tr += b.trace();
    }
    if (!std::isfinite(tr)) check_finite(blocks, step);
    const double drift = std::abs(tr - 1.0);
    traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    if (drift > 1e-8) {
      check_finite(blocks, step);
      throw NumericalError("trace drift " + std::to_string(drift) + " at step " + std::to_string(step));
    }
    for (auto& b : blocks) {
      b.re /= tr;
      b.im /= tr;
    }
    record(step);
  }
  return traj;
}

double reaction_integral(std::span<const double> samples, double spacing, double rate_k) {
  if (samples.size() < 2) return 0.0;
  double sum = 0.0;
  const std::size_t last = samples.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double w = rate_k * std::exp(-rate_k * spacing * static_cast<double>(i));
    const double term = w * samples[i];
    sum += (i == 0 || i == last) ? 0.5 * term : term;
  }
  return sum * spacing;
}

double singlet_yield(const Trajectory& traj) {
  return reaction_integral(traj.p_singlet, traj.dt(), traj.model.rate_k);
}

double triplet_yield(const Trajectory& traj) {
  std::vector<double> q(traj.p_singlet.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = 1.0 - traj.p_singlet[i];
  return reaction_integral(q, traj.dt(), traj.model.rate_k);
}

double yield_uncertainty(const Trajectory& traj) {
  std::vector<double> var(traj.p_singlet.size());
  for (std::size_t i = 0; i < var.size(); ++i) {
    const double p = traj.p_singlet[i];
    var[i] = p * (1.0 - p);
  }
  return std::sqrt(std::max(0.0, reaction_integral(var, traj.dt(), traj.model.rate_k)));
}

double yield_derivative(const RadicalPairModel& model, const TimeGrid& grid) {
  PropagationOptions light;
  light.keep_states = false;
  const double y0 = singlet_yield(propagate(model, 0.0, grid, light));
  const double y1 = singlet_yield(propagate(model, model.rate_k, grid, light));
  return std::abs(y1 - y0) / model.rate_k;
}

}  // namespace rpwy
