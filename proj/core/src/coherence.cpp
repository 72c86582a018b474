#include "rpwy/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

// Square roots of a Hermitian spectrum. Eigenvalues at the roundoff level of the solver
// (|lambda| <= 8 d eps scale) are set to zero: sqrt would amplify that noise to ~1e-8.
Eigen::VectorXd spectrum_roots(const Eigen::VectorXd& ev, double scale) {
  const double top = std::max(0.0, scale);
  const double floor = 8.0 * static_cast<double>(ev.size()) * std::numeric_limits<double>::epsilon() * top;
  return ev.unaryExpr([floor](double l) { return l <= floor ? 0.0 : std::sqrt(l); });
}

}  // namespace

Operator matrix_sqrt_psd(const Operator& rho) {
  if (rho.rows() != rho.cols()) throw ValidationError("matrix_sqrt_psd: matrix must be square");
  if (rho.size() == 0) return rho;
  const Eigen::SelfAdjointEigenSolver<Operator> eig(rho);
  if (eig.info() != Eigen::Success) throw NumericalError("matrix_sqrt_psd: eigendecomposition failed");
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-6) {
    throw NumericalError("matrix_sqrt_psd: eigenvalue " + std::to_string(min_eig) + " is below -1e-6");
  }
  const Eigen::VectorXd roots = spectrum_roots(eig.eigenvalues(), eig.eigenvalues().maxCoeff());
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

double wy_skew_information_from_sqrt(const Operator& sqrt_rho, const Operator& a) {
  if (a.rows() != sqrt_rho.rows() || a.cols() != sqrt_rho.cols()) {
    throw ValidationError("wy_skew_information: dimension mismatch");
  }
  const Operator comm = sqrt_rho * a - a * sqrt_rho;
  const double value = -0.5 * (comm * comm).trace().real();
  return std::max(0.0, value);
}

double wy_skew_information(const DensityMatrix& rho, const Operator& a) {
  if (a.rows() != static_cast<Eigen::Index>(rho.dim()) || a.cols() != a.rows()) {
    throw ValidationError("wy_skew_information: dimension mismatch");
  }
  return wy_skew_information_from_sqrt(matrix_sqrt_psd(rho), a);
}

double st_coherence(const DensityMatrix& rho, const Operator& q_singlet, const Operator& q_triplet) {
  const Operator root = matrix_sqrt_psd(rho);
  const double i_s = wy_skew_information_from_sqrt(root, q_singlet);
  const double i_t = wy_skew_information_from_sqrt(root, q_triplet);
  if (std::abs(i_s - i_t) > 1e-10) {
    throw NumericalError("I_WY(rho, Q_S) and I_WY(rho, Q_T) differ by " + std::to_string(std::abs(i_s - i_t)));
  }
  return i_s + i_t;
}

double st_coherence(const SectorBlocks& rho, const SectorBasis& basis) {
  if (rho.size() != basis.num_sectors()) throw ValidationError("st_coherence: block count mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s < rho.size(); ++s) {
    const auto& flags = basis.sectors()[s].singlet;
    const Operator root = matrix_sqrt_psd(rho[s]);
    for (Eigen::Index i = 0; i < root.rows(); ++i) {
      if (!flags[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = 0; j < root.cols(); ++j) {
        if (!flags[static_cast<std::size_t>(j)]) total += std::norm(root(i, j));
      }
    }
  }
  return 2.0 * total;
}

BlockCoherenceEvaluator::BlockCoherenceEvaluator(std::shared_ptr<const SectorBasis> basis)
    : basis_(std::move(basis)) {
  solvers_.reserve(basis_->num_sectors());
  for (const auto& sec : basis_->sectors()) solvers_.emplace_back(static_cast<Eigen::Index>(sec.size()));
}

double BlockCoherenceEvaluator::operator()(const SectorBlocks& rho) {
  if (rho.size() != basis_->num_sectors()) throw ValidationError("st_coherence: block count mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s < rho.size(); ++s) {
    const Sector& sec = basis_->sectors()[s];
    const auto n_s = static_cast<Eigen::Index>(sec.singlet_count);
    const auto n_t = static_cast<Eigen::Index>(sec.size()) - n_s;
    if (n_s == 0 || n_t == 0) continue;
    auto& eig = solvers_[s];
    eig.compute(rho[s]);
    if (eig.info() != Eigen::Success) throw NumericalError("st_coherence: eigendecomposition failed");
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -1e-6) {
      throw NumericalError("st_coherence: eigenvalue " + std::to_string(min_eig) + " is below -1e-6");
    }
    // sqrt(rho)_ST = V_S diag(sqrt(lambda)) V_T^dagger; blocks come from a unit-trace state.
    const auto& v = eig.eigenvectors();
    weighted_ = v.topRows(n_s) * spectrum_roots(eig.eigenvalues(), 1.0).asDiagonal();
    cross_.noalias() = weighted_ * v.bottomRows(n_t).adjoint();
    total += cross_.squaredNorm();
  }
  return 2.0 * total;
}

namespace {

CoherenceRecord integrate(const Trajectory& traj, std::vector<std::size_t> steps, std::vector<double> values) {
  CoherenceRecord rec;
  rec.grid = traj.grid;
  rec.steps = std::move(steps);
  rec.c_st_instant = std::move(values);
  const double spacing = traj.dt() * static_cast<double>(traj.grid.coherence_stride);
  rec.c_st_avg = reaction_integral(rec.c_st_instant, spacing, traj.model.rate_k);
  return rec;
}

void require_states(const Trajectory& traj) {
  if (traj.states.empty() || traj.state_steps.size() != traj.grid.steps / traj.grid.coherence_stride + 1) {
    throw ValidationError("reaction_averaged_coherence: trajectory did not retain its stride states");
  }
}

}  // namespace

CoherenceRecord reaction_averaged_coherence(const Trajectory& traj, const Operator& q_singlet,
                                            const Operator& q_triplet) {
  require_states(traj);
  std::vector<double> values;
  values.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    values.push_back(st_coherence(traj.state(i), q_singlet, q_triplet));
  }
  return integrate(traj, traj.state_steps, std::move(values));
}

CoherenceRecord reaction_averaged_coherence(const Trajectory& traj) {
  require_states(traj);
  std::vector<double> values;
  values.reserve(traj.states.size());
  BlockCoherenceEvaluator evaluate(traj.basis);
  for (const auto& s : traj.states) values.push_back(evaluate(s));
  return integrate(traj, traj.state_steps, std::move(values));
}

CoherenceAccumulator::CoherenceAccumulator(std::shared_ptr<const SectorBasis> basis) : evaluate_(std::move(basis)) {}

StateObserver CoherenceAccumulator::observer() {
  return [this](std::size_t step, const SectorBlocks& state) {
    steps_.push_back(step);
    values_.push_back(evaluate_(state));
  };
}

CoherenceRecord CoherenceAccumulator::finish(const Trajectory& traj) const {
  if (values_.size() != traj.grid.steps / traj.grid.coherence_stride + 1) {
    throw ValidationError("CoherenceAccumulator: observer did not see every stride point");
  }
  return integrate(traj, steps_, values_);
}

double basis_wy_coherence(const DensityMatrix& rho) {
  const Operator root = matrix_sqrt_psd(rho);
  const auto d = root.rows();
  double total = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    Operator proj = Operator::Zero(d, d);
    proj(j, j) = 1.0;
    total += wy_skew_information_from_sqrt(root, proj);
  }
  return total;
}

QubitL1Example qubit_l1_example(Complex c1, Complex c2, double a1, double a2) {
  const double norm = std::norm(c1) + std::norm(c2);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw ValidationError("qubit_l1_example: |c1|^2 + |c2|^2 = " + std::to_string(norm) + ", expected 1");
  }
  QubitL1Example out;
  out.l1 = 2.0 * std::abs(c1 * c2);
  out.uncertainty = 0.5 * std::abs(a1 - a2) * out.l1;
  return out;
}

}  // namespace rpwy
