#pragma once

#include <utility>
#include <vector>

#include "rpwy/dynamics.hpp"
#include "rpwy/sector_basis.hpp"
#include "rpwy/spin_model.hpp"

namespace rpwy {

/// Square root of a positive semidefinite Hermitian matrix by eigendecomposition.
/// Eigenvalues in [-1e-6, 8 d eps lambda_max] are clamped to zero; anything more negative throws
/// NumericalError.
Operator matrix_sqrt_psd(const Operator& rho);
inline Operator matrix_sqrt_psd(const DensityMatrix& rho) { return matrix_sqrt_psd(rho.matrix()); }

/// Wigner-Yanase skew information I_WY(rho, A) = -1/2 Tr{[sqrt(rho), A]^2}.
double wy_skew_information(const DensityMatrix& rho, const Operator& a);
/// Same, reusing a precomputed sqrt(rho).
double wy_skew_information_from_sqrt(const Operator& sqrt_rho, const Operator& a);

/// Singlet-triplet coherence C_ST[rho] = I_WY(rho, Q_S) + I_WY(rho, Q_T).
/// Throws NumericalError if the two terms differ by more than 1e-10.
double st_coherence(const DensityMatrix& rho, const Operator& q_singlet, const Operator& q_triplet);

/// C_ST of a state given in the blocks of the coupled basis, where Q_S is diagonal:
/// C_ST = 2 sum_{i in S, j in T} |sqrt(rho)_ij|^2, evaluated block by block.
double st_coherence(const SectorBlocks& rho, const SectorBasis& basis);

/// Block C_ST with per-sector eigensolver workspace, for repeated evaluation along a trajectory.
class BlockCoherenceEvaluator {
 public:
  explicit BlockCoherenceEvaluator(std::shared_ptr<const SectorBasis> basis);
  double operator()(const SectorBlocks& rho);

 private:
  std::shared_ptr<const SectorBasis> basis_;
  std::vector<Eigen::SelfAdjointEigenSolver<Operator>> solvers_;
  Operator weighted_;
  Operator cross_;
};

struct CoherenceRecord {
  std::vector<std::size_t> steps;     // grid indices of the samples
  std::vector<double> c_st_instant;   // C_ST[rho~_t] at those indices
  double c_st_avg = 0.0;              // int C_ST[rho~_t] k e^{-kt} dt
  TimeGrid grid;
};

/// Reaction-averaged coherence over the retained states (trapezoid on the stride points).
CoherenceRecord reaction_averaged_coherence(const Trajectory& traj, const Operator& q_singlet,
                                            const Operator& q_triplet);
/// Same integral using the block fast path.
CoherenceRecord reaction_averaged_coherence(const Trajectory& traj);

/// Accumulates C_ST[rho~_t] from a propagation observer without retaining the states.
class CoherenceAccumulator {
 public:
  explicit CoherenceAccumulator(std::shared_ptr<const SectorBasis> basis);

  StateObserver observer();
  /// Integrates what was observed; `traj` supplies the grid and rate.
  CoherenceRecord finish(const Trajectory& traj) const;

 private:
  BlockCoherenceEvaluator evaluate_;
  std::vector<std::size_t> steps_;
  std::vector<double> values_;
};

/// Sum of I_WY(rho, |j><j|) over the computational basis.
double basis_wy_coherence(const DensityMatrix& rho);

struct QubitL1Example {
  double uncertainty = 0.0;  // (Delta A) = (|a1 - a2| / 2) C_1
  double l1 = 0.0;           // C_1 = 2 |c1 c2|
};

/// Two-level pure state c1|1> + c2|2> measured with A = a1|1><1| + a2|2><2|.
QubitL1Example qubit_l1_example(Complex c1, Complex c2, double a1, double a2);

}  // namespace rpwy
