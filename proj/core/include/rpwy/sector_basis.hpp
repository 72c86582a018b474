#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rpwy/spin_model.hpp"

namespace rpwy {

/// Block-diagonal matrix over the sectors of a SectorBasis.
using SectorBlocks = std::vector<Operator>;

/// One total-M_z sector of the coupled basis {S, T+, T0, T-} (x) nuclear product states.
struct Sector {
  int twice_mz = 0;
  /// Orthonormal columns expressed in the product basis (d x size).
  Eigen::MatrixXd vectors;
  /// True for basis states whose electron part is the singlet. Singlet states come first.
  std::vector<bool> singlet;
  std::size_t singlet_count = 0;

  std::size_t size() const noexcept { return singlet.size(); }
};

/// Electron singlet/triplet basis tensored with nuclear product states, grouped by total M_z.
///
/// Q_S is diagonal here, and any isotropic-hyperfine Hamiltonian with the field along z is
/// block-diagonal, as is every state reachable from rho_0 under the dephasing master equation.
/// Propagation and singlet-triplet coherence can therefore run independently per block.
class SectorBasis {
 public:
  explicit SectorBasis(const RadicalPairModel& model);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_sectors() const noexcept { return sectors_.size(); }
  const std::vector<Sector>& sectors() const noexcept { return sectors_; }

  /// Per-sector blocks of a product-basis operator. Throws NumericalError if the operator has
  /// weight outside the blocks above tol (scaled by its max entry).
  SectorBlocks to_blocks(const Operator& op, double tol = 1e-12) const;

  /// Reassemble a product-basis operator from blocks.
  Operator to_product(std::span<const Operator> blocks) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Sector> sectors_;
};

}  // namespace rpwy
