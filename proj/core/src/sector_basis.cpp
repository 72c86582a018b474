#include "rpwy/sector_basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

struct ElectronState {
  int twice_mz;
  bool singlet;
  Eigen::Vector4d amplitudes;  // over |uu>, |ud>, |du>, |dd>
};

std::vector<ElectronState> electron_states() {
  const double r = 1.0 / std::sqrt(2.0);
  return {
      {0, true, Eigen::Vector4d(0.0, r, -r, 0.0)},
      {2, false, Eigen::Vector4d(1.0, 0.0, 0.0, 0.0)},
      {0, false, Eigen::Vector4d(0.0, r, r, 0.0)},
      {-2, false, Eigen::Vector4d(0.0, 0.0, 0.0, 1.0)},
  };
}

}  // namespace

SectorBasis::SectorBasis(const RadicalPairModel& model) : dim_(model.dim()) {
  validate(model);
  const std::size_t n_nuc = model.num_nuclei();
  const std::size_t d_nuc = model.nuclear_dim();

  struct Member {
    std::size_t electron;
    std::size_t nuclear;
  };
  std::map<int, std::vector<Member>> grouped;
  const auto electrons = electron_states();
  for (std::size_t e = 0; e < electrons.size(); ++e) {
    for (std::size_t nuc = 0; nuc < d_nuc; ++nuc) {
      // Bit set means spin down; nucleus 1 is the most significant tensor factor.
      const int down = std::popcount(nuc);
      const int twice_mz = electrons[e].twice_mz + static_cast<int>(n_nuc) - 2 * down;
      grouped[twice_mz].push_back({e, nuc});
    }
  }

  for (const auto& [twice_mz, members] : grouped) {
    Sector s;
    s.twice_mz = twice_mz;
    s.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(members.size()));
    s.singlet.reserve(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
      const auto& m = members[c];
      for (std::size_t ep = 0; ep < 4; ++ep) {
        const double amp = electrons[m.electron].amplitudes[static_cast<Eigen::Index>(ep)];
        if (amp != 0.0) s.vectors(static_cast<Eigen::Index>(ep * d_nuc + m.nuclear), static_cast<Eigen::Index>(c)) = amp;
      }
      s.singlet.push_back(electrons[m.electron].singlet);
      if (electrons[m.electron].singlet) ++s.singlet_count;
    }
    sectors_.push_back(std::move(s));
  }
}

SectorBlocks SectorBasis::to_blocks(const Operator& op, double tol) const {
  if (static_cast<std::size_t>(op.rows()) != dim_ || static_cast<std::size_t>(op.cols()) != dim_) {
    throw ValidationError("operator dimension does not match sector basis");
  }
  SectorBlocks blocks;
  blocks.reserve(sectors_.size());
  for (const auto& s : sectors_) {
    const Operator v = s.vectors.cast<Complex>();
    blocks.push_back(v.adjoint() * op * v);
  }
  const double scale = std::max(1.0, op.size() ? op.cwiseAbs().maxCoeff() : 0.0);
  const double leak = (op - to_product(blocks)).cwiseAbs().maxCoeff();
  if (leak > tol * scale) {
    throw NumericalError("operator is not block-diagonal in total M_z (off-block weight " + std::to_string(leak) + ")");
  }
  return blocks;
}

Operator SectorBasis::to_product(std::span<const Operator> blocks) const {
  if (blocks.size() != sectors_.size()) throw ValidationError("block count does not match sector basis");
  const auto d = static_cast<Eigen::Index>(dim_);
  Operator out = Operator::Zero(d, d);
  for (std::size_t i = 0; i < sectors_.size(); ++i) {
    const Operator v = sectors_[i].vectors.cast<Complex>();
    out += v * blocks[i] * v.adjoint();
  }
  return out;
}

}  // namespace rpwy
