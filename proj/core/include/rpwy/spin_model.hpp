#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace rpwy {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

/// Hard cap on the number of spin-1/2 nuclei (d = 64 at the cap).
inline constexpr std::size_t kMaxNuclei = 4;

/// Which electron a nucleus couples to. Electron 1 is the donor radical, electron 2 the acceptor.
enum class Site { Donor, Acceptor };

struct NuclearSpec {
  double coupling = 0.0;  // isotropic hyperfine constant, units of k
  Site site = Site::Donor;
  double spin = 0.5;      // only 1/2 is supported
};

/// Radical pair with isotropic hyperfine couplings, exchange J and singlet-triplet dephasing.
/// Energies and rates are in units of the recombination rate (hbar = 1).
struct RadicalPairModel {
  std::vector<NuclearSpec> nuclei;
  double exchange = 0.0;
  double kappa_st = 0.0;
  double rate_k = 1.0;

  std::size_t num_nuclei() const noexcept { return nuclei.size(); }
  std::size_t nuclear_dim() const noexcept { return std::size_t{1} << nuclei.size(); }
  std::size_t dim() const noexcept { return 4 * nuclear_dim(); }
};

/// Throws ValidationError on negative or non-finite couplings, kappa_st < 0, rate_k <= 0,
/// a nuclear spin other than 1/2, or more than kMaxNuclei nuclei.
void validate(const RadicalPairModel& model);

struct SpinVector {
  Operator x, y, z;
};

/// Spin-1/2 components lifted to the full space. Tensor ordering is
/// electron1 (x) electron2 (x) nucleus1 (x) ... (x) nucleusN, with |up> as index 0 of every factor.
struct SpinOperators {
  SpinVector electron1;
  SpinVector electron2;
  std::vector<SpinVector> nuclei;
};

SpinOperators build_spin_operators(const RadicalPairModel& model);

struct Projectors {
  Operator singlet;  // Q_S = 1/4 - s1.s2
  Operator triplet;  // Q_T = 1 - Q_S
};

Projectors build_singlet_projector(const RadicalPairModel& model);

/// H = sum_j a_j s_site(j).I_j + B (s1z + s2z) + J s1.s2
Operator build_hamiltonian(const RadicalPairModel& model, double field_b);
Operator build_hamiltonian(const RadicalPairModel& model, const SpinOperators& spins, double field_b);

/// Total z angular momentum s1z + s2z + sum_j I_jz.
Operator total_spin_z(const SpinOperators& spins);

/// Dot product a.b of two lifted spin vectors.
Operator dot(const SpinVector& a, const SpinVector& b);

/// Max-abs elementwise distance between A and its adjoint.
double hermiticity_defect(const Operator& a);

/// Hermitian, unit-trace complex matrix. The constructor checks shape only;
/// physicality is checked on demand because intermediate results carry roundoff.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Operator entries);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Operator& matrix() const noexcept { return entries_; }

  double trace() const { return entries_.trace().real(); }
  double expectation(const Operator& a) const;
  double variance(const Operator& a) const;

  /// Throws NumericalError if not Hermitian within herm_tol, trace off by more than
  /// trace_tol, or an eigenvalue below -psd_tol.
  void check_physical(double herm_tol = 1e-10, double trace_tol = 1e-8,
                      double psd_tol = 1e-9) const;

 private:
  Operator entries_;
};

/// rho_0 = Q_S / Tr{Q_S}: electrons in the singlet, nuclei fully mixed.
DensityMatrix initial_state(const RadicalPairModel& model);

}  // namespace rpwy
