#include "rpwy/spin_model.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

struct PauliHalf {
  Eigen::Matrix2cd x, y, z;
};

PauliHalf spin_half() {
  const Complex i{0.0, 1.0};
  PauliHalf s;
  s.x << 0.0, 0.5, 0.5, 0.0;
  s.y << 0.0, -0.5 * i, 0.5 * i, 0.0;
  s.z << 0.5, 0.0, 0.0, -0.5;
  return s;
}

// Place a 2x2 factor at position `slot` of an n-fold tensor product of spin-1/2 spaces.
Operator lift(const Eigen::Matrix2cd& factor, std::size_t slot, std::size_t num_slots) {
  Operator out = Operator::Identity(1, 1);
  for (std::size_t k = 0; k < num_slots; ++k) {
    Operator next;
    if (k == slot) {
      next = Eigen::kroneckerProduct(out, factor).eval();
    } else {
      next = Eigen::kroneckerProduct(out, Eigen::Matrix2cd::Identity()).eval();
    }
    out = std::move(next);
  }
  return out;
}

SpinVector lift_vector(std::size_t slot, std::size_t num_slots) {
  const PauliHalf s = spin_half();
  return {lift(s.x, slot, num_slots), lift(s.y, slot, num_slots), lift(s.z, slot, num_slots)};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void validate(const RadicalPairModel& model) {
  require(model.nuclei.size() <= kMaxNuclei,
          "too many nuclei: " + std::to_string(model.nuclei.size()) + " (cap is " +
              std::to_string(kMaxNuclei) + ")");
  for (std::size_t j = 0; j < model.nuclei.size(); ++j) {
    const auto& n = model.nuclei[j];
    require(std::isfinite(n.coupling) && n.coupling >= 0.0,
            "nucleus " + std::to_string(j + 1) + ": coupling must be finite and >= 0");
    require(n.spin == 0.5, "nucleus " + std::to_string(j + 1) + ": only spin-1/2 nuclei are supported");
  }
  require(std::isfinite(model.exchange), "exchange J must be finite");
  require(std::isfinite(model.kappa_st) && model.kappa_st >= 0.0, "kappa_st must be finite and >= 0");
  require(std::isfinite(model.rate_k) && model.rate_k > 0.0, "recombination rate k must be > 0");
}

SpinOperators build_spin_operators(const RadicalPairModel& model) {
  validate(model);
  const std::size_t slots = 2 + model.num_nuclei();
  SpinOperators ops;
  ops.electron1 = lift_vector(0, slots);
  ops.electron2 = lift_vector(1, slots);
  ops.nuclei.reserve(model.num_nuclei());
  for (std::size_t j = 0; j < model.num_nuclei(); ++j) ops.nuclei.push_back(lift_vector(2 + j, slots));
  return ops;
}

Operator dot(const SpinVector& a, const SpinVector& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Projectors build_singlet_projector(const RadicalPairModel& model) {
  const SpinOperators ops = build_spin_operators(model);
  const auto d = static_cast<Eigen::Index>(model.dim());
  Projectors p;
  p.singlet = 0.25 * Operator::Identity(d, d) - dot(ops.electron1, ops.electron2);
  p.triplet = Operator::Identity(d, d) - p.singlet;
  return p;
}

Operator build_hamiltonian(const RadicalPairModel& model, const SpinOperators& spins, double field_b) {
  validate(model);
  const auto d = static_cast<Eigen::Index>(model.dim());
  Operator h = Operator::Zero(d, d);
  for (std::size_t j = 0; j < model.num_nuclei(); ++j) {
    const auto& n = model.nuclei[j];
    const SpinVector& electron = n.site == Site::Donor ? spins.electron1 : spins.electron2;
    h += n.coupling * dot(electron, spins.nuclei[j]);
  }
  h += field_b * (spins.electron1.z + spins.electron2.z);
  h += model.exchange * dot(spins.electron1, spins.electron2);
  return h;
}

Operator build_hamiltonian(const RadicalPairModel& model, double field_b) {
  return build_hamiltonian(model, build_spin_operators(model), field_b);
}

Operator total_spin_z(const SpinOperators& spins) {
  Operator jz = spins.electron1.z + spins.electron2.z;
  for (const auto& n : spins.nuclei) jz += n.z;
  return jz;
}

double hermiticity_defect(const Operator& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(Operator entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw ValidationError("density matrix must be square");
}

double DensityMatrix::expectation(const Operator& a) const {
  if (a.rows() != entries_.rows() || a.cols() != entries_.cols()) {
    throw ValidationError("operator dimension does not match density matrix");
  }
  return (entries_ * a).trace().real();
}

double DensityMatrix::variance(const Operator& a) const {
  const double mean = expectation(a);
  return expectation(a * a) - mean * mean;
}

void DensityMatrix::check_physical(double herm_tol, double trace_tol, double psd_tol) const {
  const double herm = hermiticity_defect(entries_);
  if (!(herm <= herm_tol)) {
    throw NumericalError("density matrix not Hermitian (defect " + std::to_string(herm) + ")");
  }
  if (!(std::abs(trace() - 1.0) <= trace_tol)) {
    throw NumericalError("density matrix trace is " + std::to_string(trace()));
  }
  const Eigen::SelfAdjointEigenSolver<Operator> eig(entries_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -psd_tol) {
    throw NumericalError("density matrix has eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()));
  }
}

DensityMatrix initial_state(const RadicalPairModel& model) {
  Projectors p = build_singlet_projector(model);
  const double tr = p.singlet.trace().real();
  return DensityMatrix(p.singlet / tr);
}

}  // namespace rpwy
