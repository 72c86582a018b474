#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rpwy/coherence.hpp"
#include "rpwy/dynamics.hpp"
#include "rpwy/errors.hpp"
#include "support/oracle.hpp"

namespace rpwy {
namespace {

using testing::random_hermitian;
using testing::random_mixed_state;
using testing::random_pure_state;

RadicalPairModel nuclei(std::size_t n) {
  RadicalPairModel m;
  for (std::size_t j = 0; j < n; ++j) m.nuclei.push_back({1.0, Site::Donor});
  return m;
}

DensityMatrix projector_state(Eigen::Index d, Eigen::Index k) {
  Operator rho = Operator::Zero(d, d);
  rho(k, k) = 1.0;
  return DensityMatrix(rho);
}

TEST(MatrixSqrt, IdentityAndProjectors) {
  const Operator id = Operator::Identity(8, 8);
  EXPECT_LT((matrix_sqrt_psd(id / 8.0) - id / std::sqrt(8.0)).cwiseAbs().maxCoeff(), 1e-14);
  std::mt19937_64 gen(1);
  const DensityMatrix pure = random_pure_state(gen, 6);
  EXPECT_LT((matrix_sqrt_psd(pure) - pure.matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MatrixSqrt, ReconstructsRandomStates) {
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 50; ++rep) {
    const DensityMatrix rho = random_mixed_state(gen, 16);
    const Operator s = matrix_sqrt_psd(rho);
    EXPECT_LT((s * s - rho.matrix()).norm(), 1e-10);
  }
}

TEST(MatrixSqrt, ClampsRoundoffRejectsNegative) {
  Operator nearly = Operator::Zero(2, 2);
  nearly(0, 0) = 1.0 + 1e-9;
  nearly(1, 1) = -1e-9;
  const Operator s = matrix_sqrt_psd(nearly);
  EXPECT_EQ(s(1, 1), 0.0);
  Operator bad = nearly;
  bad(1, 1) = -1e-3;
  EXPECT_THROW(matrix_sqrt_psd(bad), NumericalError);
}

TEST(SkewInformation, VanishesForCommutingObservables) {
  std::mt19937_64 gen(3);
  Operator diag = Operator::Zero(4, 4);
  diag.diagonal() << 0.1, 0.2, 0.3, 0.4;
  Operator a = Operator::Zero(4, 4);
  a.diagonal() << 1.0, -2.0, 0.5, 3.0;
  EXPECT_NEAR(wy_skew_information(DensityMatrix(diag), a), 0.0, 1e-15);
  const DensityMatrix rho = random_mixed_state(gen, 4);
  EXPECT_NEAR(wy_skew_information(rho, Operator::Identity(4, 4)), 0.0, 1e-14);
}

TEST(SkewInformation, PureStatesSaturateVariance) {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 100; ++rep) {
    const DensityMatrix psi = random_pure_state(gen, 8);
    const Operator a = random_hermitian(gen, 8);
    EXPECT_NEAR(wy_skew_information(psi, a), psi.variance(a), 1e-10);
  }
}

TEST(SkewInformation, BoundedByVariance) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 500; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rep % 15);
    const DensityMatrix rho = random_mixed_state(gen, d, 1 + rep % static_cast<int>(d));
    const Operator a = random_hermitian(gen, d);
    const double i = wy_skew_information(rho, a);
    EXPECT_GE(i, 0.0);
    EXPECT_LE(i, rho.variance(a) + 1e-9);
  }
}

TEST(StCoherence, InitialStateIsIncoherent) {
  for (std::size_t n = 0; n <= 3; ++n) {
    const auto m = nuclei(n);
    const auto q = build_singlet_projector(m);
    EXPECT_NEAR(st_coherence(initial_state(m), q.singlet, q.triplet), 0.0, 1e-14);
  }
}

TEST(StCoherence, SingletPlusTripletZeroIsMaximal) {
  // (|S> + |T0>)/sqrt 2 = |up down>, index 1 in the electron product basis.
  const auto m = nuclei(0);
  const auto q = build_singlet_projector(m);
  const DensityMatrix rho = projector_state(4, 1);
  EXPECT_NEAR(wy_skew_information(rho, q.singlet), 0.25, 1e-12);
  EXPECT_NEAR(st_coherence(rho, q.singlet, q.triplet), 0.5, 1e-10);
}

TEST(StCoherence, MaximallyMixedHasUncertaintyWithoutCoherence) {
  for (std::size_t n = 0; n <= 2; ++n) {
    const auto m = nuclei(n);
    const auto q = build_singlet_projector(m);
    const auto d = static_cast<Eigen::Index>(m.dim());
    const DensityMatrix rho(Operator::Identity(d, d) / static_cast<double>(d));
    EXPECT_NEAR(st_coherence(rho, q.singlet, q.triplet), 0.0, 1e-14);
    EXPECT_NEAR(2.0 * rho.variance(q.singlet), 0.375, 1e-14);
  }
}

TEST(StCoherence, RandomStatesObeyBoundAndSymmetry) {
  std::mt19937_64 gen(6);
  const auto m = nuclei(1);
  const auto q = build_singlet_projector(m);
  for (int rep = 0; rep < 100; ++rep) {
    const DensityMatrix mixed = random_mixed_state(gen, 8, 1 + rep % 8);
    EXPECT_NEAR(wy_skew_information(mixed, q.singlet), wy_skew_information(mixed, q.triplet), 1e-10);
    const double c = st_coherence(mixed, q.singlet, q.triplet);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 2.0 * mixed.variance(q.singlet) + 1e-9);
    EXPECT_LE(c, 0.5 + 1e-12);
    const DensityMatrix pure = random_pure_state(gen, 8);
    EXPECT_NEAR(st_coherence(pure, q.singlet, q.triplet), 2.0 * pure.variance(q.singlet), 1e-10);
  }
}

TEST(StCoherence, InvariantUnderBlockUnitaries) {
  std::mt19937_64 gen(7);
  const auto m = nuclei(2);
  const auto q = build_singlet_projector(m);
  const Eigen::SelfAdjointEigenSolver<Operator> eig(q.singlet);
  const Eigen::Index d = q.singlet.rows(), dn = 4;
  const Operator vt = eig.eigenvectors().leftCols(d - dn), vs = eig.eigenvectors().rightCols(dn);
  for (int rep = 0; rep < 20; ++rep) {
    const Operator us = (Complex(0, 1) * random_hermitian(gen, dn)).exp();
    const Operator ut = (Complex(0, 1) * random_hermitian(gen, d - dn)).exp();
    const Operator u = vs * us * vs.adjoint() + vt * ut * vt.adjoint();
    EXPECT_LT((u * q.singlet - q.singlet * u).cwiseAbs().maxCoeff(), 1e-12);
    const DensityMatrix rho = random_mixed_state(gen, d);
    const DensityMatrix rotated(u * rho.matrix() * u.adjoint());
    EXPECT_NEAR(st_coherence(rotated, q.singlet, q.triplet), st_coherence(rho, q.singlet, q.triplet), 1e-10);
  }
}

TEST(StCoherence, BlockPathMatchesDense) {
  RadicalPairModel m;
  m.nuclei = {{2.0, Site::Donor}, {0.7, Site::Acceptor}};
  m.exchange = 1.3;
  m.kappa_st = 0.5;
  const auto traj = propagate(m, 0.4, TimeGrid{10.0, 1000, 100});
  const auto q = build_singlet_projector(m);
  BlockCoherenceEvaluator eval(traj.basis);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double dense = st_coherence(traj.state(i), q.singlet, q.triplet);
    EXPECT_NEAR(st_coherence(traj.states[i], *traj.basis), dense, 1e-12);
    EXPECT_NEAR(eval(traj.states[i]), dense, 1e-12);
  }
}

TEST(ReactionAveraged, FastAndGenericAgree) {
  RadicalPairModel m;
  m.nuclei = {{4.0, Site::Donor}};
  m.exchange = -2.0;
  m.kappa_st = 1.0;
  const TimeGrid grid{10.0, 2000, 10};
  const auto traj = propagate(m, 0.0, grid);
  const auto q = build_singlet_projector(m);
  const auto generic = reaction_averaged_coherence(traj, q.singlet, q.triplet);
  const auto fast = reaction_averaged_coherence(traj);
  ASSERT_EQ(generic.c_st_instant.size(), 201u);
  EXPECT_NEAR(fast.c_st_avg, generic.c_st_avg, 1e-12);
  for (std::size_t i = 0; i < fast.c_st_instant.size(); ++i) {
    EXPECT_NEAR(fast.c_st_instant[i], generic.c_st_instant[i], 1e-12);
    EXPECT_LE(fast.c_st_instant[i], 0.5 + 1e-8);
  }

  CoherenceAccumulator acc(std::make_shared<SectorBasis>(m));
  const auto streamed = propagate(m, 0.0, grid, {.keep_states = false, .observer = acc.observer()});
  EXPECT_DOUBLE_EQ(acc.finish(streamed).c_st_avg, fast.c_st_avg);
}

TEST(ReactionAveraged, ZeroHamiltonianGivesZero) {
  RadicalPairModel m = nuclei(1);
  m.nuclei[0].coupling = 0.0;
  m.kappa_st = 3.0;
  const auto traj = propagate(m, 0.0, TimeGrid{10.0, 200, 1});
  EXPECT_NEAR(reaction_averaged_coherence(traj).c_st_avg, 0.0, 1e-14);
}

TEST(ReactionAveraged, NoNucleiSaturates) {
  RadicalPairModel m;
  m.exchange = 3.0;
  const auto traj = propagate(m, 1.5, TimeGrid{});
  EXPECT_NEAR(reaction_averaged_coherence(traj).c_st_avg, 2.0 * std::pow(yield_uncertainty(traj), 2), 1e-9);
}

TEST(ReactionAveraged, RandomOneNucleusModelsObeyBound) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    RadicalPairModel m = nuclei(1);
    m.nuclei[0].coupling = 10.0 * u(gen);
    m.exchange = 20.0 * u(gen) - 10.0;
    m.kappa_st = 5.0 * u(gen);
    const auto traj = propagate(m, 0.0, TimeGrid{});
    const double c = reaction_averaged_coherence(traj).c_st_avg;
    EXPECT_LE(c, 2.0 * std::pow(yield_uncertainty(traj), 2) + 1e-3);
    EXPECT_LE(c, 0.5 + 1e-8);
  }
}

TEST(ReactionAveraged, RequiresStates) {
  const auto traj = propagate(nuclei(1), 0.0, TimeGrid{10.0, 100, 1}, {.keep_states = false});
  EXPECT_THROW(reaction_averaged_coherence(traj), ValidationError);
}

TEST(BasisCoherence, DiagonalAndQubit) {
  Operator diag = Operator::Zero(3, 3);
  diag.diagonal() << 0.2, 0.3, 0.5;
  EXPECT_NEAR(basis_wy_coherence(DensityMatrix(diag)), 0.0, 1e-15);
  Operator plus = Operator::Constant(2, 2, 0.5);
  EXPECT_NEAR(basis_wy_coherence(DensityMatrix(plus)), 0.5, 1e-12);
}

TEST(BasisCoherence, GapWeightedChain) {
  // (min gap)^2 C[rho] <= 2 I_WY(rho, A) <= 2 (Delta A)^2 for A diagonal in the basis.
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 500; ++rep) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rep % 6);
    std::vector<double> spectrum(static_cast<std::size_t>(d));
    for (auto& a : spectrum) a = u(gen);
    std::sort(spectrum.begin(), spectrum.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < spectrum.size(); ++j) gap = std::min(gap, spectrum[j] - spectrum[j - 1]);
    if (gap < 1e-3) continue;
    Operator a = Operator::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) a(j, j) = spectrum[static_cast<std::size_t>(j)];
    const DensityMatrix rho = random_mixed_state(gen, d, 1 + rep % static_cast<int>(d));
    const double c = basis_wy_coherence(rho);
    EXPECT_LE(gap * gap * c, 2.0 * wy_skew_information(rho, a) + 1e-12);
    EXPECT_LE(gap * gap * c, 2.0 * rho.variance(a) + 1e-9);
  }
}

TEST(QubitL1, Examples) {
  auto r = qubit_l1_example(1.0, 0.0, 0.0, 1.0);
  EXPECT_NEAR(r.uncertainty, 0.0, 1e-15);
  EXPECT_NEAR(r.l1, 0.0, 1e-15);
  r = qubit_l1_example(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 1.0);
  EXPECT_NEAR(r.uncertainty, 0.5, 1e-15);
  EXPECT_NEAR(r.l1, 1.0, 1e-15);
  r = qubit_l1_example(std::sqrt(3.0) / 2.0, 0.5, -1.0, 1.0);
  EXPECT_NEAR(r.uncertainty, std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(r.l1, std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(QubitL1, MatchesDirectStandardDeviation) {
  std::mt19937_64 gen(10);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector2cd psi(Complex(n(gen), n(gen)), Complex(n(gen), n(gen)));
    psi.normalize();
    const double a1 = n(gen), a2 = n(gen);
    Operator a = Operator::Zero(2, 2);
    a(0, 0) = a1;
    a(1, 1) = a2;
    const DensityMatrix rho(psi * psi.adjoint());
    EXPECT_NEAR(qubit_l1_example(psi[0], psi[1], a1, a2).uncertainty, std::sqrt(rho.variance(a)), 1e-12);
  }
}

TEST(QubitL1, RejectsUnnormalized) {
  EXPECT_THROW(qubit_l1_example(1.0, 1.0, 0.0, 1.0), ValidationError);
}

}  // namespace
}  // namespace rpwy
