#include <gtest/gtest.h>

#include <cmath>

#include "ngconv/fock.hpp"
#include "ngconv/linalg.hpp"
#include "test_util.hpp"

using namespace ngconv;

TEST(FockSpec, RowMajorIndexing) {
  const FockSpec s({3, 3});
  const int occ[2] = {1, 1};
  EXPECT_EQ(s.index(occ), 4u);
  EXPECT_EQ(s.dim(), 9u);
  EXPECT_EQ(s.stride(0), 3u);
  EXPECT_EQ(s.occupations(7), (std::vector<int>{2, 1}));
  EXPECT_THROW(FockSpec({2, 0}), InvalidArgument);
}

TEST(FockState, BasisVectors) {
  EXPECT_EQ(fock_state(0, 4).amplitudes()(0), Complex(1));
  EXPECT_EQ(fock_state(2, 4).amplitudes()(2), Complex(1));
  const int occ[2] = {1, 1};
  const PureState p = fock_state(occ, FockSpec({3, 3}));
  EXPECT_EQ(p.amplitudes()(4), Complex(1));
  EXPECT_NEAR(p.amplitudes().norm(), 1.0, 1e-15);
}

TEST(FockState, OccupationAtCutoffRejected) {
  try {
    fock_state(4, 4);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_NE(std::string(e.what()).find("cutoff"), std::string::npos);
  }
}

TEST(CoherentState, VacuumAndOverlap) {
  EXPECT_NEAR(std::abs(coherent_state(0.0, 5).amplitudes()(0)), 1.0, 1e-15);
  const PureState a = coherent_state(1.0, 30), b = coherent_state(-1.0, 30);
  EXPECT_NEAR(std::abs(a.amplitudes().dot(b.amplitudes())), std::exp(-2.0), 1e-12);
}

TEST(CoherentState, MeanPhotonNumber) {
  EXPECT_NEAR(mean_photon_number(coherent_state(2.0, 40).density()), 4.0, 1e-9);
}

TEST(CoherentState, CutoffTooSmallNamesMinimum) {
  try {
    coherent_state(2.0, 5);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(minimal_coherent_cutoff(2.0))), std::string::npos);
  }
}

TEST(CatState, ParityAndNorms) {
  const PureState v = cat_state(0.0, +1, 4);
  EXPECT_NEAR(std::abs(v.amplitudes()(0)), 1.0, 1e-15);
  const PureState c = cat_state(2.0, +1, minimal_cat_cutoff(2.0, +1));
  for (Eigen::Index n = 1; n < c.amplitudes().size(); n += 2) EXPECT_LT(std::abs(c.amplitudes()(n)), 1e-12);
  EXPECT_NEAR(cat_norm(1.0, -1), std::sqrt(2.0 * (1.0 - std::exp(-2.0))), 1e-12);
  EXPECT_NEAR(cat_norm(1.0, -1), 1.3150397, 1e-7);
  EXPECT_THROW(cat_state(0.0, -1, 4), InvalidArgument);
}

TEST(CatState, MinimalCutoffCoversOddCats) {
  for (Real z : {0.5, 1.0, 2.0, 3.0})
    for (int sign : {+1, -1}) {
      const int d = minimal_cat_cutoff(z, sign);
      EXPECT_GT(d, static_cast<int>(z * z));
      EXPECT_NO_THROW(cat_state(z, sign, d));
      EXPECT_THROW(cat_state(z, sign, d - 2), TruncationError);
    }
}

TEST(Operators, Annihilation) {
  MatrixXc expect(2, 2);
  expect << 0, 1, 0, 0;
  EXPECT_EQ(annihilation_matrix(2), expect);
  const int d = 6;
  const MatrixXc a = annihilation_matrix(d);
  const MatrixXc n = a.adjoint() * a;
  for (int k = 0; k < d; ++k) EXPECT_NEAR(n(k, k).real(), k, 1e-14);
  const MatrixXc comm = a * a.adjoint() - a.adjoint() * a;
  for (int k = 0; k + 1 < d; ++k) EXPECT_NEAR(comm(k, k).real(), 1.0, 1e-14);
  EXPECT_NEAR(comm(d - 1, d - 1).real(), -(d - 1.0), 1e-14);
}

TEST(Operators, DisplacementIdentities) {
  EXPECT_LT((displacement_operator(0.0, 8) - MatrixXc::Identity(8, 8)).norm(), 1e-14);
  const MatrixXc d = displacement_operator(1.0, 40);
  EXPECT_LT((d.col(0) - coherent_state(1.0, 40).amplitudes()).norm(), 1e-9);
  const MatrixXc prod = d * displacement_operator(-1.0, 40);
  EXPECT_LT((prod.topLeftCorner(20, 20) - MatrixXc::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Operators, DisplacementBlockMatchesExponential) {
  const Complex alpha(0.7, -0.4);
  const MatrixXc exact = displacement_block(alpha, 20, 10);
  const MatrixXc expm = displacement_operator(alpha, 60);
  EXPECT_LT((exact - expm.topLeftCorner(20, 10)).cwiseAbs().maxCoeff(), 1e-9);
  // Columns of D(alpha) are coherent amplitudes at alpha acting on |0>.
  EXPECT_LT((exact.col(0) - coherent_state(alpha, 20, Tolerances{.truncation = 1e-3}).amplitudes()).norm(), 1e-9);
}

TEST(Tensor, KroneckerAndTraces) {
  const PureState t = tensor(fock_state(1, 3), fock_state(0, 4));
  EXPECT_EQ(t.amplitudes()(4), Complex(1));
  auto& g = ngtest::rng(11);
  const DensityMatrix a = ngtest::random_density(3, 2, g), b = ngtest::random_density(4, 3, g);
  const DensityMatrix ab = tensor(a, b);
  EXPECT_NEAR(ab.trace(), a.trace() * b.trace(), 1e-13);
  const int keep0[1] = {0}, keep1[1] = {1};
  EXPECT_LT(ngtest::max_abs(partial_trace(ab, keep0).matrix(), a.matrix()), 1e-12);
  EXPECT_LT(ngtest::max_abs(partial_trace(ab, keep1).matrix(), b.matrix()), 1e-12);
}

TEST(PartialTrace, MaximallyCorrelated) {
  VectorXc v = VectorXc::Zero(9);
  v(0) = v(4) = v(8) = 1.0 / std::sqrt(3.0);
  const DensityMatrix rho = PureState(FockSpec({3, 3}), v).density();
  const int keep[1] = {0};
  EXPECT_LT(ngtest::max_abs(partial_trace(rho, keep).matrix(), MatrixXc::Identity(3, 3) / 3.0), 1e-15);
  EXPECT_THROW(partial_trace(rho, std::span<const int>()), InvalidArgument);
}

TEST(Spectrum, Examples) {
  const Spectrum p = hermitian_spectrum(fock_state(2, 5).density());
  EXPECT_NEAR(p.values(0), 1.0, 1e-15);
  EXPECT_NEAR(p.values.tail(4).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  MatrixXc half = MatrixXc::Zero(3, 3);
  half(0, 0) = half(2, 2) = 0.5;
  const DensityMatrix h(FockSpec({3}), half);
  EXPECT_NEAR(hermitian_spectrum(h).values(1), 0.5, 1e-15);
  const DensityMatrix th = thermal_state(1.0, 25);
  const Spectrum ts = hermitian_spectrum(th);
  for (int n = 0; n < 25; ++n) EXPECT_NEAR(ts.values(n), std::pow(0.5, n + 1), 1e-12);
}

TEST(Spectrum, ClipsBandAndRejectsBeyond) {
  MatrixXc m = MatrixXc::Zero(2, 2);
  m(0, 0) = 1.0 + 5e-9;
  m(1, 1) = -5e-9;
  const Spectrum s = hermitian_spectrum(m);
  EXPECT_EQ(s.clipped_count, 1);
  EXPECT_NEAR(s.clipped_mass, 5e-9, 1e-20);
  EXPECT_EQ(s.values(1), 0.0);
  m(1, 1) = -1e-6;
  EXPECT_THROW(hermitian_spectrum(m), NumericalError);
}

TEST(Renyi, Examples) {
  EXPECT_NEAR(renyi_entropy(fock_state(1, 3).density(), 2.0), 0.0, 1e-14);
  VectorXd s(2);
  s << 0.7, 0.3;
  EXPECT_NEAR(renyi_entropy(s, 1.0), 0.8812908992306927, 1e-12);
  VectorXd h(3);
  h << 0.5, 0.5, 0;
  EXPECT_NEAR(renyi_entropy(h, 2.0), 1.0, 1e-14);
  EXPECT_NEAR(renyi_entropy(h, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(renyi_entropy(s, kInfinity), -std::log2(0.7), 1e-14);
  EXPECT_THROW(renyi_entropy(s, -0.1), InvalidArgument);
}

TEST(Fidelity, PurityAndFrobenius) {
  auto& g = ngtest::rng(12);
  const DensityMatrix rho = ngtest::random_density(5, 3, g);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-8);
  const PureState psi = ngtest::random_pure(5, g);
  EXPECT_NEAR(fidelity(psi, psi.density()), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(psi.density(), rho), fidelity(psi, rho), 1e-7);
  MatrixXc half = MatrixXc::Zero(3, 3);
  half(0, 0) = half(2, 2) = 0.5;
  EXPECT_NEAR(purity(DensityMatrix(FockSpec({3}), half)), 0.5, 1e-15);
  const Eigen::Matrix2d a = Eigen::Matrix2d::Identity() / 2;
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  b(0, 0) = 1;
  EXPECT_NEAR(frobenius_distance(a, b), std::sqrt(2.0) / 2, 1e-15);
}

TEST(DensityMatrix, TraceWindowTracksLeakage) {
  const DensityMatrix th = thermal_state(1.0, 10);
  EXPECT_NEAR(th.leakage(), std::pow(0.5, 10), 1e-15);
  MatrixXc m = MatrixXc::Identity(2, 2) * 0.4;
  EXPECT_THROW(DensityMatrix(FockSpec({2}), m), NumericalError);
  EXPECT_NO_THROW(DensityMatrix(FockSpec({2}), m, 0.2));
  MatrixXc nh = MatrixXc::Zero(2, 2);
  nh(0, 0) = 1;
  nh(0, 1) = 0.3;
  EXPECT_THROW(DensityMatrix(FockSpec({2}), nh), NumericalError);
}

TEST(Truncation, EmbedTruncateRoundTrip) {
  auto& g = ngtest::rng(13);
  const DensityMatrix rho = ngtest::random_density(4, 2, g);
  const DensityMatrix big = embed(rho, {9});
  EXPECT_LT(ngtest::max_abs(truncate(big, {4}).matrix(), rho.matrix()), 1e-15);
  EXPECT_EQ(auto_truncate(big, 1e-13).spec().cutoff(0), 4);
  EXPECT_THROW(embed(rho, {3}), InvalidArgument);
}

// Property suites over random inputs.

TEST(Property, PartialTraceOfTensorRecoversFactors) {
  auto& g = ngtest::rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int da = 2 + trial % 4, db = 2 + (trial * 3) % 5;
    const DensityMatrix a = ngtest::random_density(da, 1 + trial % da, g);
    const DensityMatrix b = ngtest::random_density(db, 1 + trial % db, g);
    const DensityMatrix ab = tensor(a, b);
    const int k0[1] = {0}, k1[1] = {1};
    ASSERT_LT(ngtest::max_abs(partial_trace(ab, k0).matrix(), a.matrix()), 1e-12);
    ASSERT_LT(ngtest::max_abs(partial_trace(ab, k1).matrix(), b.matrix()), 1e-12);
  }
}

TEST(Property, SpectrumSumsToTrace) {
  auto& g = ngtest::rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix r = ngtest::random_density(3 + trial % 7, 1 + trial % 3, g);
    ASSERT_NEAR(hermitian_spectrum(r).values.sum(), r.trace(), 1e-10);
  }
}

TEST(Property, RenyiContinuousAcrossOne) {
  auto& g = ngtest::rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix r = ngtest::random_density(8, 1 + trial % 8, g);
    const Real s1 = renyi_entropy(r, 1.0);
    ASSERT_LT(std::abs(renyi_entropy(r, 1.0 + 1e-6) - s1), 1e-4);
    ASSERT_LT(std::abs(renyi_entropy(r, 1.0 - 1e-6) - s1), 1e-4);
  }
}

TEST(Property, DisplacementColumnsAreCoherentAmplitudes) {
  auto& g = ngtest::rng(24);
  std::uniform_real_distribution<Real> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const Complex alpha(u(g), u(g));
    const int d = minimal_coherent_cutoff(alpha) + 20;
    const MatrixXc op = displacement_operator(alpha, d);
    ASSERT_LT((op.col(0) - coherent_state(alpha, d).amplitudes()).norm(), 1e-9);
  }
}

TEST(Property, ApplyModeOperatorMatchesKron) {
  auto& g = ngtest::rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const FockSpec s({2 + trial % 3, 3, 2 + trial % 2});
    const int mode = trial % 3;
    const MatrixXc op = MatrixXc::Random(4, s.cutoff(mode));
    const MatrixXc cols = MatrixXc::Random(static_cast<Eigen::Index>(s.dim()), 2);
    MatrixXc full = MatrixXc::Identity(1, 1);
    for (int m = 0; m < 3; ++m) {
      const MatrixXc f = m == mode ? op : MatrixXc::Identity(s.cutoff(m), s.cutoff(m));
      full = kron(full, f);
    }
    ASSERT_LT(ngtest::max_abs(apply_mode_operator(op, cols, s, mode), full * cols), 1e-12);
  }
}
