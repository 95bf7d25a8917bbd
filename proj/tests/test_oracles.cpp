#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ngconv/channels.hpp"
#include "ngconv/conv.hpp"
#include "ngconv/linalg.hpp"
#include "ngconv/measures.hpp"
#include "ngconv/oracles.hpp"
#include "test_util.hpp"

using namespace ngconv;
namespace orc = ngconv::oracles;

namespace {

constexpr Real kTail = 1e-14;

Real sum(const std::vector<Real>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

DensityMatrix lossy_cat(Real z, Real gamma) {
  return apply(loss_channel(gamma), cat_state(z, +1, minimal_cat_cutoff(z, +1, kTail)).density());
}

DensityMatrix lossy_fock(int n, Real gamma) { return apply(loss_channel(gamma), fock_state(n, n + 1).density()); }

// Descending eigenvalues, first k.
VectorXd top_eigenvalues(const DensityMatrix& rho, int k) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho.matrix(), Eigen::EigenvaluesOnly);
  const VectorXd ev = es.eigenvalues().reverse();
  return ev.head(k);
}

}  // namespace

TEST(Wigner, SpinHalfBalanced) {
  const auto w = orc::wigner_small_d(1, kPi / 4);
  const Real r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(w.at(-1, -1), r, 1e-15);
  EXPECT_NEAR(w.at(1, 1), r, 1e-15);
  EXPECT_NEAR(w.at(-1, 1), -r, 1e-15);
  EXPECT_NEAR(w.at(1, -1), r, 1e-15);
}

TEST(Wigner, BlocksOrthogonal) {
  for (int two_s = 0; two_s <= 40; ++two_s) {
    const auto w = orc::wigner_small_d(two_s, 0.37);
    EXPECT_LT((w.matrix * w.matrix.transpose() - MatrixXd::Identity(two_s + 1, two_s + 1)).norm(), 1e-10);
  }
}

TEST(Wigner, BalancedColumnClosedForm) {
  const auto w = orc::wigner_small_d(4, kPi / 4);
  for (int mz = -2; mz <= 2; ++mz) {
    EXPECT_NEAR(w.at(2 * mz, 0), orc::wigner_half_column(2, mz), 1e-12) << mz;
    if ((2 + mz) % 2 != 0) EXPECT_EQ(orc::wigner_half_column(2, mz), 0.0);
  }
  EXPECT_NEAR(orc::wigner_half_column(2, 0), -0.5, 1e-15);
  EXPECT_NEAR(orc::wigner_half_column(2, 2), std::sqrt(24.0) / (4 * 2), 1e-15);
  for (int s = 0; s <= 12; ++s) {
    const auto ws = orc::wigner_small_d(2 * s, kPi / 4);
    for (int mz = -s; mz <= s; ++mz) EXPECT_NEAR(ws.at(2 * mz, 0), orc::wigner_half_column(s, mz), 1e-10);
  }
}

TEST(Wigner, MatchesSectorBlocksAfterRelabeling) {
  // Row j of the sector block holds m_A = j = S + m_z photons in the first mode.
  const auto blocks = beamsplitter_blocks(kPi / 4, 30);
  for (int n = 0; n <= 30; ++n) {
    const auto w = orc::wigner_small_d(n, kPi / 4);
    Real err = 0;
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        err = std::max(err, std::abs(blocks[static_cast<std::size_t>(n)](j, k) - w.at(2 * j - n, 2 * k - n)));
    EXPECT_LT(err, 1e-10) << n;
  }
}

TEST(FockSelfConv, Examples) {
  EXPECT_EQ(orc::fock_selfconv_diagonal(0), (std::vector<Real>{1.0}));
  const auto one = orc::fock_selfconv_diagonal(1);
  ASSERT_EQ(one.size(), 3u);
  EXPECT_NEAR(one[0], 0.5, 1e-15);
  EXPECT_EQ(one[1], 0.0);
  EXPECT_NEAR(one[2], 0.5, 1e-15);
  const auto two = orc::fock_selfconv_diagonal(2);
  const std::vector<Real> expect = {3.0 / 8, 0, 0.25, 0, 3.0 / 8};
  for (std::size_t m = 0; m < 5; ++m) EXPECT_NEAR(two[m], expect[m], 1e-15);
}

TEST(FockSelfConv, NormalizedAndMatchesSimulator) {
  for (int n = 0; n <= 20; ++n) EXPECT_NEAR(sum(orc::fock_selfconv_diagonal(n)), 1.0, 1e-12) << n;
  for (int n = 0; n <= 8; ++n) {
    const DensityMatrix out = boxplus(fock_state(n, n + 1), fock_state(n, n + 1));
    const auto p = orc::fock_selfconv_diagonal(n);
    for (int m = 0; m <= 2 * n; ++m) EXPECT_NEAR(out.matrix()(m, m).real(), p[static_cast<std::size_t>(m)], 1e-12);
    EXPECT_LT((out.matrix() - MatrixXc(out.matrix().diagonal().asDiagonal())).norm(), 1e-12);
  }
}

TEST(FockClosedForms, Examples) {
  for (Real alpha : {0.5, 1.0, 2.0, kInfinity}) EXPECT_EQ(orc::nge_fock_closed_form(0, alpha), 0.0);
  EXPECT_NEAR(orc::nge_fock_closed_form(1, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(orc::nge_fock_closed_form(2, 2.0), std::log2(32.0 / 11.0), 1e-14);
  EXPECT_NEAR(orc::nge_fock_closed_form(1, kInfinity), 1.0, 1e-15);
  EXPECT_NEAR(orc::ming_fock(1), 1.0, 1e-15);
  EXPECT_NEAR(orc::ming_fock(2), -(0.75 * std::log2(3.0 / 8) + 0.25 * std::log2(0.25)), 1e-14);
}

TEST(LossyFock, Examples) {
  const auto pure = orc::lossy_fock_state(3, 0.0);
  EXPECT_EQ(pure.size(), 4u);
  EXPECT_NEAR(pure[3], 1.0, 1e-15);
  const auto two = orc::lossy_fock_state(2, 0.5);
  EXPECT_NEAR(two[0], 0.25, 1e-14);
  EXPECT_NEAR(two[1], 0.5, 1e-14);
  EXPECT_NEAR(two[2], 0.25, 1e-14);
  const auto sc = orc::lossy_fock_selfconv(3, 0.0), ref = orc::fock_selfconv_diagonal(3);
  for (std::size_t m = 0; m < ref.size(); ++m) EXPECT_NEAR(sc[m], ref[m], 1e-14);
}

TEST(LossyFock, BinomialLawAndNormalization) {
  for (int n = 0; n <= 10; ++n)
    for (Real gamma : {0.0, 0.1, 0.3, 0.5, 0.6, 0.9, 1.0}) {
      const auto p = orc::lossy_fock_state(n, gamma);
      const auto q = orc::lossy_fock_selfconv(n, gamma);
      EXPECT_NEAR(sum(p), 1.0, 1e-12);
      EXPECT_NEAR(sum(q), 1.0, 1e-12);
      for (int m = 0; m <= n; ++m) {
        const Real binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0));
        const Real expect = binom * std::pow(1 - gamma, m) * std::pow(gamma, n - m);
        EXPECT_NEAR(p[static_cast<std::size_t>(m)], expect, 1e-12) << n << " " << gamma << " " << m;
      }
    }
}

TEST(LossyFock, MirroredRowIndexExchangesLossAndTransmission) {
  for (int n = 1; n <= 6; ++n)
    for (Real gamma : {0.1, 0.3, 0.6}) {
      const auto mirrored = orc::lossy_fock_state_mirrored(n, gamma);
      const auto swapped = orc::lossy_fock_state(n, 1 - gamma);
      for (int m = 0; m <= n; ++m)
        EXPECT_NEAR(mirrored[static_cast<std::size_t>(m)], swapped[static_cast<std::size_t>(m)], 1e-12);
      EXPECT_GT(std::abs(mirrored[0] - orc::lossy_fock_state(n, gamma)[0]), 1e-3);
    }
}

TEST(LossyFock, MatchesSimulator) {
  for (int n = 0; n <= 6; ++n)
    for (Real gamma : {0.0, 0.1, 0.25, 0.3, 0.5, 0.6, 0.75}) {
      const DensityMatrix rho = lossy_fock(n, gamma);
      const auto p = orc::lossy_fock_state(n, gamma);
      for (int m = 0; m <= n; ++m) EXPECT_NEAR(rho.matrix()(m, m).real(), p[static_cast<std::size_t>(m)], 1e-12);
      const DensityMatrix out = boxplus(rho, rho);
      const auto q = orc::lossy_fock_selfconv(n, gamma);
      for (int l = 0; l <= 2 * n; ++l) EXPECT_NEAR(out.matrix()(l, l).real(), q[static_cast<std::size_t>(l)], 1e-12);
      EXPECT_NEAR(ming(rho, 1.0).value, orc::ming_lossy_fock(n, gamma), 1e-6) << n << " " << gamma;
    }
}

TEST(Cat, TraceAndTrivialSpectra) {
  EXPECT_NEAR(orc::cat_trace(1.0, +1), 1 + std::exp(-2.0), 1e-15);
  EXPECT_NEAR(orc::cat_trace(1.0, -1), 1 - std::exp(-2.0), 1e-15);
  EXPECT_EQ(orc::cat_trace(0.0, -1), 0.0);
  const VectorXd t1 = orc::cat_T1_spectrum(1.0, 0.0);
  EXPECT_NEAR(t1(0), 1.0, 1e-12);
  EXPECT_NEAR(t1(1), 0.0, 1e-12);
  const VectorXd z0 = orc::cat_T1_spectrum(0.0, 0.3);
  EXPECT_NEAR(z0(0), 1.0, 1e-12);
  EXPECT_NEAR(z0(1), 0.0, 1e-12);
}

TEST(Cat, LargeAmplitudeSpectrum) {
  // Corrections are of order e^{-|z|^2}.
  for (const auto& [z, tol] : {std::pair{4.0, 1e-6}, std::pair{6.0, 1e-12}}) {
    const VectorXd t2 = orc::cat_T2_spectrum(z, 0.0);
    EXPECT_NEAR(t2(0), 0.5, tol);
    EXPECT_NEAR(t2(1), 0.5, tol);
    EXPECT_NEAR(t2(2), 0.0, tol);
  }
}

TEST(Cat, SpectraMatchSimulator) {
  const DensityMatrix rho = lossy_cat(1.0, 0.3);
  const VectorXd t1 = orc::cat_T1_spectrum(1.0, 0.3), t2 = orc::cat_T2_spectrum(1.0, 0.3);
  EXPECT_LT((top_eigenvalues(rho, 2) - t1).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((top_eigenvalues(boxplus(rho, rho), 3) - t2).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((top_eigenvalues(boxminus(rho, rho), 3) - t2).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Cat, Asymptotes) {
  EXPECT_NEAR(orc::dF_lossy_cat(4.0, 0.0), std::sqrt(0.75), 1e-4);
  EXPECT_NEAR(orc::ming_lossy_cat(4.0, 0.0), 2.0, 1e-4);
  EXPECT_NEAR(orc::dF_lossy_cat(4.0, 0.5), 3.0 / 8, 2e-3);
  for (Real z : {0.5, 1.0, 2.0}) {
    EXPECT_LT(std::abs(orc::dF_lossy_cat(z, 1 - 1e-9)), 1e-4) << z;
    EXPECT_LT(std::abs(orc::ming_lossy_cat(z, 1 - 1e-9)), 1e-4) << z;
  }
}

TEST(Cat, OracleGridMatchesSimulator) {
  for (Real z : {0.5, 1.0, 2.0})
    for (Real gamma : {0.0, 0.25, 0.5, 0.75}) {
      const DensityMatrix rho = lossy_cat(z, gamma);
      EXPECT_NEAR(ming(rho, 1.0).value, orc::ming_lossy_cat(z, gamma), 1e-6) << z << " " << gamma;
      EXPECT_NEAR(d_frobenius(rho).value, orc::dF_lossy_cat(z, gamma), 1e-6) << z << " " << gamma;
    }
}

TEST(Cat, EntropySumDisagreesUnderLoss) {
  EXPECT_NEAR(orc::ming_lossy_cat_entropy_sum(1.0, 0.0), orc::ming_lossy_cat(1.0, 0.0), 1e-12);
  for (Real gamma : {0.25, 0.5, 0.75}) {
    const Real sim = ming(lossy_cat(1.0, gamma), 1.0).value;
    EXPECT_GT(std::abs(orc::ming_lossy_cat_entropy_sum(1.0, gamma) - sim), 1e-2) << gamma;
  }
}

TEST(Cat, NuVectorsAndAMatrix) {
  const MatrixXd a = orc::cat_A_matrix(1.0, 0.3);
  EXPECT_EQ(a.rows(), 3);
  EXPECT_LT((a - a.transpose()).norm(), 1e-12);
  EXPECT_EQ(orc::cat_nu_vector(1.0, 0.3, +1, -1).size(), 9);
}
