#pragma once

#include <cmath>
#include <utility>

#include "ngconv/core.hpp"
#include "ngconv/fock.hpp"

namespace ngconv {

template <typename Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DynVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Quadrature ordering q_1, p_1, ..., q_N, p_N with q = (a + a^dagger)/sqrt2,
/// so the vacuum has cov = I/2.
template <typename Scalar = Real>
struct GaussianMoments {
  DynVector<Scalar> mean;
  DynMatrix<Scalar> cov;

  int modes() const { return static_cast<int>(mean.size() / 2); }
};

/// x -> S x + d.
template <typename Scalar = Real>
struct SymplecticMap {
  DynMatrix<Scalar> S;
  DynVector<Scalar> d;
};

/// mean -> T mean + d, cov -> T cov T^T + N.
template <typename Scalar = Real>
struct GaussianChannelParams {
  DynMatrix<Scalar> T;
  DynVector<Scalar> d;
  DynMatrix<Scalar> N;
};

template <typename Scalar = Real>
DynMatrix<Scalar> omega(int modes) {
  DynMatrix<Scalar> o = DynMatrix<Scalar>::Zero(2 * modes, 2 * modes);
  for (int i = 0; i < modes; ++i) {
    o(2 * i, 2 * i + 1) = Scalar(1);
    o(2 * i + 1, 2 * i) = Scalar(-1);
  }
  return o;
}

template <typename D>
Real symplectic_defect(const Eigen::MatrixBase<D>& s) {
  using Scalar = typename D::Scalar;
  const auto o = omega<Scalar>(static_cast<int>(s.rows() / 2));
  return static_cast<Real>((s * o * s.transpose() - o).norm());
}

/// Hermitian PSD test of A + i B with real A, B, to `tol` on the smallest
/// eigenvalue.
template <typename DA, typename DB>
bool complex_psd(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b, Real tol) {
  const MatrixXc h = a.template cast<Complex>() + Complex(0, 1) * b.template cast<Complex>();
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

/// cov + i Omega / 2 >= 0.
template <typename Scalar>
bool satisfies_uncertainty(const GaussianMoments<Scalar>& m, Real tol = 1e-8) {
  return complex_psd(m.cov, omega<Scalar>(m.modes()) / Scalar(2), tol);
}

template <typename Scalar>
void validate(const GaussianMoments<Scalar>& m, Real tol = 1e-8) {
  if (m.mean.size() % 2 != 0 || m.cov.rows() != m.mean.size() || m.cov.cols() != m.mean.size())
    throw InvalidArgument("moments: mean must have length 2N and cov be 2N x 2N");
  if ((m.cov - m.cov.transpose()).norm() > 1e-10) throw NumericalError("moments: cov not symmetric");
  if (!satisfies_uncertainty(m, tol)) throw NumericalError("moments: uncertainty relation violated");
}

template <typename Scalar>
GaussianMoments<Scalar> apply_symplectic(const GaussianMoments<Scalar>& m,
                                         const SymplecticMap<Scalar>& g, Real tol = 1e-9) {
  if (g.S.rows() != m.mean.size() || g.S.cols() != m.mean.size() || g.d.size() != m.mean.size())
    throw InvalidArgument("apply_symplectic: dimension mismatch");
  if (symplectic_defect(g.S) > tol) throw NumericalError("apply_symplectic: map is not symplectic");
  return {g.S * m.mean + g.d, g.S * m.cov * g.S.transpose()};
}

/// Mode transformation a_A -> cos a_A + sin a_B, a_B -> cos a_B - sin a_A on
/// (x_A, x_B), each block holding N modes.
template <typename Scalar = Real>
SymplecticMap<Scalar> beamsplitter_symplectic(Scalar theta, int modes) {
  using std::cos;
  using std::sin;
  const int n = 2 * modes;
  const auto id = DynMatrix<Scalar>::Identity(n, n);
  SymplecticMap<Scalar> g{DynMatrix<Scalar>(2 * n, 2 * n), DynVector<Scalar>::Zero(2 * n)};
  g.S << cos(theta) * id, sin(theta) * id, -sin(theta) * id, cos(theta) * id;
  return g;
}

template <typename Scalar>
SymplecticMap<Scalar> direct_sum(const SymplecticMap<Scalar>& a, const SymplecticMap<Scalar>& b) {
  const auto na = a.S.rows(), nb = b.S.rows();
  SymplecticMap<Scalar> g{DynMatrix<Scalar>::Zero(na + nb, na + nb), DynVector<Scalar>(na + nb)};
  g.S.topLeftCorner(na, na) = a.S;
  g.S.bottomRightCorner(nb, nb) = b.S;
  g.d << a.d, b.d;
  return g;
}

template <typename Scalar>
GaussianChannelParams<Scalar> direct_sum(const GaussianChannelParams<Scalar>& a,
                                         const GaussianChannelParams<Scalar>& b) {
  const auto na = a.T.rows(), nb = b.T.rows();
  GaussianChannelParams<Scalar> p{DynMatrix<Scalar>::Zero(na + nb, na + nb),
                                  DynVector<Scalar>(na + nb),
                                  DynMatrix<Scalar>::Zero(na + nb, na + nb)};
  p.T.topLeftCorner(na, na) = a.T;
  p.T.bottomRightCorner(nb, nb) = b.T;
  p.N.topLeftCorner(na, na) = a.N;
  p.N.bottomRightCorner(nb, nb) = b.N;
  p.d << a.d, b.d;
  return p;
}

template <typename Scalar>
GaussianMoments<Scalar> direct_sum(const GaussianMoments<Scalar>& a, const GaussianMoments<Scalar>& b) {
  const auto na = a.mean.size(), nb = b.mean.size();
  GaussianMoments<Scalar> m{DynVector<Scalar>(na + nb), DynMatrix<Scalar>::Zero(na + nb, na + nb)};
  m.mean << a.mean, b.mean;
  m.cov.topLeftCorner(na, na) = a.cov;
  m.cov.bottomRightCorner(nb, nb) = b.cov;
  return m;
}

/// Complete positivity: N + i Omega/2 - i T Omega T^T / 2 >= 0.
template <typename Scalar>
bool is_completely_positive(const GaussianChannelParams<Scalar>& p, Real tol = 1e-8) {
  const auto o = omega<Scalar>(static_cast<int>(p.T.rows() / 2));
  return complex_psd(p.N, (o - p.T * o * p.T.transpose()) / Scalar(2), tol);
}

template <typename Scalar>
GaussianMoments<Scalar> gaussian_channel_on_moments(const GaussianMoments<Scalar>& m,
                                                    const GaussianChannelParams<Scalar>& p,
                                                    Real tol = 1e-8) {
  if (p.T.rows() != m.mean.size() || p.d.size() != m.mean.size() || p.N.rows() != m.mean.size())
    throw InvalidArgument("gaussian channel: dimension mismatch");
  if (!is_completely_positive(p, tol)) throw NumericalError("gaussian channel: not completely positive");
  return {p.T * m.mean + p.d, p.T * m.cov * p.T.transpose() + p.N};
}

/// Single-mode loss: T = sqrt(1 - gamma) I, N = (gamma / 2) I.
template <typename Scalar = Real>
GaussianChannelParams<Scalar> loss_channel_params(Scalar gamma, int modes = 1) {
  using std::sqrt;
  const int n = 2 * modes;
  return {sqrt(Scalar(1) - gamma) * DynMatrix<Scalar>::Identity(n, n), DynVector<Scalar>::Zero(n),
          gamma / Scalar(2) * DynMatrix<Scalar>::Identity(n, n)};
}

/// U_G with (S, d) on both inputs of a 50:50 beam splitter equals
/// (S, sqrt2 d) on arm A and (S, 0) on arm B after it.
template <typename Scalar>
std::pair<SymplecticMap<Scalar>, SymplecticMap<Scalar>> commutation_witness_unitary(
    const SymplecticMap<Scalar>& g) {
  using std::sqrt;
  return {{g.S, sqrt(Scalar(2)) * g.d}, {g.S, DynVector<Scalar>::Zero(g.d.size())}};
}

template <typename Scalar>
std::pair<GaussianChannelParams<Scalar>, GaussianChannelParams<Scalar>> commutation_witness_channel(
    const GaussianChannelParams<Scalar>& p) {
  using std::sqrt;
  return {{p.T, sqrt(Scalar(2)) * p.d, p.N}, {p.T, DynVector<Scalar>::Zero(p.d.size()), p.N}};
}

/// exp(-1/2 xi^T Omega V Omega^T xi - i (Omega mean)^T xi).
template <typename Scalar, typename D>
std::complex<Scalar> gaussian_char_fn(const GaussianMoments<Scalar>& m, const Eigen::MatrixBase<D>& xi) {
  const auto o = omega<Scalar>(m.modes());
  const Scalar quad = xi.dot(o * m.cov * o.transpose() * xi);
  const Scalar lin = (o * m.mean).dot(xi);
  return std::exp(std::complex<Scalar>(-quad / Scalar(2), -lin));
}

// ---------------------------------------------------------------------------
// Fock-space side.

/// Exact moments of a truncated state from normal-ordered expectations.
/// Throws TruncationError when rho.leakage() exceeds tol.truncation.
GaussianMoments<Real> moments_from_state(const DensityMatrix& rho,
                                         const Tolerances& tol = default_tolerances());

/// Tr(rho D(xi)) with D(xi) = exp(i x^T Omega xi); per mode this is the
/// displacement D(alpha) with alpha = (xi_q + i xi_p) / sqrt2. Uses exact
/// displacement matrix elements.
Complex characteristic_function(const DensityMatrix& rho, const VectorXd& xi);

}  // namespace ngconv
