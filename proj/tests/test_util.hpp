#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ngconv/core.hpp"
#include "ngconv/fock.hpp"
#include "ngconv/linalg.hpp"

// Hand-rolled generators and dense brute-force routes. The brute-force code
// never calls the sector machinery of conv.

namespace ngtest {

using namespace ngconv;

inline std::mt19937_64& rng(std::uint64_t seed = 0) {
  static thread_local std::mt19937_64 g(0x5eed0001ULL);
  if (seed) g.seed(seed);
  return g;
}

inline VectorXc random_vector(int d, std::mt19937_64& g) {
  std::normal_distribution<Real> n(0.0, 1.0);
  VectorXc v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(n(g), n(g));
  return v / v.norm();
}

inline PureState random_pure(int d, std::mt19937_64& g) { return PureState(FockSpec({d}), random_vector(d, g)); }

/// Random single-mode state with support on Fock levels of one parity only,
/// hence <a> = 0.
inline PureState random_zero_mean_pure(int d, std::mt19937_64& g, int parity = 0) {
  VectorXc v = random_vector(d, g);
  for (int i = 0; i < d; ++i)
    if (i % 2 != parity) v(i) = 0;
  return PureState(FockSpec({d}), v / v.norm());
}

inline DensityMatrix random_density(int d, int rank, std::mt19937_64& g) {
  std::uniform_real_distribution<Real> u(0.05, 1.0);
  MatrixXc rho = MatrixXc::Zero(d, d);
  Real total = 0;
  std::vector<Real> w;
  for (int k = 0; k < rank; ++k) w.push_back(u(g)), total += w.back();
  for (int k = 0; k < rank; ++k) {
    const VectorXc v = random_vector(d, g);
    rho += (w[static_cast<std::size_t>(k)] / total) * v * v.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(FockSpec({d}), rho);
}

/// Dense U_theta = exp[theta (a^dagger (x) a - a (x) a^dagger)] on (c, c).
inline MatrixXc dense_beamsplitter(Real theta, int c) {
  MatrixXd a = MatrixXd::Zero(c, c);
  for (int n = 1; n < c; ++n) a(n - 1, n) = std::sqrt(static_cast<Real>(n));
  const MatrixXd id = MatrixXd::Identity(c, c);
  const MatrixXd aa = kron(a, id), bb = kron(id, a);
  const MatrixXd gen = theta * (aa.transpose() * bb - aa * bb.transpose());
  return gen.exp().cast<Complex>();
}

/// tr_B / tr_A of a two-mode matrix with equal cutoffs c.
inline MatrixXc trace_second(const MatrixXc& m, int c) {
  MatrixXc r = MatrixXc::Zero(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      for (int k = 0; k < c; ++k) r(i, j) += m(i * c + k, j * c + k);
  return r;
}
inline MatrixXc trace_first(const MatrixXc& m, int c) {
  MatrixXc r = MatrixXc::Zero(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      for (int k = 0; k < c; ++k) r(i, j) += m(k * c + i, k * c + j);
  return r;
}

inline MatrixXc pad(const MatrixXc& m, int c) {
  MatrixXc r = MatrixXc::Zero(c, c);
  r.topLeftCorner(m.rows(), m.cols()) = m;
  return r;
}

/// Brute-force U (rho (x) sigma) U^dagger on (D, D) with D = d_a + d_b - 1.
inline MatrixXc dense_joint(const MatrixXc& rho, const MatrixXc& sigma, Real theta = kPi / 4) {
  const int c = static_cast<int>(rho.rows() + sigma.rows() - 1);
  const MatrixXc u = dense_beamsplitter(theta, c);
  return u * kron(pad(rho, c), pad(sigma, c)) * u.adjoint();
}

inline Real von_neumann_bits(const MatrixXc& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(m);
  Real s = 0;
  for (Real l : es.eigenvalues())
    if (l > 1e-15) s -= l * std::log2(l);
  return s;
}

inline Real max_abs(const MatrixXc& a, const MatrixXc& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace ngtest
