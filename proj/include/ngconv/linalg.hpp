#pragma once

#include <limits>

#include "ngconv/core.hpp"
#include "ngconv/fock.hpp"

namespace ngconv {

template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Out = Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Out r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

template <typename DA, typename DB>
Real frobenius_distance(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return (a - b).norm();
}

/// ||A - A^dagger||_F / ||A||_F, zero for the zero matrix.
template <typename D>
Real hermiticity_defect(const Eigen::MatrixBase<D>& a) {
  const Real n = a.norm();
  return n == 0 ? 0.0 : (a - a.adjoint()).norm() / n;
}

/// Eigenvalues in descending order after clipping the [-tol.eigenvalue, 0)
/// band to zero.
struct Spectrum {
  VectorXd values;
  Real clipped_mass = 0;  ///< sum of |lambda| over clipped eigenvalues
  int clipped_count = 0;
};

/// Throws NumericalError for an eigenvalue below -tol.eigenvalue.
Spectrum hermitian_spectrum(const MatrixXc& h, const Tolerances& tol = default_tolerances());
Spectrum hermitian_spectrum(const DensityMatrix& rho, const Tolerances& tol = default_tolerances());

/// S_alpha in bits of the given spectrum; alpha = infinity is supported.
Real renyi_entropy(const VectorXd& spectrum, Real alpha, Real rank_tol = default_tolerances().rank);
Real renyi_entropy(const DensityMatrix& rho, Real alpha, const Tolerances& tol = default_tolerances());
inline Real von_neumann_entropy(const DensityMatrix& rho) { return renyi_entropy(rho, 1.0); }

inline constexpr Real kInfinity = std::numeric_limits<Real>::infinity();

Real purity(const DensityMatrix& rho);

/// Uhlmann fidelity Tr|sqrt(rho) sqrt(sigma)|, so F(rho, rho) = 1.
Real fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
/// sqrt(<psi|rho|psi>).
Real fidelity(const PureState& psi, const DensityMatrix& rho);

/// Weighted orthonormal vectors with rho = sum_i w_i v_i v_i^dagger. Weights
/// below `cut` are dropped.
struct Ensemble {
  FockSpec spec;
  VectorXd weights;
  MatrixXc vectors;  ///< one column per weight
};

Ensemble ensemble_of(const DensityMatrix& rho, Real cut = 1e-14);
Ensemble ensemble_of(const PureState& psi);

/// Matrix function f(H) of a Hermitian matrix via eigendecomposition.
template <typename F>
MatrixXc hermitian_function(const MatrixXc& h, F f) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  const VectorXd fv = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace ngconv
