#include "ngconv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ngconv {

Spectrum hermitian_spectrum(const MatrixXc& h, const Tolerances& tol) {
  if (hermiticity_defect(h) > tol.hermitian)
    throw NumericalError("hermitian_spectrum: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  Spectrum s;
  s.values = es.eigenvalues().reverse();
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    Real& v = s.values(i);
    if (v >= 0) continue;
    if (v < -tol.eigenvalue) {
      std::ostringstream os;
      os << "negative eigenvalue " << v << " beyond clipping band " << tol.eigenvalue;
      throw NumericalError(os.str());
    }
    s.clipped_mass += -v;
    ++s.clipped_count;
    v = 0;
  }
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  return s;
}

Spectrum hermitian_spectrum(const DensityMatrix& rho, const Tolerances& tol) {
  return hermitian_spectrum(rho.matrix(), tol);
}

Real renyi_entropy(const VectorXd& spectrum, Real alpha, Real rank_tol) {
  if (!(alpha >= 0)) throw InvalidArgument("Renyi order must be >= 0");
  if (alpha == 0) {
    const auto rank = (spectrum.array() > rank_tol).count();
    return rank == 0 ? 0.0 : std::log2(static_cast<Real>(rank));
  }
  if (std::isinf(alpha)) {
    const Real top = spectrum.size() ? spectrum.maxCoeff() : 0.0;
    return top > 0 ? -std::log2(top) : 0.0;
  }
  if (alpha == 1) {
    Real s = 0;
    for (Real l : spectrum)
      if (l > 0) s -= l * std::log2(l);
    return s;
  }
  Real t = 0;
  for (Real l : spectrum)
    if (l > 0) t += std::pow(l, alpha);
  return std::log2(t) / (1.0 - alpha);
}

Real renyi_entropy(const DensityMatrix& rho, Real alpha, const Tolerances& tol) {
  return renyi_entropy(hermitian_spectrum(rho, tol).values, alpha, tol.rank);
}

Real purity(const DensityMatrix& rho) {
  // Tr(rho^2) = ||rho||_F^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

Real fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.spec() == sigma.spec())) throw InvalidArgument("fidelity: spec mismatch");
  const MatrixXc sq = hermitian_function(rho.matrix(), [](Real l) { return std::sqrt(std::max(l, 0.0)); });
  const MatrixXc m = sq * sigma.matrix() * sq;
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  Real f = 0;
  for (Real l : es.eigenvalues())
    if (l > 0) f += std::sqrt(l);
  return std::min(f, 1.0);
}

Real fidelity(const PureState& psi, const DensityMatrix& rho) {
  if (!(psi.spec() == rho.spec())) throw InvalidArgument("fidelity: spec mismatch");
  const Complex e = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return std::sqrt(std::max(e.real(), 0.0));
}

Ensemble ensemble_of(const DensityMatrix& rho, Real cut) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  if (ev.size() && ev.minCoeff() < -default_tolerances().eigenvalue) {
    std::ostringstream os;
    os << "negative eigenvalue " << ev.minCoeff() << " beyond clipping band";
    throw NumericalError(os.str());
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = ev.size(); i-- > 0;)
    if (ev(i) > cut) keep.push_back(i);
  Ensemble e{rho.spec(), VectorXd(static_cast<Eigen::Index>(keep.size())),
             MatrixXc(ev.size(), static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    e.weights(static_cast<Eigen::Index>(k)) = ev(keep[k]);
    e.vectors.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  }
  return e;
}

Ensemble ensemble_of(const PureState& psi) {
  return Ensemble{psi.spec(), VectorXd::Ones(1), psi.amplitudes()};
}

}  // namespace ngconv
