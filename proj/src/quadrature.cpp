#include "ngconv/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace ngconv {

namespace {

GaussHermite build(int q) {
  VectorXd diag = VectorXd::Zero(q);
  VectorXd sub(q - 1);
  for (int k = 1; k < q; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigensolver failed");
  GaussHermite r{es.eigenvalues(), VectorXd(q)};
  for (int i = 0; i < q; ++i) {
    const Real v = es.eigenvectors()(0, i);
    r.weights(i) = std::sqrt(kPi) * v * v;
  }
  // Symmetrize so that nodes are exactly +-paired.
  for (int i = 0; i < q / 2; ++i) {
    const int j = q - 1 - i;
    const Real x = 0.5 * (r.nodes(j) - r.nodes(i));
    const Real w = 0.5 * (r.weights(i) + r.weights(j));
    r.nodes(i) = -x;
    r.nodes(j) = x;
    r.weights(i) = r.weights(j) = w;
  }
  if (q % 2 == 1) r.nodes(q / 2) = 0;
  r.weights *= std::sqrt(kPi) / r.weights.sum();
  return r;
}

}  // namespace

const GaussHermite& gauss_hermite(int order) {
  if (order < 1) throw InvalidArgument("Gauss-Hermite order must be >= 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussHermite>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermite>(build(order));
  return *slot;
}

}  // namespace ngconv
