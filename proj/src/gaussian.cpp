#include "ngconv/gaussian.hpp"

#include <sstream>

#include "ngconv/linalg.hpp"

namespace ngconv {

namespace {

// Tr(rho O) for an operator that maps each basis vector |k> to c(k)|t(k)> or
// to zero. `step` returns false for zero.
template <typename Step>
Complex sparse_expectation(const DensityMatrix& rho, Step step) {
  const MatrixXc& m = rho.matrix();
  Complex acc = 0;
  for (std::size_t k = 0; k < rho.spec().dim(); ++k) {
    std::size_t t = 0;
    Real c = 0;
    if (step(k, t, c)) acc += m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) * c;
  }
  return acc;
}

int occupation(const FockSpec& s, std::size_t k, int mode) {
  return static_cast<int>((k / s.stride(mode)) % static_cast<std::size_t>(s.cutoff(mode)));
}

}  // namespace

GaussianMoments<Real> moments_from_state(const DensityMatrix& rho, const Tolerances& tol) {
  if (rho.leakage() > tol.truncation) {
    std::ostringstream os;
    os << "moments_from_state: leakage " << rho.leakage() << " exceeds " << tol.truncation;
    throw TruncationError(os.str());
  }
  const FockSpec& s = rho.spec();
  const int N = s.modes();

  VectorXc a1(N);
  MatrixXc aa(N, N), ada(N, N);
  for (int m = 0; m < N; ++m) {
    a1(m) = sparse_expectation(rho, [&](std::size_t k, std::size_t& t, Real& c) {
      const int n = occupation(s, k, m);
      if (n == 0) return false;
      t = k - s.stride(m);
      c = std::sqrt(static_cast<Real>(n));
      return true;
    });
    for (int n2 = 0; n2 < N; ++n2) {
      // a_m a_n2
      aa(m, n2) = sparse_expectation(rho, [&](std::size_t k, std::size_t& t, Real& c) {
        const int x = occupation(s, k, n2);
        if (x == 0) return false;
        const std::size_t k1 = k - s.stride(n2);
        const int y = occupation(s, k1, m);
        if (y == 0) return false;
        t = k1 - s.stride(m);
        c = std::sqrt(static_cast<Real>(x) * y);
        return true;
      });
      // a_m^dagger a_n2
      ada(m, n2) = sparse_expectation(rho, [&](std::size_t k, std::size_t& t, Real& c) {
        const int x = occupation(s, k, n2);
        if (x == 0) return false;
        const std::size_t k1 = k - s.stride(n2);
        const int y = occupation(s, k1, m);
        if (y + 1 >= s.cutoff(m)) return false;
        t = k1 + s.stride(m);
        c = std::sqrt(static_cast<Real>(x) * (y + 1));
        return true;
      });
    }
  }

  // x_k = u_k a + u_k^* a^dagger on the mode of k.
  const Real r = 1.0 / std::sqrt(2.0);
  auto u = [r](int k) { return k % 2 == 0 ? Complex(r, 0) : Complex(0, -r); };

  GaussianMoments<Real> out{VectorXd(2 * N), MatrixXd(2 * N, 2 * N)};
  for (int k = 0; k < 2 * N; ++k) out.mean(k) = 2.0 * (u(k) * a1(k / 2)).real();
  for (int k = 0; k < 2 * N; ++k)
    for (int l = 0; l < 2 * N; ++l) {
      const int m = k / 2, n = l / 2;
      Real v = 2.0 * (u(k) * u(l) * aa(m, n)).real() + 2.0 * (std::conj(u(k)) * u(l) * ada(m, n)).real();
      if (m == n) v += (u(k) * std::conj(u(l))).real();
      out.cov(k, l) = v - out.mean(k) * out.mean(l);
    }
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

Complex characteristic_function(const DensityMatrix& rho, const VectorXd& xi) {
  const FockSpec& s = rho.spec();
  if (xi.size() != 2 * s.modes()) throw InvalidArgument("characteristic_function: xi must have length 2N");
  MatrixXc d = MatrixXc::Ones(1, 1);
  const Real r = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < s.modes(); ++m) {
    const Complex alpha(xi(2 * m) * r, xi(2 * m + 1) * r);
    const int c = s.cutoff(m);
    d = kron(d, displacement_block(alpha, c, c));
  }
  return (rho.matrix() * d).trace();
}

}  // namespace ngconv
