#include "ngconv/oracles.hpp"

#include <cmath>
#include <map>
#include <unsupported/Eigen/MatrixFunctions>

namespace ngconv::oracles {

namespace {

Real shannon_bits(const std::vector<Real>& p) {
  Real s = 0;
  for (Real x : p)
    if (x > 0) s -= x * std::log2(x);
  return s;
}

Real shannon_bits(const VectorXd& p) {
  Real s = 0;
  for (Real x : p)
    if (x > 0) s -= x * std::log2(x);
  return s;
}

Real log_factorial(int n) { return std::lgamma(n + 1.0); }

VectorXd descending_eigenvalues(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  VectorXd v = es.eigenvalues().reverse();
  return v.cwiseMax(0.0);
}

MatrixXd psd_sqrt(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  const VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

struct CatParams {
  Real y2;   // |y|^2 with y = sqrt(1 - gamma) z
  Real e;    // e^{-2 gamma |z|^2}
  Real np, nm;
  Real norm;  // N_+ = 1 + e^{-2|z|^2}
};

CatParams cat_params(Complex z, Real gamma) {
  if (!(gamma >= 0 && gamma <= 1)) throw InvalidArgument("loss rate must lie in [0, 1]");
  const Real z2 = std::norm(z);
  CatParams p;
  p.y2 = (1.0 - gamma) * z2;
  p.e = std::exp(-2.0 * gamma * z2);
  p.np = 0.5 * (1.0 + p.e);
  p.nm = 0.5 * (1.0 - p.e);
  p.norm = cat_trace(z, +1);
  return p;
}

MatrixXd t1_matrix(const CatParams& p) {
  MatrixXd c(2, 2), g(2, 2);
  c << 1, p.e, p.e, 1;
  const Real o = std::exp(-2.0 * p.y2);
  g << 1, o, o, 1;
  const MatrixXd cs = psd_sqrt(c);
  return cs * g * cs / (2.0 * p.norm);
}

MatrixXd a_matrix(const CatParams& p) {
  const Real e1 = std::exp(-p.y2), e4 = std::exp(-4.0 * p.y2);
  const Real s2 = p.np * p.np + p.nm * p.nm, d2 = p.np * p.np - p.nm * p.nm, pm = p.np * p.nm;
  MatrixXd a(3, 3);
  a << 2 * s2 * (1 + e4) + 4 * pm * (1 - e4), 2 * d2 * e1, 0,
       2 * d2 * e1, s2, 0,
       0, 0, 2 * pm;
  return a / 4.0;
}

MatrixXd t2_matrix(const CatParams& p) {
  const Real e1 = std::exp(-p.y2), e4 = std::exp(-4.0 * p.y2);
  MatrixXd g(3, 3);
  g << 1, 2 * e1, 0,
       2 * e1, 2 * (1 + e4), 0,
       0, 0, 2 * (1 - e4);
  const MatrixXd as = psd_sqrt(a_matrix(p));
  return as * g * as / (p.norm * p.norm);
}

VectorXd nu_vector(const CatParams& p, int s1, int s2) {
  const Real y = p.y2;
  const Real e1 = std::exp(-y), e2 = std::exp(-2 * y), e4 = std::exp(-4 * y), e5 = std::exp(-5 * y);
  const Real a = s1, b = s2;
  VectorXd v(9);
  v << e1 * (1 + a) * (1 + b),
       (1 + e4) * (1 + a * b) + 2 * e2 * (a + b),
       (1 - e4) * (1 - a * b),
       2 * e2 * (1 + a * b) + (1 + e4) * (a + b),
       2 * (e1 + e5) * (1 + a) * (1 + b),
       2 * (e1 - e5) * (1 - a * b),
       (1 - e4) * (a - b),
       2 * (e1 - e5) * (a - b),
       0;
  return v / 2.0;
}

}  // namespace

Real WignerBlock::at(int two_mz, int two_mzp) const {
  if ((two_mz + two_s) % 2 != 0 || (two_mzp + two_s) % 2 != 0 || std::abs(two_mz) > two_s ||
      std::abs(two_mzp) > two_s)
    throw InvalidArgument("WignerBlock::at: m_z outside the spin multiplet");
  return matrix((two_mz + two_s) / 2, (two_mzp + two_s) / 2);
}

WignerBlock wigner_small_d(int two_s, Real theta) {
  if (two_s < 0) throw InvalidArgument("wigner_small_d: 2S must be >= 0");
  const int dim = two_s + 1;
  // i 2 theta S_y = theta (S_+ - S_-) is real antisymmetric in the S_z basis.
  MatrixXd gen = MatrixXd::Zero(dim, dim);
  const Real s = 0.5 * two_s;
  for (int i = 0; i + 1 < dim; ++i) {
    const Real m = i - s;
    const Real c = std::sqrt(s * (s + 1) - m * (m + 1));  // <m+1|S_+|m>
    gen(i + 1, i) = theta * c;
    gen(i, i + 1) = -theta * c;
  }
  return WignerBlock{two_s, theta, gen.exp()};
}

Real wigner_half_column(int s, int mz) {
  if (s < 0 || std::abs(mz) > s) throw InvalidArgument("wigner_half_column: |m_z| must be <= S");
  if ((s + mz) % 2 != 0) return 0.0;
  const int hp = (s + mz) / 2, hm = (s - mz) / 2;
  const Real logv = 0.5 * (log_factorial(s + mz) + log_factorial(s - mz)) - s * std::log(2.0) -
                    log_factorial(hp) - log_factorial(hm);
  return (hm % 2 == 0 ? 1.0 : -1.0) * std::exp(logv);
}

std::vector<Real> fock_selfconv_diagonal(int n) {
  if (n < 0) throw InvalidArgument("photon number must be >= 0");
  std::vector<Real> p(static_cast<std::size_t>(2 * n + 1), 0.0);
  for (int m = 0; m <= 2 * n; m += 2) {
    const Real logv = log_factorial(m) + log_factorial(2 * n - m) -
                      2.0 * (n * std::log(2.0) + log_factorial(m / 2) + log_factorial(n - m / 2));
    p[static_cast<std::size_t>(m)] = std::exp(logv);
  }
  return p;
}

Real nge_fock_closed_form(int n, Real alpha) {
  if (!(alpha >= 0)) throw InvalidArgument("Renyi order must be >= 0");
  std::vector<Real> p;
  for (int k = 0; k <= n; ++k) {
    const Real logv = log_factorial(2 * k) + log_factorial(2 * n - 2 * k) -
                      2.0 * (n * std::log(2.0) + log_factorial(k) + log_factorial(n - k));
    p.push_back(std::exp(logv));
  }
  if (alpha == 1) return shannon_bits(p);
  if (std::isinf(alpha)) return -std::log2(*std::max_element(p.begin(), p.end()));
  Real sum = 0;
  for (Real x : p) sum += std::pow(x, alpha);
  return std::log2(sum) / (1.0 - alpha);
}

Real ming_fock(int n) { return nge_fock_closed_form(n, 1.0); }

std::vector<Real> lossy_fock_state(int n, Real gamma) {
  if (n < 0) throw InvalidArgument("photon number must be >= 0");
  if (!(gamma >= 0 && gamma <= 1)) throw InvalidArgument("loss rate must lie in [0, 1]");
  const WignerBlock u = wigner_small_d(n, std::asin(std::sqrt(gamma)));
  std::vector<Real> p(static_cast<std::size_t>(n + 1));
  for (int m = 0; m <= n; ++m) {
    const Real x = u.at(2 * m - n, n);
    p[static_cast<std::size_t>(m)] = x * x;
  }
  return p;
}

std::vector<Real> lossy_fock_state_mirrored(int n, Real gamma) {
  if (n < 0) throw InvalidArgument("photon number must be >= 0");
  if (!(gamma >= 0 && gamma <= 1)) throw InvalidArgument("loss rate must lie in [0, 1]");
  const WignerBlock u = wigner_small_d(n, std::asin(std::sqrt(gamma)));
  std::vector<Real> p(static_cast<std::size_t>(n + 1));
  for (int m = 0; m <= n; ++m) {
    const Real x = u.at(n - 2 * m, n);
    p[static_cast<std::size_t>(m)] = x * x;
  }
  return p;
}

std::vector<Real> lossy_fock_selfconv(int n, Real gamma) {
  const std::vector<Real> p = lossy_fock_state(n, gamma);
  std::vector<Real> out(static_cast<std::size_t>(2 * n + 1), 0.0);
  std::map<int, WignerBlock> blocks;
  for (int ma = 0; ma <= n; ++ma)
    for (int mb = 0; mb <= n; ++mb) {
      const Real w = p[static_cast<std::size_t>(ma)] * p[static_cast<std::size_t>(mb)];
      if (w == 0) continue;
      const int two_s = ma + mb;
      auto it = blocks.find(two_s);
      if (it == blocks.end()) it = blocks.emplace(two_s, wigner_small_d(two_s, kPi / 4)).first;
      // Column m_z' = (m_A - m_B)/2, row m_z = l - S.
      for (int l = 0; l <= two_s; ++l) {
        const Real x = it->second.at(2 * l - two_s, ma - mb);
        out[static_cast<std::size_t>(l)] += w * x * x;
      }
    }
  return out;
}

Real ming_lossy_fock(int n, Real gamma) {
  return 2.0 * shannon_bits(lossy_fock_selfconv(n, gamma)) - 2.0 * shannon_bits(lossy_fock_state(n, gamma));
}

Real cat_trace(Complex z, int sign) { return 1.0 + sign * std::exp(-2.0 * std::norm(z)); }

VectorXd cat_T1_spectrum(Complex z, Real gamma) { return descending_eigenvalues(t1_matrix(cat_params(z, gamma))); }

VectorXd cat_T2_spectrum(Complex z, Real gamma) { return descending_eigenvalues(t2_matrix(cat_params(z, gamma))); }

Real ming_lossy_cat(Complex z, Real gamma) {
  return 2.0 * shannon_bits(cat_T2_spectrum(z, gamma)) - 2.0 * shannon_bits(cat_T1_spectrum(z, gamma));
}

Real ming_lossy_cat_entropy_sum(Complex z, Real gamma) {
  return 2.0 * shannon_bits(cat_T2_spectrum(z, gamma)) + 2.0 * shannon_bits(cat_T1_spectrum(z, gamma));
}

MatrixXd cat_A_matrix(Complex z, Real gamma) { return a_matrix(cat_params(z, gamma)); }

VectorXd cat_nu_vector(Complex z, Real gamma, int s1, int s2) { return nu_vector(cat_params(z, gamma), s1, s2); }

Real dF_lossy_cat(Complex z, Real gamma) {
  const CatParams p = cat_params(z, gamma);
  const MatrixXd t1 = t1_matrix(p), t2 = t2_matrix(p);
  const Real pur1 = (t1 * t1).trace(), pur2 = (t2 * t2).trace();
  const MatrixXd a = a_matrix(p);
  MatrixXd aa(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) aa.block(3 * i, 3 * j, 3, 3) = a(i, j) * a;
  Real cross = 0;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) {
      const Real w = (s1 > 0 ? p.np : p.nm) * (s2 > 0 ? p.np : p.nm);
      const VectorXd nu = nu_vector(p, s1, s2);
      cross += w * nu.dot(aa * nu);
    }
  cross /= std::pow(p.norm, 6);
  return std::sqrt(std::max(0.0, pur1 * pur1 + pur2 * pur2 - 2.0 * cross));
}

}  // namespace ngconv::oracles
