#include "ngconv/measures.hpp"

#include <cmath>
#include <sstream>

#include "ngconv/gaussian.hpp"
#include "ngconv/linalg.hpp"

namespace ngconv {

namespace {

MeasureReport report_for(const DensityMatrix& out) {
  MeasureReport r;
  r.cutoffs = out.spec().cutoffs();
  r.leakage = out.leakage();
  return r;
}

Real entropy_with_clip(const DensityMatrix& rho, Real alpha, const Tolerances& tol, Real& clipped) {
  const Spectrum s = hermitian_spectrum(rho, tol);
  clipped += s.clipped_mass;
  return renyi_entropy(s.values, alpha, tol.rank);
}

// Eigenpairs of a Hermitian marginal restricted to eigenvalues > threshold.
struct Support {
  MatrixXc vectors;
  VectorXd values;
};

Support support_of(const DensityMatrix& rho, Real threshold) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho.matrix());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > threshold) keep.push_back(i);
  Support s{MatrixXc(rho.matrix().rows(), static_cast<Eigen::Index>(keep.size())),
            VectorXd(static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    s.vectors.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
    s.values(static_cast<Eigen::Index>(k)) = es.eigenvalues()(keep[k]);
  }
  return s;
}

}  // namespace

MeasureReport nge(const PureState& psi, Real alpha, int k, const MeasureOptions& opts) {
  if (k < 1) throw InvalidArgument("nge: k must be >= 1");
  if (!(alpha >= 0)) throw InvalidArgument("nge: alpha must be >= 0");
  const DensityMatrix out = boxplus_power(psi, k, opts.conv);
  MeasureReport r = report_for(out);
  r.value = entropy_with_clip(out, alpha, opts.tol, r.clipped_mass);
  return r;
}

MeasureReport nge(const DensityMatrix& rho, Real alpha, int k, const MeasureOptions& opts) {
  const Real p = purity(rho);
  if (p < 1.0 - 1e-8) {
    std::ostringstream os;
    os << "nge requires a pure state; purity is " << p;
    throw InvalidArgument(os.str());
  }
  const Ensemble e = ensemble_of(rho, opts.conv.weight_cut);
  VectorXc v = e.vectors.col(0);
  v /= v.norm();
  return nge(PureState(rho.spec(), v, rho.leakage()), alpha, k, opts);
}

Real average_parity(const PureState& psi, const MeasureOptions& opts) {
  return purity(boxplus(psi, psi, opts.conv));
}

Real zero_mean_parity(const PureState& psi, const MeasureOptions& opts) {
  const GaussianMoments<Real> m = moments_from_state(psi.density(), opts.tol);
  if (m.mean.norm() >= opts.mean_tolerance) {
    std::ostringstream os;
    os << "zero_mean_parity requires a zero-mean state; |mean| = " << m.mean.norm();
    throw InvalidArgument(os.str());
  }
  const DensityMatrix out = boxplus(psi, psi, opts.conv);
  const PureState big = embed(psi, out.spec().cutoffs());
  return big.amplitudes().dot(out.matrix() * big.amplitudes()).real();
}

MeasureReport ming(const DensityMatrix& rho, Real alpha, const MeasureOptions& opts) {
  if (!(alpha >= 0.5) || std::isinf(alpha)) throw InvalidArgument("ming: alpha must be finite and >= 1/2");
  const ConvolutionPair pair = convolve(rho, rho, opts.conv);
  MeasureReport r = report_for(pair.plus);
  if (alpha == 1) {
    const Real sa = entropy_with_clip(pair.plus, 1.0, opts.tol, r.clipped_mass);
    const Real sb = entropy_with_clip(pair.minus, 1.0, opts.tol, r.clipped_mass);
    const Real s = entropy_with_clip(rho, 1.0, opts.tol, r.clipped_mass);
    r.value = sa + sb - 2.0 * s;
    return r;
  }

  // sigma = rho_A (x) rho_B; work in its eigenbasis restricted to support.
  const Support sa = support_of(pair.plus, opts.support_threshold);
  const Support sb = support_of(pair.minus, opts.support_threshold);
  const Real p = (1.0 - alpha) / (2.0 * alpha);
  const VectorXd la = sa.values.array().pow(p);
  const VectorXd lb = sb.values.array().pow(p);
  const MatrixXd scale = la * lb.transpose();
  const auto d = static_cast<Eigen::Index>(pair.plus.spec().dim());
  const Eigen::Index na = sa.values.size(), nb = sb.values.size();

  std::vector<VectorXc> cols;
  Real outside = 0;
  const Ensemble e = ensemble_of(rho, opts.conv.weight_cut);
  visit_joint_outputs(e, e, opts.conv, [&](Real w, const VectorXc& v) {
    const Eigen::Map<const MatrixXc> mt(v.data(), d, d);  // M^T
    // Coefficients in the product eigenbasis: V_A^dagger M conj(V_B).
    const MatrixXc coeff = sa.vectors.adjoint() * mt.transpose() * sb.vectors.conjugate();
    outside += w * std::max(0.0, v.squaredNorm() - coeff.squaredNorm());
    const MatrixXc scaled = std::sqrt(w) * coeff.cwiseProduct(scale.cast<Complex>());
    cols.emplace_back(Eigen::Map<const VectorXc>(scaled.data(), na * nb));
  });
  r.projected_mass = outside;
  if (outside > opts.support_mass_limit && alpha > 1) {
    r.value = kInfinity;
    return r;
  }
  MatrixXc c(na * nb, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) c.col(static_cast<Eigen::Index>(i)) = cols[i];
  const MatrixXc g = c.adjoint() * c;
  const Spectrum sg = hermitian_spectrum(MatrixXc(0.5 * (g + g.adjoint())), opts.tol);
  r.clipped_mass += sg.clipped_mass;
  Real q = 0;
  for (Real l : sg.values)
    if (l > 0) q += std::pow(l, alpha);
  r.value = std::log2(q) / (alpha - 1.0);
  return r;
}

FrobeniusReport d_frobenius(const DensityMatrix& rho, const MeasureOptions& opts) {
  const Ensemble e = ensemble_of(rho, opts.conv.weight_cut);
  const ConvolutionPair pair = convolve(rho, rho, opts.conv);
  FrobeniusReport r;
  r.cutoffs = pair.plus.spec().cutoffs();
  r.leakage = pair.plus.leakage();
  const MatrixXc& ra = pair.plus.matrix();
  const MatrixXc& rb = pair.minus.matrix();
  const MatrixXc rat = ra.transpose();
  const auto d = static_cast<Eigen::Index>(pair.plus.spec().dim());
  // Tr[rho_AB (rho_A (x) rho_B)] = sum_w Tr(M^dagger rho_A M rho_B^T). With
  // Mt = M^T this is sum(conj(Mt) .* (rho_B Mt rho_A^T)).
  Complex cross = 0;
  visit_joint_outputs(e, e, opts.conv, [&](Real w, const VectorXc& v) {
    const Eigen::Map<const MatrixXc> mt(v.data(), d, d);
    const MatrixXc x = rb * mt * rat;
    cross += w * mt.conjugate().cwiseProduct(x).sum();
  });
  const Real p = purity(rho);
  r.joint_purity = p * p;
  r.marginal_purity = purity(pair.plus) * purity(pair.minus);
  r.cross = cross.real();
  r.value = std::sqrt(std::max(0.0, r.joint_purity + r.marginal_purity - 2.0 * r.cross));
  return r;
}

Verdict gaussianity_verdict(const PureState& psi, Real threshold, const MeasureOptions& opts) {
  Verdict v;
  const DensityMatrix out = boxplus(psi, psi, opts.conv);
  v.report = report_for(out);
  v.report.value = purity(out);
  v.gaussian = v.report.value >= 1.0 - threshold;
  return v;
}

Verdict gaussianity_verdict(const DensityMatrix& rho, Real threshold, const MeasureOptions& opts) {
  Verdict v;
  v.report = d_frobenius(rho, opts);
  v.gaussian = v.report.value <= threshold;
  return v;
}

}  // namespace ngconv
