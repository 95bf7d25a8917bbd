#include "ngconv/protocol.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ngconv/gaussian.hpp"
#include "ngconv/linalg.hpp"
#include "ngconv/quadrature.hpp"

namespace ngconv {

NoiseConfig NoiseConfig::uniform(Real eps, int order) {
  NoiseConfig n;
  n.displacement_variance = eps * eps;
  n.dephasing_variance = eps * eps;
  n.gamma = eps;
  n.bs_variance = eps * eps;
  n.readout_flip = eps;
  n.order = order;
  return n;
}

void NoiseConfig::validate() const {
  auto bad = [](const char* what) { throw InvalidArgument(std::string("noise: ") + what); };
  if (!(displacement_variance >= 0) || std::isinf(displacement_variance)) bad("displacement variance must be >= 0");
  if (!(dephasing_variance >= 0) || std::isinf(dephasing_variance)) bad("dephasing variance must be >= 0");
  if (!(bs_variance >= 0) || std::isinf(bs_variance)) bad("beam splitter variance must be >= 0");
  if (!(gamma >= 0 && gamma <= 1)) bad("loss rate must lie in [0, 1]");
  if (!(readout_flip >= 0 && readout_flip <= 1)) bad("readout flip probability must lie in [0, 1]");
  if (order < 1) bad("quadrature order must be >= 1");
}

bool NoiseConfig::noiseless() const {
  return displacement_variance == 0 && dephasing_variance == 0 && gamma == 0 && bs_variance == 0 &&
         readout_flip == 0;
}

BosonicChannel NoiseConfig::mode_channel() const {
  return standard_noise(displacement_variance, dephasing_variance, gamma, order);
}

namespace {

bool has_mode_noise(const NoiseConfig& n) {
  return n.displacement_variance > 0 || n.dephasing_variance > 0 || n.gamma > 0;
}

DensityMatrix stage_noise(const DensityMatrix& rho, const NoiseConfig& noise, const ProtocolOptions& opts) {
  if (!has_mode_noise(noise)) return rho;
  return auto_truncate(apply(noise.mode_channel(), rho, opts.tol), opts.stage_tail);
}

// (angle, weight) pairs of the noisy beam splitter mixture.
std::vector<std::pair<Real, Real>> angle_mixture(Real theta, const NoiseConfig& noise) {
  if (noise.bs_variance == 0) return {{theta, 1.0}};
  const GaussHermite& gh = gauss_hermite(noise.order);
  const Real scale = std::sqrt(2.0 * noise.bs_variance);
  std::vector<std::pair<Real, Real>> out;
  for (int i = 0; i < noise.order; ++i) out.emplace_back(theta + scale * gh.nodes(i), gh.weights(i) / std::sqrt(kPi));
  return out;
}

Real ensemble_drop(const DensityMatrix& rho, const Ensemble& e) { return std::max(0.0, rho.trace() - e.weights.sum()); }

// Arm A of the noisy beam splitter on rho (x) rho.
DensityMatrix noisy_layer_plus(const DensityMatrix& rho, const NoiseConfig& noise, const ProtocolOptions& opts) {
  const Ensemble e = ensemble_of(rho, opts.conv.weight_cut);
  const Real leak = 2.0 * (rho.leakage() + ensemble_drop(rho, e));
  MatrixXc acc;
  FockSpec spec;
  Real leakage = 0;
  for (const auto& [theta, w] : angle_mixture(opts.conv.theta, noise)) {
    ConvOptions c = opts.conv;
    c.theta = theta;
    const ConvolutionPair pair = convolve(e, e, leak, c);
    if (acc.size() == 0) {
      acc = w * pair.plus.matrix();
      spec = pair.plus.spec();
    } else {
      acc.noalias() += w * pair.plus.matrix();
    }
    leakage = std::max(leakage, pair.plus.leakage());
  }
  acc = 0.5 * (acc + acc.adjoint()).eval();
  return DensityMatrix(spec, std::move(acc), leakage);
}

// <P_B> after the noisy beam splitter on rho (x) sigma.
Real noisy_layer_parity(const DensityMatrix& rho, const DensityMatrix& sigma, const NoiseConfig& noise,
                        const ProtocolOptions& opts) {
  const Ensemble a = ensemble_of(rho, opts.conv.weight_cut);
  const Ensemble b = ensemble_of(sigma, opts.conv.weight_cut);
  const FockSpec joint = joint_output_spec(a.spec, b.spec);
  const auto d = static_cast<Eigen::Index>(joint.cutoff(1));
  Real total = 0;
  for (const auto& [theta, w] : angle_mixture(opts.conv.theta, noise)) {
    ConvOptions c = opts.conv;
    c.theta = theta;
    Real p = 0;
    visit_joint_outputs(a, b, c, [&](Real wv, const VectorXc& v) {
      Real s = 0;
      for (Eigen::Index k = 0; k < v.size(); ++k) s += ((k % d) % 2 == 0 ? 1.0 : -1.0) * std::norm(v(k));
      p += wv * s;
    });
    total += w * p;
  }
  return total;
}

void require_pure_single_mode(const PureState& psi) {
  if (psi.spec().modes() != 1) throw InvalidArgument("protocols take a single-mode input");
}

}  // namespace

Real run_nge21_protocol(const PureState& psi, const NoiseConfig& noise, const ProtocolOptions& opts) {
  noise.validate();
  require_pure_single_mode(psi);
  const DensityMatrix r0 = stage_noise(psi.density(), noise, opts);
  const DensityMatrix r1 = noisy_layer_plus(r0, noise, opts);
  const DensityMatrix r2 = stage_noise(r1, noise, opts);
  return (1.0 - 2.0 * noise.readout_flip) * noisy_layer_parity(r2, r2, noise, opts);
}

Real run_zero_mean_protocol(const PureState& psi, const NoiseConfig& noise, const ProtocolOptions& opts) {
  noise.validate();
  require_pure_single_mode(psi);
  const GaussianMoments<Real> m = moments_from_state(psi.density(), opts.tol);
  if (m.mean.norm() >= 1e-6) {
    std::ostringstream os;
    os << "zero-mean protocol requires a zero-mean state; |mean| = " << m.mean.norm();
    throw InvalidArgument(os.str());
  }
  const DensityMatrix r0 = stage_noise(psi.density(), noise, opts);
  const DensityMatrix r1 = noisy_layer_plus(r0, noise, opts);
  const DensityMatrix r2 = stage_noise(r1, noise, opts);
  const DensityMatrix third = stage_noise(r0, noise, opts);
  return (1.0 - 2.0 * noise.readout_flip) * noisy_layer_parity(r2, third, noise, opts);
}

namespace {

constexpr std::size_t kReferenceElements = 40'000'000;

// rho = V V^dagger over the columns of V.
struct Purified {
  FockSpec spec;
  MatrixXc v;
};

// Rank-revealing reduction of V at cost min(rows, cols)^3.
void compress(Purified& s) {
  if (s.v.cols() <= 1) return;
  if (s.v.cols() > s.v.rows()) {
    MatrixXc rho = s.v * s.v.adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho);
    const Real tr = rho.trace().real();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 1e-15 * tr) keep.push_back(i);
    MatrixXc out(s.v.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
      out.col(static_cast<Eigen::Index>(k)) = std::sqrt(es.eigenvalues()(keep[k])) * es.eigenvectors().col(keep[k]);
    s.v = std::move(out);
    return;
  }
  const MatrixXc g = s.v.adjoint() * s.v;
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(g);
  const Real tr = g.trace().real();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-15 * tr) keep.push_back(i);
  MatrixXc sel(g.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) sel.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  s.v = s.v * sel;
}

void guard_columns(const Purified& s, std::size_t cols) {
  if (s.spec.dim() * cols > kReferenceElements)
    throw MemoryGuardError("four-mode reference: purification exceeds the element cap");
}

// rho -> sum_k K_k rho K_k^dagger on one mode.
void kraus_mode(Purified& s, const std::vector<MatrixXc>& ops, int mode) {
  guard_columns(s, static_cast<std::size_t>(s.v.cols()) * ops.size());
  MatrixXc out(s.v.rows(), s.v.cols() * static_cast<Eigen::Index>(ops.size()));
  for (std::size_t k = 0; k < ops.size(); ++k)
    out.middleCols(static_cast<Eigen::Index>(k) * s.v.cols(), s.v.cols()) =
        apply_mode_operator(ops[k], s.v, s.spec, mode);
  s.v = std::move(out);
  compress(s);
}

// Diagonal Kraus set of the dephasing kernel exp(-var (m - n)^2 / 2).
std::vector<MatrixXc> dephasing_kraus(Real variance, int cutoff) {
  MatrixXd k(cutoff, cutoff);
  for (int m = 0; m < cutoff; ++m)
    for (int n = 0; n < cutoff; ++n) k(m, n) = std::exp(-0.5 * variance * (m - n) * (m - n));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(k);
  std::vector<MatrixXc> ops;
  for (int j = 0; j < cutoff; ++j) {
    const Real l = es.eigenvalues()(j);
    if (l <= 1e-15) continue;
    const VectorXd c = std::sqrt(l) * es.eigenvectors().col(j);
    ops.push_back(c.cast<Complex>().asDiagonal());
  }
  return ops;
}

void mode_noise(Purified& s, const NoiseConfig& noise, std::initializer_list<int> modes) {
  const int c = s.spec.cutoff(0);
  for (int m : modes) {
    if (noise.gamma > 0) kraus_mode(s, loss_kraus(noise.gamma, c), m);
    if (noise.dephasing_variance > 0) kraus_mode(s, dephasing_kraus(noise.dephasing_variance, c), m);
  }
}

void noisy_bs(Purified& s, const NoiseConfig& noise, int a, int b) {
  const auto mix = angle_mixture(kPi / 4, noise);
  guard_columns(s, static_cast<std::size_t>(s.v.cols()) * mix.size());
  MatrixXc out(s.v.rows(), s.v.cols() * static_cast<Eigen::Index>(mix.size()));
  const int c = s.spec.cutoff(0);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    MatrixXc cols = s.v;
    apply_beamsplitter(cols, s.spec, a, b, beamsplitter_blocks(mix[i].first, c - 1));
    out.middleCols(static_cast<Eigen::Index>(i) * s.v.cols(), s.v.cols()) = std::sqrt(mix[i].second) * cols;
  }
  s.v = std::move(out);
  compress(s);
}

}  // namespace

Real nge21_four_mode_reference(const PureState& psi, const NoiseConfig& noise) {
  noise.validate();
  require_pure_single_mode(psi);
  if (noise.displacement_variance > 0) throw InvalidArgument("four-mode reference: displacement noise unsupported");
  const int d = psi.spec().cutoff(0);
  if (d > 6) throw InvalidArgument("four-mode reference: input cutoff must be <= 6");
  const int c = 4 * d - 3;
  const PureState one = embed(psi, {c});
  PureState four = tensor(tensor(one, one), tensor(one, one));
  Purified s{four.spec(), four.amplitudes()};
  mode_noise(s, noise, {0, 1, 2, 3});
  noisy_bs(s, noise, 0, 1);
  noisy_bs(s, noise, 2, 3);
  mode_noise(s, noise, {0, 2});
  noisy_bs(s, noise, 0, 2);
  const std::size_t stride = s.spec.stride(2);
  Real p = 0;
  for (Eigen::Index k = 0; k < s.v.rows(); ++k) {
    const int n2 = static_cast<int>((static_cast<std::size_t>(k) / stride) % static_cast<std::size_t>(c));
    p += (n2 % 2 == 0 ? 1.0 : -1.0) * s.v.row(k).squaredNorm();
  }
  return (1.0 - 2.0 * noise.readout_flip) * p;
}

FrobeniusCircuits run_dF_circuits(const DensityMatrix& rho, const ProtocolOptions& opts) {
  const Ensemble e = ensemble_of(rho, opts.conv.weight_cut);
  const ConvolutionPair pair = convolve(rho, rho, opts.conv);
  FrobeniusCircuits r;
  // (c): two copies of rho_AB = U (rho (x) rho) U^dagger; the swap test
  // factorizes into one parity readout per copy pair.
  const Real p = overlap_via_parity(rho, rho, opts.conv);
  r.joint_purity = p * p;
  // (e): swap tests on the marginals.
  r.marginal_purity = overlap_via_parity(pair.plus, pair.plus, opts.conv) *
                      overlap_via_parity(pair.minus, pair.minus, opts.conv);
  // (d): <P (x) P> after beam splitters between rho_AB and rho_A (x) rho_B,
  // which is <v| rho_A (x) rho_B |v> summed over the joint ensemble.
  const MatrixXc& ra = pair.plus.matrix();
  const MatrixXc& rb = pair.minus.matrix();
  const MatrixXc rat = ra.transpose();
  const auto d = static_cast<Eigen::Index>(pair.plus.spec().dim());
  Complex cross = 0;
  visit_joint_outputs(e, e, opts.conv, [&](Real w, const VectorXc& v) {
    const Eigen::Map<const MatrixXc> mt(v.data(), d, d);
    cross += w * mt.conjugate().cwiseProduct(rb * mt * rat).sum();
  });
  r.cross = cross.real();
  r.d_f = std::sqrt(std::max(0.0, r.joint_purity + r.marginal_purity - 2.0 * r.cross));
  return r;
}

ShotEstimate sample_shots(Real expectation, const ShotPlan& plan) {
  if (plan.shots < 1) throw InvalidArgument("sample_shots: shots must be >= 1");
  if (!(std::abs(expectation) <= 1.0 + 1e-12)) throw InvalidArgument("sample_shots: expectation must lie in [-1, 1]");
  const Real p_plus = 0.5 * (1.0 + std::clamp(expectation, -1.0, 1.0));
  std::mt19937_64 gen(plan.seed);
  std::int64_t plus = 0;
  for (std::int64_t i = 0; i < plan.shots; ++i) {
    const Real u = static_cast<Real>(gen() >> 11) * 0x1.0p-53;
    if (u < p_plus) ++plus;
  }
  ShotEstimate s;
  s.shots = plan.shots;
  s.estimate = static_cast<Real>(2 * plus - plan.shots) / static_cast<Real>(plan.shots);
  s.stderr_ = std::sqrt(std::max(0.0, 1.0 - s.estimate * s.estimate) / static_cast<Real>(plan.shots));
  return s;
}

std::vector<SweepRow> sweep(const std::vector<Real>& state_grid, const std::vector<Real>& noise_grid,
                            const SweepEvaluator& evaluate, const SweepSink& sink) {
  std::vector<SweepRow> rows;
  rows.reserve(state_grid.size() * noise_grid.size());
  for (Real s : state_grid)
    for (Real n : noise_grid) {
      rows.push_back(evaluate(s, n));
      if (sink) sink(rows.back());
    }
  return rows;
}

}  // namespace ngconv
