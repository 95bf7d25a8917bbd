#include "ngconv/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ngconv/conv.hpp"
#include "ngconv/quadrature.hpp"

namespace ngconv {

BosonicChannel loss_channel(Real gamma, std::vector<int> modes) {
  BosonicChannel c{LossChannel{gamma}, std::move(modes)};
  validate(c);
  return c;
}

BosonicChannel dephasing_channel(Real variance, std::vector<int> modes) {
  BosonicChannel c{DephasingChannel{variance}, std::move(modes)};
  validate(c);
  return c;
}

BosonicChannel displacement_noise_channel(Real variance, int order, std::vector<int> modes) {
  BosonicChannel c{DisplacementNoise{variance, order}, std::move(modes)};
  validate(c);
  return c;
}

BosonicChannel noisy_beamsplitter(Real theta, Real variance, int order, int mode_a, int mode_b) {
  BosonicChannel c{NoisyBeamSplitter{theta, variance, order}, {mode_a, mode_b}};
  validate(c);
  return c;
}

BosonicChannel kraus_channel(std::vector<MatrixXc> ops, std::vector<int> modes) {
  BosonicChannel c{KrausChannel{std::move(ops)}, std::move(modes)};
  validate(c);
  return c;
}

BosonicChannel compose(std::vector<BosonicChannel> ops) { return BosonicChannel{Composition{std::move(ops)}, {}}; }

BosonicChannel standard_noise(Real displacement_variance, Real dephasing_variance, Real gamma, int order,
                              std::vector<int> modes) {
  return compose({displacement_noise_channel(displacement_variance, order, modes),
                  dephasing_channel(dephasing_variance, modes), loss_channel(gamma, modes)});
}

std::vector<MatrixXc> loss_kraus(Real gamma, int cutoff) {
  if (!(gamma >= 0 && gamma <= 1)) throw InvalidArgument("loss rate must lie in [0, 1]");
  std::vector<MatrixXc> ks;
  for (int k = 0; k < cutoff; ++k) {
    if (gamma == 0 && k > 0) break;
    MatrixXc m = MatrixXc::Zero(cutoff, cutoff);
    for (int n = k; n < cutoff; ++n) {
      // sqrt(C(n, k)) gamma^{k/2} (1 - gamma)^{(n-k)/2}
      const Real logc = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
      const Real g = k == 0 ? 1.0 : std::pow(gamma, 0.5 * k);
      const Real h = n == k ? 1.0 : std::pow(1.0 - gamma, 0.5 * (n - k));
      m(n - k, n) = std::exp(logc) * g * h;
    }
    ks.push_back(std::move(m));
  }
  return ks;
}

namespace {

struct Validator {
  void operator()(const LossChannel& c) const {
    if (!(c.gamma >= 0 && c.gamma <= 1)) throw InvalidArgument("loss rate must lie in [0, 1]");
  }
  void operator()(const DephasingChannel& c) const {
    if (!(c.variance >= 0)) throw InvalidArgument("dephasing variance must be >= 0");
  }
  void operator()(const DisplacementNoise& c) const {
    if (!(c.variance >= 0)) throw InvalidArgument("displacement variance must be >= 0");
    if (c.order < 3) throw InvalidArgument("quadrature order must be >= 3");
  }
  void operator()(const NoisyBeamSplitter& c) const {
    if (!(c.variance >= 0)) throw InvalidArgument("beam splitter angle variance must be >= 0");
    if (c.order < 3) throw InvalidArgument("quadrature order must be >= 3");
  }
  void operator()(const KrausChannel& c) const {
    if (c.ops.empty()) throw InvalidArgument("Kraus channel needs at least one operator");
  }
  void operator()(const Composition& c) const {
    for (const auto& op : c.ops) validate(op);
  }
};

std::vector<int> targets(const BosonicChannel& ch, const FockSpec& spec) {
  std::vector<int> m = ch.modes;
  if (m.empty())
    for (int i = 0; i < spec.modes(); ++i) m.push_back(i);
  for (int x : m)
    if (x < 0 || x >= spec.modes()) throw InvalidArgument("channel target mode out of range");
  return m;
}

int occ(const FockSpec& s, std::size_t k, int mode) {
  return static_cast<int>((k / s.stride(mode)) % static_cast<std::size_t>(s.cutoff(mode)));
}

DensityMatrix kraus_on_mode(const std::vector<MatrixXc>& ops, const DensityMatrix& rho, int mode) {
  const FockSpec out = with_cutoff(rho.spec(), mode, static_cast<int>(ops.front().rows()));
  const auto d = static_cast<Eigen::Index>(out.dim());
  MatrixXc acc = MatrixXc::Zero(d, d);
  for (const auto& k : ops) acc += conjugate_mode_operator(k, rho.matrix(), rho.spec(), mode);
  acc = 0.5 * (acc + acc.adjoint()).eval();
  const Real lost = std::max(0.0, rho.trace() - acc.trace().real());
  return DensityMatrix(out, std::move(acc), rho.leakage() + lost);
}

DensityMatrix dephase_mode(const DensityMatrix& rho, int mode, Real variance) {
  if (variance == 0) return rho;
  const FockSpec& s = rho.spec();
  MatrixXc m = rho.matrix();
  const auto dim = static_cast<Eigen::Index>(s.dim());
  std::vector<Real> damp(static_cast<std::size_t>(s.cutoff(mode)));
  for (std::size_t k = 0; k < damp.size(); ++k) damp[k] = std::exp(-0.5 * variance * static_cast<Real>(k * k));
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int nj = occ(s, static_cast<std::size_t>(j), mode);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const int ni = occ(s, static_cast<std::size_t>(i), mode);
      m(i, j) *= damp[static_cast<std::size_t>(std::abs(ni - nj))];
    }
  }
  return DensityMatrix(s, std::move(m), rho.leakage());
}

// One evaluation of the displacement mixture at a fixed output cutoff.
// <m|D(xi)|k> is e^{-|xi|^2/2} times a polynomial of degree m + k, so the
// envelope e^{-|xi|^2} of D rho D^dagger is folded into the Gaussian weight
// (variance v -> v / (1 + 2v)) and what remains is a polynomial of degree
// <= 2 (d_out + d_in - 2) per component. Order d_out + d_in - 1 is exact;
// `order` is a floor.
MatrixXc displacement_mixture(const DensityMatrix& rho, int mode, Real variance, int order, int d_out) {
  const int d_in = rho.spec().cutoff(mode);
  const int q = std::max(order, d_out + d_in - 1);
  const GaussHermite& gh = gauss_hermite(q);
  const FockSpec out = with_cutoff(rho.spec(), mode, d_out);
  const auto d = static_cast<Eigen::Index>(out.dim());
  const Real folded = variance / (1 + 2 * variance);
  const Real scale = std::sqrt(2.0 * folded);
  const Real norm = folded / variance / kPi;
  MatrixXc acc = MatrixXc::Zero(d, d);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      const Complex xi(scale * gh.nodes(i), scale * gh.nodes(j));
      const Real w = norm * gh.weights(i) * gh.weights(j) * std::exp(std::norm(xi));
      if (w < 1e-18) continue;
      const MatrixXc blk = displacement_block(xi, d_out, d_in);
      acc.noalias() += w * conjugate_mode_operator(blk, rho.matrix(), rho.spec(), mode);
    }
  return 0.5 * (acc + acc.adjoint());
}

DensityMatrix displace_noise_mode(const DensityMatrix& rho, int mode, Real variance, int order,
                                  const Tolerances& tol) {
  if (variance == 0) return rho;
  const int d_in = rho.spec().cutoff(mode);
  const int step = 8;
  const int cap = 4 * d_in + 400;
  int d_out = d_in + step;
  MatrixXc out;
  Real lost = 0;
  for (;;) {
    out = displacement_mixture(rho, mode, variance, order, d_out);
    lost = std::max(0.0, rho.trace() - out.trace().real());
    if (lost <= 1e-14) break;
    d_out += step;
    if (d_out > cap) {
      std::ostringstream os;
      os << "displacement noise: output cutoff above " << cap << " still loses mass " << lost;
      throw TruncationError(os.str());
    }
  }
  if (lost > tol.truncation) throw TruncationError("displacement noise leakage above tolerance");
  const DensityMatrix full(with_cutoff(rho.spec(), mode, d_out), std::move(out), rho.leakage() + lost);
  // Trim the grown mode back to where its marginal tail is negligible.
  const VectorXd pop = marginal_populations(full, mode);
  Real tail = 0;
  int keep = d_out;
  while (keep > d_in && tail + std::max(pop(keep - 1), 0.0) <= 1e-13) {
    tail += std::max(pop(keep - 1), 0.0);
    --keep;
  }
  if (keep == d_out) return full;
  std::vector<int> cut = full.spec().cutoffs();
  cut[static_cast<std::size_t>(mode)] = keep;
  return truncate(full, cut);
}

DensityMatrix noisy_bs(const DensityMatrix& rho, int a, int b, const NoisyBeamSplitter& c, const Tolerances& tol) {
  const FockSpec& s = rho.spec();
  if (s.cutoff(a) != s.cutoff(b)) throw InvalidArgument("noisy beam splitter modes must share one cutoff");
  const int cut = s.cutoff(a);
  Real outside = 0;
  for (std::size_t k = 0; k < s.dim(); ++k)
    if (occ(s, k, a) + occ(s, k, b) > cut - 1)
      outside += std::abs(rho.matrix()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real());
  if (outside > tol.truncation) {
    std::ostringstream os;
    os << "noisy beam splitter: mass " << outside
       << " lies in incomplete photon-number sectors; embed the inputs first";
    throw TruncationError(os.str());
  }
  if (c.variance == 0)
    return DensityMatrix(s, conjugate_beamsplitter(rho.matrix(), s, a, b, beamsplitter_blocks(c.theta, cut - 1)),
                         rho.leakage());
  const GaussHermite& gh = gauss_hermite(c.order);
  const Real scale = std::sqrt(2.0 * c.variance);
  const auto d = static_cast<Eigen::Index>(s.dim());
  MatrixXc acc = MatrixXc::Zero(d, d);
  for (int i = 0; i < c.order; ++i) {
    const Real w = gh.weights(i) / std::sqrt(kPi);
    acc.noalias() += w * conjugate_beamsplitter(rho.matrix(), s, a, b,
                                                beamsplitter_blocks(c.theta + scale * gh.nodes(i), cut - 1));
  }
  acc = 0.5 * (acc + acc.adjoint()).eval();
  return DensityMatrix(s, std::move(acc), rho.leakage());
}

struct Applier {
  const BosonicChannel& ch;
  const DensityMatrix& rho;
  const Tolerances& tol;

  DensityMatrix operator()(const LossChannel& c) const {
    if (c.gamma == 0) return rho;
    DensityMatrix cur = rho;
    for (int m : targets(ch, rho.spec())) cur = kraus_on_mode(loss_kraus(c.gamma, cur.spec().cutoff(m)), cur, m);
    return cur;
  }
  DensityMatrix operator()(const DephasingChannel& c) const {
    DensityMatrix cur = rho;
    for (int m : targets(ch, rho.spec())) cur = dephase_mode(cur, m, c.variance);
    return cur;
  }
  DensityMatrix operator()(const DisplacementNoise& c) const {
    DensityMatrix cur = rho;
    for (int m : targets(ch, rho.spec())) cur = displace_noise_mode(cur, m, c.variance, c.order, tol);
    return cur;
  }
  DensityMatrix operator()(const NoisyBeamSplitter& c) const {
    const auto t = ch.modes.empty() ? std::vector<int>{0, 1} : ch.modes;
    if (t.size() != 2) throw InvalidArgument("noisy beam splitter needs exactly two target modes");
    return noisy_bs(rho, t[0], t[1], c, tol);
  }
  DensityMatrix operator()(const KrausChannel& c) const {
    DensityMatrix cur = rho;
    for (int m : targets(ch, rho.spec())) {
      if (c.ops.front().cols() != cur.spec().cutoff(m))
        throw InvalidArgument("Kraus operator width does not match the mode cutoff");
      cur = kraus_on_mode(c.ops, cur, m);
    }
    return cur;
  }
  DensityMatrix operator()(const Composition& c) const {
    DensityMatrix cur = rho;
    for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) cur = ngconv::apply(*it, cur, tol);
    return cur;
  }
};

}  // namespace

void validate(const BosonicChannel& channel) { std::visit(Validator{}, channel.kind); }

DensityMatrix apply(const BosonicChannel& channel, const DensityMatrix& rho, const Tolerances& tol) {
  validate(channel);
  return std::visit(Applier{channel, rho, tol}, channel.kind);
}

DensityMatrix loss_via_ancilla(const DensityMatrix& rho, Real gamma) {
  if (!(gamma >= 0 && gamma <= 1)) throw InvalidArgument("loss rate must lie in [0, 1]");
  if (rho.spec().modes() != 1) throw InvalidArgument("loss_via_ancilla takes a single-mode state");
  const int d = rho.spec().cutoff(0);
  const DensityMatrix joint = tensor(rho, fock_state(0, d).density());
  const Real theta = std::asin(std::sqrt(gamma));
  const DensityMatrix out(joint.spec(),
                          conjugate_beamsplitter(joint.matrix(), joint.spec(), 0, 1, beamsplitter_blocks(theta, d - 1)),
                          joint.leakage());
  const int keep[1] = {0};
  return partial_trace(out, keep);
}

Real displacement_noise_convergence(const DensityMatrix& rho, Real variance, int order) {
  const DensityMatrix a = apply(displacement_noise_channel(variance, order), rho);
  const DensityMatrix b = apply(displacement_noise_channel(variance, 2 * order), rho);
  std::vector<int> cut = a.spec().cutoffs();
  for (std::size_t i = 0; i < cut.size(); ++i) cut[i] = std::max(cut[i], b.spec().cutoff(static_cast<int>(i)));
  return (embed(a, cut).matrix() - embed(b, cut).matrix()).cwiseAbs().maxCoeff();
}

}  // namespace ngconv
