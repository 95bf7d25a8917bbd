#include "ngconv/conv.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace ngconv {

namespace {

std::vector<MatrixXd> sector_blocks(Real theta, int max_total) {
  std::vector<MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(max_total + 1));
  for (int n = 0; n <= max_total; ++n) {
    if (n == 0) {
      blocks.push_back(MatrixXd::Ones(1, 1));
      continue;
    }
    // Generator: G(k+1,k) = theta sqrt((k+1)(n-k)) = -G(k,k+1). With
    // D = diag(i^k), D^dagger G D = -i J for the real symmetric tridiagonal J
    // with the same off-diagonal, so exp(G) = D exp(-iJ) D^dagger.
    VectorXd diag = VectorXd::Zero(n + 1);
    VectorXd sub(n);
    for (int k = 0; k < n; ++k) sub(k) = theta * std::sqrt(static_cast<Real>(k + 1) * (n - k));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("beam splitter sector eigensolver failed");
    const MatrixXd& q = es.eigenvectors();
    const VectorXc ph = es.eigenvalues().unaryExpr([](Real l) { return std::exp(Complex(0, -l)); });
    const MatrixXc c = q.cast<Complex>() * ph.asDiagonal() * q.transpose().cast<Complex>();
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    MatrixXd b(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k) b(j, k) = (ipow[((j - k) % 4 + 4) % 4] * c(j, k)).real();
    // At the balanced angle b(j, n - k) = (-1)^{n - j} b(j, k); imposing it makes
    // the forced zeros (Hong-Ou-Mandel) exact.
    if (theta == kPi / 4)
      for (int j = 0; j <= n; ++j) {
        const Real s = (n - j) % 2 ? -1.0 : 1.0;
        for (int k = 0; 2 * k <= n; ++k) {
          const Real x = 0.5 * (b(j, k) + s * b(j, n - k));
          b(j, k) = x;
          b(j, n - k) = s * x;
        }
      }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

// Row index lists of every complete (n_a + n_b = n) sector for a mode pair.
struct SectorPlan {
  std::vector<std::size_t> bases;  // joint offsets with n_a = n_b = 0
  std::size_t sa = 0, sb = 0;
  int cutoff = 0;
};

SectorPlan make_plan(const FockSpec& spec, int mode_a, int mode_b) {
  if (mode_a == mode_b || mode_a < 0 || mode_b < 0 || mode_a >= spec.modes() || mode_b >= spec.modes())
    throw InvalidArgument("beam splitter needs two distinct valid modes");
  if (spec.cutoff(mode_a) != spec.cutoff(mode_b))
    throw InvalidArgument("beam splitter modes must share one cutoff");
  SectorPlan p;
  p.sa = spec.stride(mode_a);
  p.sb = spec.stride(mode_b);
  p.cutoff = spec.cutoff(mode_a);
  const auto c = static_cast<std::size_t>(p.cutoff);
  for (std::size_t k = 0; k < spec.dim(); ++k)
    if ((k / p.sa) % c == 0 && (k / p.sb) % c == 0) p.bases.push_back(k);
  return p;
}

void apply_plan(MatrixXc& x, const SectorPlan& p, const std::vector<MatrixXd>& blocks) {
  if (static_cast<int>(blocks.size()) < p.cutoff)
    throw InvalidArgument("beam splitter blocks do not cover every complete sector");
  const Eigen::Index r = x.cols();
  MatrixXc tmp, out;
  std::vector<Eigen::Index> idx;
  for (std::size_t base : p.bases) {
    for (int n = 1; n < p.cutoff; ++n) {
      idx.resize(static_cast<std::size_t>(n + 1));
      for (int k = 0; k <= n; ++k)
        idx[static_cast<std::size_t>(k)] =
            static_cast<Eigen::Index>(base + static_cast<std::size_t>(k) * p.sa +
                                      static_cast<std::size_t>(n - k) * p.sb);
      tmp.resize(n + 1, r);
      for (int k = 0; k <= n; ++k) tmp.row(k) = x.row(idx[static_cast<std::size_t>(k)]);
      out.noalias() = blocks[static_cast<std::size_t>(n)] * tmp;
      for (int k = 0; k <= n; ++k) x.row(idx[static_cast<std::size_t>(k)]) = out.row(k);
    }
  }
}

void guard(std::size_t elements, std::size_t cap, const char* what) {
  if (elements > cap) {
    std::ostringstream os;
    os << what << ": dense buffer of " << elements << " elements exceeds the cap of " << cap;
    throw MemoryGuardError(os.str());
  }
}

Real combined_leakage(Real a, Real b) { return a + b - a * b; }

}  // namespace

void beamsplitter_self_test() {
  static std::once_flag once;
  std::call_once(once, [] {
    const int c = 5;
    const Real theta = 0.37;
    const FockSpec spec({c, c});
    MatrixXc u = MatrixXc::Identity(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(spec.dim()));
    apply_plan(u, make_plan(spec, 0, 1), sector_blocks(theta, c - 1));
    const MatrixXc a = annihilation_matrix(c);
    const MatrixXc id = MatrixXc::Identity(c, c);
    const MatrixXc aa = kron(a, id), ab = kron(id, a);
    const MatrixXc lhs_a = u.adjoint() * aa * u, lhs_b = u.adjoint() * ab * u;
    const MatrixXc rhs_a = std::cos(theta) * aa + std::sin(theta) * ab;
    const MatrixXc rhs_b = std::cos(theta) * ab - std::sin(theta) * aa;
    Real err = 0;
    for (std::size_t k = 0; k < spec.dim(); ++k) {
      const auto occ = spec.occupations(k);
      if (occ[0] + occ[1] > c - 1) continue;
      const auto ki = static_cast<Eigen::Index>(k);
      err = std::max(err, (lhs_a.col(ki) - rhs_a.col(ki)).norm());
      err = std::max(err, (lhs_b.col(ki) - rhs_b.col(ki)).norm());
    }
    if (err > 1e-12) throw NumericalError("beam splitter sign convention self-test failed");
  });
}

std::vector<MatrixXd> beamsplitter_blocks(Real theta, int max_total) {
  beamsplitter_self_test();
  if (max_total < 0) throw InvalidArgument("beamsplitter_blocks: max_total must be >= 0");
  return sector_blocks(theta, max_total);
}

void apply_beamsplitter(MatrixXc& columns, const FockSpec& spec, int mode_a, int mode_b,
                        const std::vector<MatrixXd>& blocks) {
  if (static_cast<std::size_t>(columns.rows()) != spec.dim())
    throw InvalidArgument("apply_beamsplitter: row count does not match spec");
  apply_plan(columns, make_plan(spec, mode_a, mode_b), blocks);
}

MatrixXc conjugate_beamsplitter(const MatrixXc& rho, const FockSpec& spec, int mode_a, int mode_b,
                                const std::vector<MatrixXd>& blocks) {
  const SectorPlan p = make_plan(spec, mode_a, mode_b);
  MatrixXc x = rho;
  apply_plan(x, p, blocks);
  MatrixXc y = x.adjoint();
  apply_plan(y, p, blocks);
  return y;
}

// ---------------------------------------------------------------------------

BeamSplitterOp::BeamSplitterOp(Real theta, int cutoff_a, int cutoff_b)
    : theta_(theta), da_(cutoff_a), db_(cutoff_b) {
  if (cutoff_a < 1 || cutoff_b < 1) throw InvalidArgument("beam splitter cutoffs must be >= 1");
  blocks_ = beamsplitter_blocks(theta, output_cutoff() - 1);
}

MatrixXd BeamSplitterOp::matrix() const {
  const int d = output_cutoff();
  const FockSpec spec({d, d});
  const auto n = static_cast<Eigen::Index>(spec.dim());
  // Columns of incomplete sectors stay zero.
  MatrixXc u = MatrixXc::Zero(n, n);
  for (std::size_t k = 0; k < spec.dim(); ++k) {
    const auto occ = spec.occupations(k);
    if (occ[0] + occ[1] <= d - 1) u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1;
  }
  apply_beamsplitter(u, spec, 0, 1, blocks_);
  return u.real();
}

PureState BeamSplitterOp::apply(const PureState& two_mode) const {
  if (!(two_mode.spec() == FockSpec({da_, db_})))
    throw InvalidArgument("BeamSplitterOp::apply: input spec must be (d_A, d_B)");
  const int d = output_cutoff();
  const PureState e = embed(two_mode, {d, d});
  MatrixXc v = e.amplitudes();
  apply_beamsplitter(v, e.spec(), 0, 1, blocks_);
  return PureState(e.spec(), v.col(0), e.leakage());
}

DensityMatrix BeamSplitterOp::apply(const DensityMatrix& two_mode) const {
  if (!(two_mode.spec() == FockSpec({da_, db_})))
    throw InvalidArgument("BeamSplitterOp::apply: input spec must be (d_A, d_B)");
  const int d = output_cutoff();
  const DensityMatrix e = embed(two_mode, {d, d});
  return DensityMatrix(e.spec(), conjugate_beamsplitter(e.matrix(), e.spec(), 0, 1, blocks_), e.leakage());
}

// ---------------------------------------------------------------------------

std::vector<int> convolution_cutoffs(const FockSpec& a, const FockSpec& b) {
  if (a.modes() != b.modes()) throw InvalidArgument("convolution inputs must have equal mode counts");
  std::vector<int> d(static_cast<std::size_t>(a.modes()));
  for (int i = 0; i < a.modes(); ++i) d[static_cast<std::size_t>(i)] = a.cutoff(i) + b.cutoff(i) - 1;
  return d;
}

FockSpec joint_output_spec(const FockSpec& a, const FockSpec& b) {
  const auto d = convolution_cutoffs(a, b);
  std::vector<int> j = d;
  j.insert(j.end(), d.begin(), d.end());
  return FockSpec(std::move(j));
}

void visit_joint_outputs(const Ensemble& a, const Ensemble& b, const ConvOptions& opts,
                         const JointVisitor& visit) {
  const FockSpec joint = joint_output_spec(a.spec, b.spec);
  const int n = a.spec.modes();
  const std::size_t jd = joint.dim();
  const int batch = std::max(1, std::min<int>(opts.batch, static_cast<int>(opts.max_elements / std::max<std::size_t>(jd, 1))));
  guard(jd, opts.max_elements, "convolution joint vector");

  auto offsets = [&](const FockSpec& s, int first_joint_mode) {
    std::vector<std::size_t> off(s.dim());
    for (std::size_t k = 0; k < s.dim(); ++k) {
      const auto occ = s.occupations(k);
      std::size_t o = 0;
      for (int i = 0; i < n; ++i)
        o += static_cast<std::size_t>(occ[static_cast<std::size_t>(i)]) * joint.stride(first_joint_mode + i);
      off[k] = o;
    }
    return off;
  };
  const auto off_a = offsets(a.spec, 0);
  const auto off_b = offsets(b.spec, n);

  std::vector<SectorPlan> plans;
  std::map<int, std::vector<MatrixXd>> blocks;
  for (int i = 0; i < n; ++i) {
    plans.push_back(make_plan(joint, i, n + i));
    const int c = joint.cutoff(i);
    if (!blocks.count(c)) blocks.emplace(c, beamsplitter_blocks(opts.theta, c - 1));
  }

  const Eigen::Index ra = a.weights.size(), rb = b.weights.size();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < rb; ++j)
      if (a.weights(i) * b.weights(j) > opts.weight_cut * opts.weight_cut) pairs.emplace_back(i, j);

  MatrixXc cols;
  VectorXc v;
  for (std::size_t start = 0; start < pairs.size(); start += static_cast<std::size_t>(batch)) {
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(batch), pairs.size() - start);
    cols.setZero(static_cast<Eigen::Index>(jd), static_cast<Eigen::Index>(count));
    for (std::size_t c = 0; c < count; ++c) {
      const auto [i, j] = pairs[start + c];
      const auto va = a.vectors.col(i);
      const auto vb = b.vectors.col(j);
      for (Eigen::Index ka = 0; ka < va.size(); ++ka) {
        const Complex x = va(ka);
        if (x == Complex(0)) continue;
        const std::size_t oa = off_a[static_cast<std::size_t>(ka)];
        for (Eigen::Index kb = 0; kb < vb.size(); ++kb)
          cols(static_cast<Eigen::Index>(oa + off_b[static_cast<std::size_t>(kb)]), static_cast<Eigen::Index>(c)) =
              x * vb(kb);
      }
    }
    for (int i = 0; i < n; ++i) apply_plan(cols, plans[static_cast<std::size_t>(i)], blocks.at(joint.cutoff(i)));
    for (std::size_t c = 0; c < count; ++c) {
      const auto [i, j] = pairs[start + c];
      v = cols.col(static_cast<Eigen::Index>(c));
      visit(a.weights(i) * b.weights(j), v);
    }
  }
}

ConvolutionPair convolve(const Ensemble& a, const Ensemble& b, Real leakage, const ConvOptions& opts) {
  const auto d = convolution_cutoffs(a.spec, b.spec);
  const FockSpec arm(d);
  const auto da = static_cast<Eigen::Index>(arm.dim());
  guard(static_cast<std::size_t>(da * da), opts.max_elements, "convolution marginal");
  MatrixXc rho_a = MatrixXc::Zero(da, da), rho_b = MatrixXc::Zero(da, da);
  Real pruned = 0;
  Real visited = 0;
  visit_joint_outputs(a, b, opts, [&](Real w, const VectorXc& v) {
    // Row-major reshape M(x_A, x_B) = v[x_A * dim + x_B]; Mt = M^T here.
    const Eigen::Map<const MatrixXc> mt(v.data(), da, da);
    rho_b.noalias() += w * (mt * mt.adjoint());
    rho_a.noalias() += w * (mt.transpose() * mt.conjugate());
    visited += w;
  });
  pruned = std::max(0.0, a.weights.sum() * b.weights.sum() - visited);
  rho_a = 0.5 * (rho_a + rho_a.adjoint()).eval();
  rho_b = 0.5 * (rho_b + rho_b.adjoint()).eval();
  return {DensityMatrix(arm, std::move(rho_a), leakage + pruned),
          DensityMatrix(arm, std::move(rho_b), leakage + pruned)};
}

namespace {

Real ensemble_drop(const DensityMatrix& rho, const Ensemble& e) {
  return std::max(0.0, rho.trace() - e.weights.sum());
}

}  // namespace

ConvolutionPair convolve(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts) {
  const Ensemble a = ensemble_of(rho, opts.weight_cut);
  const Ensemble b = ensemble_of(sigma, opts.weight_cut);
  const Real leak = combined_leakage(rho.leakage() + ensemble_drop(rho, a), sigma.leakage() + ensemble_drop(sigma, b));
  return convolve(a, b, leak, opts);
}

DensityMatrix boxplus(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts) {
  return convolve(rho, sigma, opts).plus;
}

DensityMatrix boxminus(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts) {
  return convolve(rho, sigma, opts).minus;
}

DensityMatrix boxplus(const PureState& psi, const PureState& phi, const ConvOptions& opts) {
  return convolve(ensemble_of(psi), ensemble_of(phi), combined_leakage(psi.leakage(), phi.leakage()), opts).plus;
}

DensityMatrix boxminus(const PureState& psi, const PureState& phi, const ConvOptions& opts) {
  return convolve(ensemble_of(psi), ensemble_of(phi), combined_leakage(psi.leakage(), phi.leakage()), opts).minus;
}

DensityMatrix boxplus_power(const DensityMatrix& rho, int k, const ConvOptions& opts) {
  if (k < 0) throw InvalidArgument("boxplus_power: k must be >= 0");
  DensityMatrix cur = rho;
  for (int i = 1; i <= k; ++i) cur = boxplus(cur, rho, opts);
  return cur;
}

DensityMatrix boxplus_power(const PureState& psi, int k, const ConvOptions& opts) {
  if (k < 0) throw InvalidArgument("boxplus_power: k must be >= 0");
  if (k == 0) return psi.density();
  DensityMatrix cur = boxplus(psi, psi, opts);
  const DensityMatrix rho = psi.density();
  for (int i = 2; i <= k; ++i) cur = boxplus(cur, rho, opts);
  return cur;
}

DensityMatrix joint_convolved_state(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts) {
  const FockSpec joint = joint_output_spec(rho.spec(), sigma.spec());
  const auto jd = static_cast<Eigen::Index>(joint.dim());
  guard(joint.dim() * joint.dim(), opts.max_elements, "joint convolved state");
  const Ensemble a = ensemble_of(rho, opts.weight_cut);
  const Ensemble b = ensemble_of(sigma, opts.weight_cut);
  MatrixXc out = MatrixXc::Zero(jd, jd);
  Real visited = 0;
  visit_joint_outputs(a, b, opts, [&](Real w, const VectorXc& v) {
    out.noalias() += w * (v * v.adjoint());
    visited += w;
  });
  out = 0.5 * (out + out.adjoint()).eval();
  const Real leak = combined_leakage(rho.leakage() + ensemble_drop(rho, a), sigma.leakage() + ensemble_drop(sigma, b)) +
                    std::max(0.0, a.weights.sum() * b.weights.sum() - visited);
  return DensityMatrix(joint, std::move(out), leak);
}

DensityMatrix joint_convolved_state(const DensityMatrix& rho, const ConvOptions& opts) {
  return joint_convolved_state(rho, rho, opts);
}

DensityMatrix embed_for_exact_bs(const DensityMatrix& rho_a, const DensityMatrix& rho_b, const ConvOptions& opts) {
  if (rho_a.spec().modes() != 1 || rho_b.spec().modes() != 1)
    throw InvalidArgument("embed_for_exact_bs takes single-mode inputs");
  const int d = rho_a.spec().cutoff(0) + rho_b.spec().cutoff(0) - 1;
  const auto dim = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
  guard(dim * dim, opts.max_elements, "embed_for_exact_bs");
  return tensor(embed(rho_a, {d}), embed(rho_b, {d}));
}

VectorXd parity_operator(const FockSpec& spec) {
  VectorXd p(static_cast<Eigen::Index>(spec.dim()));
  for (std::size_t k = 0; k < spec.dim(); ++k) {
    const auto occ = spec.occupations(k);
    int total = 0;
    for (int o : occ) total += o;
    p(static_cast<Eigen::Index>(k)) = (total % 2 == 0) ? 1.0 : -1.0;
  }
  return p;
}

Real parity_expectation(const DensityMatrix& rho) {
  return rho.matrix().diagonal().real().dot(parity_operator(rho.spec()));
}

Real overlap_via_parity(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts) {
  if (!(rho.spec() == sigma.spec())) throw InvalidArgument("overlap_via_parity: spec mismatch");
  return parity_expectation(boxminus(rho, sigma, opts));
}

}  // namespace ngconv
