#include "ngconv/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "ngconv/linalg.hpp"

namespace ngconv {

namespace {

std::string describe_cutoff_error(const char* what, int cutoff, int needed) {
  std::ostringstream os;
  os << what << ": cutoff " << cutoff << " is too small; minimal adequate cutoff is " << needed;
  return os.str();
}

// Coherent amplitudes e^{-|z|^2/2} z^n / sqrt(n!) for n < count.
VectorXc coherent_amplitudes(Complex z, int count) {
  VectorXc c(count);
  if (count == 0) return c;
  c(0) = std::exp(-0.5 * std::norm(z));
  for (int n = 1; n < count; ++n) c(n) = c(n - 1) * z / std::sqrt(static_cast<Real>(n));
  return c;
}

// Tail sum of a nonnegative series p(n) for n >= start, sum stops once terms
// are negligible past the mode of the distribution.
template <typename Term>
Real tail_mass(Term term, int start, Real peak_hint) {
  Real sum = 0;
  // Parity-restricted series vanish on every other n, so a single zero term
  // says nothing; two in a row past the peak end the series.
  const int floor_n = static_cast<int>(std::ceil(peak_hint)) + 2;
  int zeros = 0;
  for (int n = start;; ++n) {
    const Real t = term(n);
    sum += t;
    zeros = t == 0 ? zeros + 1 : 0;
    if (n > floor_n && zeros >= 2) break;
    if (n > floor_n && t > 0 && t < 1e-30 * sum) break;
    if (n > start + 100000) break;
  }
  return sum;
}

// log of |c_n|^2 for a coherent state with mean photon number m.
Real log_poisson(int n, Real m) {
  if (m == 0) return n == 0 ? 0.0 : -std::numeric_limits<Real>::infinity();
  return -m + n * std::log(m) - std::lgamma(n + 1.0);
}

Real coherent_tail(Complex z, int cutoff) {
  const Real m = std::norm(z);
  return tail_mass([m](int n) { return std::exp(log_poisson(n, m)); }, cutoff, m);
}

// |cat_n|^2 for n of matching parity.
Real cat_tail(Complex z, int sign, int cutoff) {
  const Real m = std::norm(z);
  const Real norm2 = 2.0 * (1.0 + sign * std::exp(-2.0 * m));
  return tail_mass(
      [m, sign, norm2](int n) {
        const bool even = (n % 2) == 0;
        if ((sign > 0) != even) return 0.0;
        return 4.0 * std::exp(log_poisson(n, m)) / norm2;
      },
      cutoff, m);
}

Real squeezed_weight(int n, Real r) {
  if (n % 2 != 0) return 0.0;
  const int k = n / 2;
  const Real t = std::tanh(r);
  if (t == 0) return k == 0 ? 1.0 : 0.0;
  // |c_2k|^2 = tanh^{2k} (2k)! / (4^k (k!)^2 cosh r)
  const Real logw = 2.0 * k * std::log(t) + std::lgamma(2.0 * k + 1) - 2.0 * std::lgamma(k + 1.0) -
                    2.0 * k * std::log(2.0) - std::log(std::cosh(r));
  return std::exp(logw);
}

Real squeezed_tail(Real r, int cutoff) {
  const Real peak = std::sinh(r) * std::sinh(r);
  return tail_mass([r](int n) { return squeezed_weight(n, r); }, cutoff, peak);
}

template <typename Tail>
int minimal_cutoff(Tail tail, Real tau) {
  int d = 1;
  while (tail(d) >= tau) {
    ++d;
    if (d > 100000) throw InvalidArgument("no adequate cutoff below 100000");
  }
  return d;
}

void require_cutoff(int cutoff) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
}

}  // namespace

// ---------------------------------------------------------------------------

FockSpec::FockSpec(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
  if (cutoffs_.empty()) throw InvalidArgument("FockSpec needs at least one mode");
  strides_.assign(cutoffs_.size(), 1);
  dim_ = 1;
  for (std::size_t i = cutoffs_.size(); i-- > 0;) {
    if (cutoffs_[i] < 1) throw InvalidArgument("every cutoff must be >= 1");
    strides_[i] = dim_;
    dim_ *= static_cast<std::size_t>(cutoffs_[i]);
  }
}

FockSpec FockSpec::uniform(int modes, int cutoff) {
  return FockSpec(std::vector<int>(static_cast<std::size_t>(modes), cutoff));
}

std::size_t FockSpec::index(std::span<const int> occupations) const {
  if (occupations.size() != cutoffs_.size())
    throw InvalidArgument("occupation list length does not match mode count");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    if (occupations[i] < 0 || occupations[i] >= cutoffs_[i]) {
      std::ostringstream os;
      os << "occupation " << occupations[i] << " of mode " << i << " is outside cutoff "
         << cutoffs_[i];
      throw TruncationError(os.str());
    }
    idx += static_cast<std::size_t>(occupations[i]) * strides_[i];
  }
  return idx;
}

std::vector<int> FockSpec::occupations(std::size_t index) const {
  std::vector<int> occ(cutoffs_.size());
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    occ[i] = static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return occ;
}

FockSpec FockSpec::concat(const FockSpec& other) const {
  std::vector<int> c = cutoffs_;
  c.insert(c.end(), other.cutoffs_.begin(), other.cutoffs_.end());
  return FockSpec(std::move(c));
}

FockSpec FockSpec::select(std::span<const int> modes) const {
  std::vector<int> c;
  for (int m : modes) c.push_back(cutoff(m));
  return FockSpec(std::move(c));
}

// ---------------------------------------------------------------------------

PureState::PureState(FockSpec spec, VectorXc amplitudes, Real leakage, const Tolerances& tol)
    : spec_(std::move(spec)), amp_(std::move(amplitudes)), leakage_(leakage) {
  if (static_cast<std::size_t>(amp_.size()) != spec_.dim())
    throw InvalidArgument("amplitude vector length does not match FockSpec dimension");
  const Real n = amp_.norm();
  if (std::abs(n - 1.0) > tol.norm) {
    std::ostringstream os;
    os << "pure state norm " << n << " deviates from 1 by more than " << tol.norm;
    throw NumericalError(os.str());
  }
}

DensityMatrix PureState::density() const {
  return DensityMatrix(spec_, amp_ * amp_.adjoint(), leakage_);
}

DensityMatrix::DensityMatrix(FockSpec spec, MatrixXc matrix, Real leakage, const Tolerances& tol)
    : spec_(std::move(spec)), rho_(std::move(matrix)), leakage_(leakage) {
  const auto d = static_cast<Eigen::Index>(spec_.dim());
  if (rho_.rows() != d || rho_.cols() != d)
    throw InvalidArgument("density matrix shape does not match FockSpec dimension");
  const Real fro = rho_.norm();
  if (fro > 0 && (rho_ - rho_.adjoint()).norm() > tol.hermitian * fro)
    throw NumericalError("density matrix is not Hermitian within tolerance");
  const Real tr = rho_.trace().real();
  if (tr > 1.0 + tol.trace || tr < 1.0 - leakage_ - tol.trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " inconsistent with tracked leakage " << leakage_;
    throw NumericalError(os.str());
  }
}

// ---------------------------------------------------------------------------

PureState fock_state(std::span<const int> occupations, const FockSpec& spec) {
  VectorXc amp = VectorXc::Zero(static_cast<Eigen::Index>(spec.dim()));
  amp(static_cast<Eigen::Index>(spec.index(occupations))) = 1.0;
  return PureState(spec, std::move(amp));
}

PureState fock_state(int n, int cutoff) {
  require_cutoff(cutoff);
  const int occ[1] = {n};
  return fock_state(occ, FockSpec({cutoff}));
}

int minimal_coherent_cutoff(Complex z, Real tau) {
  return minimal_cutoff([z](int d) { return coherent_tail(z, d); }, tau);
}

PureState coherent_state(Complex z, int cutoff, const Tolerances& tol) {
  require_cutoff(cutoff);
  const Real tail = coherent_tail(z, cutoff);
  if (tail >= tol.truncation)
    throw TruncationError(describe_cutoff_error("coherent state", cutoff,
                                                minimal_coherent_cutoff(z, tol.truncation)));
  VectorXc c = coherent_amplitudes(z, cutoff);
  c /= c.norm();
  return PureState(FockSpec({cutoff}), std::move(c), tail, tol);
}

Real cat_norm(Complex z, int sign) {
  return std::sqrt(2.0 * (1.0 + sign * std::exp(-2.0 * std::norm(z))));
}

int minimal_cat_cutoff(Complex z, int sign, Real tau) {
  return minimal_cutoff([z, sign](int d) { return cat_tail(z, sign, d); }, tau);
}

PureState cat_state(Complex z, int sign, int cutoff, const Tolerances& tol) {
  require_cutoff(cutoff);
  if (sign != 1 && sign != -1) throw InvalidArgument("cat sign must be +1 or -1");
  if (sign < 0 && 1.0 - std::exp(-2.0 * std::norm(z)) < 1e-14)
    throw InvalidArgument("odd cat state with z = 0 is the null vector");
  const Real tail = cat_tail(z, sign, cutoff);
  if (tail >= tol.truncation)
    throw TruncationError(
        describe_cutoff_error("cat state", cutoff, minimal_cat_cutoff(z, sign, tol.truncation)));
  VectorXc c = coherent_amplitudes(z, cutoff);
  for (int n = 0; n < cutoff; ++n) {
    const bool even = (n % 2) == 0;
    c(n) = ((sign > 0) == even) ? c(n) * 2.0 : Complex(0);
  }
  c /= c.norm();
  return PureState(FockSpec({cutoff}), std::move(c), tail, tol);
}

int minimal_squeezed_cutoff(Real r, Real tau) {
  return minimal_cutoff([r](int d) { return squeezed_tail(r, d); }, tau);
}

PureState squeezed_vacuum(Real r, int cutoff, const Tolerances& tol) {
  require_cutoff(cutoff);
  const Real tail = squeezed_tail(r, cutoff);
  if (tail >= tol.truncation)
    throw TruncationError(describe_cutoff_error("squeezed vacuum", cutoff,
                                                minimal_squeezed_cutoff(r, tol.truncation)));
  VectorXc c = VectorXc::Zero(cutoff);
  const Real t = -std::tanh(r);
  c(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 2; n < cutoff; n += 2)
    c(n) = c(n - 2) * t * std::sqrt(static_cast<Real>(n) * (n - 1)) / static_cast<Real>(n);
  c /= c.norm();
  return PureState(FockSpec({cutoff}), std::move(c), tail, tol);
}

int minimal_thermal_cutoff(Real nbar, Real tau) {
  if (nbar <= 0) return 1;
  const Real q = nbar / (1.0 + nbar);
  return std::max(1, static_cast<int>(std::ceil(std::log(tau) / std::log(q))));
}

DensityMatrix thermal_state(Real nbar, int cutoff) {
  require_cutoff(cutoff);
  if (nbar < 0) throw InvalidArgument("thermal mean photon number must be >= 0");
  MatrixXc rho = MatrixXc::Zero(cutoff, cutoff);
  const Real q = nbar / (1.0 + nbar);
  Real p = 1.0 / (1.0 + nbar);
  for (int n = 0; n < cutoff; ++n) {
    rho(n, n) = p;
    p *= q;
  }
  const Real tail = nbar == 0 ? 0.0 : std::pow(q, cutoff);
  return DensityMatrix(FockSpec({cutoff}), std::move(rho), tail);
}

// ---------------------------------------------------------------------------

MatrixXc annihilation_matrix(int cutoff) {
  require_cutoff(cutoff);
  MatrixXc a = MatrixXc::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<Real>(n));
  return a;
}

MatrixXc number_matrix(int cutoff) {
  require_cutoff(cutoff);
  MatrixXc n = MatrixXc::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = static_cast<Real>(k);
  return n;
}

MatrixXc displacement_operator(Complex alpha, int cutoff) {
  require_cutoff(cutoff);
  if (coherent_tail(alpha, cutoff) >= default_tolerances().truncation)
    throw TruncationError(
        describe_cutoff_error("displacement operator", cutoff, minimal_coherent_cutoff(alpha)));
  const MatrixXc a = annihilation_matrix(cutoff);
  // H = -i (alpha a^dagger - alpha^* a) is Hermitian; D = exp(iH).
  const MatrixXc gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const MatrixXc h = Complex(0, -1) * gen;
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  const VectorXc phases =
      es.eigenvalues().unaryExpr([](Real l) { return std::exp(Complex(0, l)); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXc displacement_block(Complex alpha, int rows, int cols) {
  if (rows < 1 || cols < 1) throw InvalidArgument("displacement block needs rows, cols >= 1");
  MatrixXc d(rows, cols);
  d.col(0) = coherent_amplitudes(alpha, rows);
  const Complex ac = std::conj(alpha);
  for (int n = 0; n + 1 < cols; ++n) {
    const Real s = 1.0 / std::sqrt(static_cast<Real>(n + 1));
    d(0, n + 1) = -ac * d(0, n) * s;
    for (int m = 1; m < rows; ++m)
      d(m, n + 1) = (std::sqrt(static_cast<Real>(m)) * d(m - 1, n) - ac * d(m, n)) * s;
  }
  return d;
}

FockSpec with_cutoff(const FockSpec& spec, int mode, int cutoff) {
  require_cutoff(cutoff);
  std::vector<int> c = spec.cutoffs();
  c.at(static_cast<std::size_t>(mode)) = cutoff;
  return FockSpec(std::move(c));
}

MatrixXc apply_mode_operator(const MatrixXc& op, const MatrixXc& columns, const FockSpec& spec, int mode) {
  const int c = spec.cutoff(mode);
  if (op.cols() != c) throw InvalidArgument("mode operator width does not match the mode cutoff");
  if (static_cast<std::size_t>(columns.rows()) != spec.dim()) throw InvalidArgument("columns do not live in spec");
  const auto s = static_cast<Eigen::Index>(spec.stride(mode));
  const Eigen::Index rows_out = op.rows();
  const Eigen::Index outer = static_cast<Eigen::Index>(spec.dim()) / (c * s);
  MatrixXc out(outer * rows_out * s, columns.cols());
  const MatrixXc opt = op.transpose();
  for (Eigen::Index j = 0; j < columns.cols(); ++j)
    for (Eigen::Index o = 0; o < outer; ++o) {
      // Column-major (s x c) view: element (i, n) is occupation n of `mode`.
      const Eigen::Map<const MatrixXc> in(columns.col(j).data() + o * c * s, s, c);
      Eigen::Map<MatrixXc> dst(out.col(j).data() + o * rows_out * s, s, rows_out);
      dst.noalias() = in * opt;
    }
  return out;
}

MatrixXc conjugate_mode_operator(const MatrixXc& op, const MatrixXc& rho, const FockSpec& spec, int mode) {
  const MatrixXc left = apply_mode_operator(op, rho, spec, mode);
  return apply_mode_operator(op, left.adjoint(), spec, mode);
}

// ---------------------------------------------------------------------------

namespace {

PureState renormalized(FockSpec spec, VectorXc v, Real prior_leakage, const Tolerances& tol,
                       const char* what) {
  const Real kept = v.squaredNorm();
  const Real lost = 1.0 - kept;
  if (lost >= tol.truncation) {
    std::ostringstream os;
    os << what << ": output cutoff loses mass " << lost << " (limit " << tol.truncation << ")";
    throw TruncationError(os.str());
  }
  v /= std::sqrt(kept);
  return PureState(std::move(spec), std::move(v), prior_leakage + std::max(lost, 0.0), tol);
}

}  // namespace

PureState displace(const PureState& psi, Complex alpha, int mode, int out_cutoff,
                   const Tolerances& tol) {
  const MatrixXc d = displacement_block(alpha, out_cutoff, psi.spec().cutoff(mode));
  VectorXc v = apply_mode_operator(d, psi.amplitudes(), psi.spec(), mode);
  return renormalized(with_cutoff(psi.spec(), mode, out_cutoff), std::move(v), psi.leakage(), tol, "displace");
}

PureState rotate(const PureState& psi, Real phi, int mode) {
  const FockSpec& s = psi.spec();
  VectorXc v = psi.amplitudes();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const int n = static_cast<int>((i / s.stride(mode)) % static_cast<std::size_t>(s.cutoff(mode)));
    v(static_cast<Eigen::Index>(i)) *= std::exp(Complex(0, phi * n));
  }
  return PureState(s, std::move(v), psi.leakage());
}

PureState squeeze(const PureState& psi, Real r, int out_cutoff, const Tolerances& tol) {
  if (psi.spec().modes() != 1) throw InvalidArgument("squeeze acts on single-mode states");
  // Work in a padded space so reflections at the truncation edge stay far
  // from the retained block.
  const int din = psi.spec().cutoff(0);
  const int pad = std::max(out_cutoff, din) + 60 + static_cast<int>(40 * std::abs(r));
  const MatrixXc a = annihilation_matrix(pad);
  const MatrixXc gen = 0.5 * r * (a * a - a.adjoint() * a.adjoint());
  const MatrixXc s = gen.exp();
  const MatrixXc block = s.topLeftCorner(out_cutoff, din);
  VectorXc v = block * psi.amplitudes();
  return renormalized(FockSpec({out_cutoff}), std::move(v), psi.leakage(), tol, "squeeze");
}

// ---------------------------------------------------------------------------

PureState tensor(const PureState& a, const PureState& b) {
  return PureState(a.spec().concat(b.spec()), kron(a.amplitudes(), b.amplitudes()),
                   a.leakage() + b.leakage() - a.leakage() * b.leakage());
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(a.spec().concat(b.spec()), kron(a.matrix(), b.matrix()),
                       a.leakage() + b.leakage() - a.leakage() * b.leakage());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const FockSpec& s = rho.spec();
  if (keep.empty()) throw InvalidArgument("partial_trace needs a nonempty keep set");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw InvalidArgument("partial_trace keep set has duplicates");
  for (int m : kept)
    if (m < 0 || m >= s.modes()) throw InvalidArgument("partial_trace mode index out of range");
  std::vector<int> traced;
  for (int m = 0; m < s.modes(); ++m)
    if (!std::binary_search(kept.begin(), kept.end(), m)) traced.push_back(m);
  const FockSpec ks = s.select(kept);
  if (traced.empty()) return DensityMatrix(ks, rho.matrix(), rho.leakage());
  const FockSpec ts = s.select(traced);

  // Joint offset contributed by each kept / traced sub-index.
  auto offsets = [&s](const FockSpec& sub, const std::vector<int>& modes) {
    std::vector<std::size_t> off(sub.dim());
    for (std::size_t i = 0; i < sub.dim(); ++i) {
      const auto occ = sub.occupations(i);
      std::size_t o = 0;
      for (std::size_t k = 0; k < modes.size(); ++k)
        o += static_cast<std::size_t>(occ[k]) * s.stride(modes[k]);
      off[i] = o;
    }
    return off;
  };
  const auto koff = offsets(ks, kept);
  const auto toff = offsets(ts, traced);
  const auto kd = static_cast<Eigen::Index>(ks.dim());
  MatrixXc out = MatrixXc::Zero(kd, kd);
  const MatrixXc& m = rho.matrix();
  for (Eigen::Index j = 0; j < kd; ++j)
    for (Eigen::Index i = 0; i < kd; ++i) {
      Complex acc = 0;
      for (std::size_t t : toff)
        acc += m(static_cast<Eigen::Index>(koff[static_cast<std::size_t>(i)] + t),
                 static_cast<Eigen::Index>(koff[static_cast<std::size_t>(j)] + t));
      out(i, j) = acc;
    }
  return DensityMatrix(ks, std::move(out), rho.leakage());
}

namespace {

// Maps each index of `from` into `to` when all occupations fit, else -1.
std::vector<Eigen::Index> index_map(const FockSpec& from, const FockSpec& to) {
  std::vector<Eigen::Index> map(from.dim(), -1);
  for (std::size_t i = 0; i < from.dim(); ++i) {
    const auto occ = from.occupations(i);
    bool fits = true;
    std::size_t j = 0;
    for (int m = 0; m < from.modes(); ++m) {
      if (occ[static_cast<std::size_t>(m)] >= to.cutoff(m)) {
        fits = false;
        break;
      }
      j += static_cast<std::size_t>(occ[static_cast<std::size_t>(m)]) * to.stride(m);
    }
    if (fits) map[i] = static_cast<Eigen::Index>(j);
  }
  return map;
}

}  // namespace

PureState embed(const PureState& psi, const std::vector<int>& cutoffs) {
  const FockSpec to(cutoffs);
  if (to.modes() != psi.spec().modes()) throw InvalidArgument("embed: mode count mismatch");
  for (int m = 0; m < to.modes(); ++m)
    if (to.cutoff(m) < psi.spec().cutoff(m)) throw InvalidArgument("embed cannot shrink cutoffs");
  const auto map = index_map(psi.spec(), to);
  VectorXc v = VectorXc::Zero(static_cast<Eigen::Index>(to.dim()));
  for (std::size_t i = 0; i < map.size(); ++i) v(map[i]) = psi.amplitudes()(static_cast<Eigen::Index>(i));
  return PureState(to, std::move(v), psi.leakage());
}

DensityMatrix embed(const DensityMatrix& rho, const std::vector<int>& cutoffs) {
  const FockSpec to(cutoffs);
  if (to.modes() != rho.spec().modes()) throw InvalidArgument("embed: mode count mismatch");
  for (int m = 0; m < to.modes(); ++m)
    if (to.cutoff(m) < rho.spec().cutoff(m)) throw InvalidArgument("embed cannot shrink cutoffs");
  const auto map = index_map(rho.spec(), to);
  const auto d = static_cast<Eigen::Index>(to.dim());
  MatrixXc out = MatrixXc::Zero(d, d);
  for (std::size_t j = 0; j < map.size(); ++j)
    for (std::size_t i = 0; i < map.size(); ++i)
      out(map[i], map[j]) = rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return DensityMatrix(to, std::move(out), rho.leakage());
}

DensityMatrix truncate(const DensityMatrix& rho, const std::vector<int>& cutoffs) {
  const FockSpec to(cutoffs);
  if (to.modes() != rho.spec().modes()) throw InvalidArgument("truncate: mode count mismatch");
  for (int m = 0; m < to.modes(); ++m)
    if (to.cutoff(m) > rho.spec().cutoff(m)) throw InvalidArgument("truncate cannot grow cutoffs");
  const auto map = index_map(rho.spec(), to);
  const auto d = static_cast<Eigen::Index>(to.dim());
  MatrixXc out = MatrixXc::Zero(d, d);
  Real dropped = 0;
  for (std::size_t j = 0; j < map.size(); ++j) {
    if (map[j] < 0) {
      dropped += rho.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
      continue;
    }
    for (std::size_t i = 0; i < map.size(); ++i)
      if (map[i] >= 0)
        out(map[i], map[j]) = rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return DensityMatrix(to, std::move(out), rho.leakage() + std::max(dropped, 0.0));
}

VectorXd marginal_populations(const DensityMatrix& rho, int mode) {
  const FockSpec& s = rho.spec();
  VectorXd p = VectorXd::Zero(s.cutoff(mode));
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const auto n = static_cast<Eigen::Index>((i / s.stride(mode)) % static_cast<std::size_t>(s.cutoff(mode)));
    p(n) += rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  }
  return p;
}

DensityMatrix auto_truncate(const DensityMatrix& rho, Real tail) {
  std::vector<int> cut = rho.spec().cutoffs();
  for (int m = 0; m < rho.spec().modes(); ++m) {
    const VectorXd p = marginal_populations(rho, m);
    Real acc = 0;
    int d = static_cast<int>(p.size());
    while (d > 1 && acc + std::max(p(d - 1), 0.0) <= tail) {
      acc += std::max(p(d - 1), 0.0);
      --d;
    }
    cut[static_cast<std::size_t>(m)] = d;
  }
  if (cut == rho.spec().cutoffs()) return rho;
  return truncate(rho, cut);
}

Real mean_photon_number(const DensityMatrix& rho) {
  Real n = 0;
  for (int m = 0; m < rho.spec().modes(); ++m) {
    const VectorXd p = marginal_populations(rho, m);
    for (Eigen::Index k = 0; k < p.size(); ++k) n += static_cast<Real>(k) * p(k);
  }
  return n;
}

}  // namespace ngconv
