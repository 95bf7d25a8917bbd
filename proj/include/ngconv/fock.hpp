#pragma once

#include <span>
#include <vector>

#include "ngconv/core.hpp"

namespace ngconv {

/// Per-mode cutoffs of a truncated multi-mode Fock basis. Mode 0 is the
/// slowest index: joint = ((n_0 * d_1 + n_1) * d_2 + n_2) ...
class FockSpec {
 public:
  FockSpec() = default;
  explicit FockSpec(std::vector<int> cutoffs);

  static FockSpec uniform(int modes, int cutoff);

  int modes() const { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::size_t dim() const { return dim_; }
  std::size_t stride(int mode) const { return strides_.at(static_cast<std::size_t>(mode)); }

  std::size_t index(std::span<const int> occupations) const;
  std::vector<int> occupations(std::size_t index) const;

  /// Specs concatenate under tensor products.
  FockSpec concat(const FockSpec& other) const;
  /// Subset of modes, in the given order.
  FockSpec select(std::span<const int> modes) const;

  bool operator==(const FockSpec& other) const { return cutoffs_ == other.cutoffs_; }

 private:
  std::vector<int> cutoffs_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
};

class DensityMatrix;

/// Normalized amplitude vector. `leakage` is the tail mass of the ideal
/// (untruncated) state that was cut off and renormalized away at construction.
class PureState {
 public:
  PureState(FockSpec spec, VectorXc amplitudes, Real leakage = 0,
            const Tolerances& tol = default_tolerances());

  const FockSpec& spec() const { return spec_; }
  const VectorXc& amplitudes() const { return amp_; }
  Real leakage() const { return leakage_; }

  DensityMatrix density() const;

 private:
  FockSpec spec_;
  VectorXc amp_;
  Real leakage_ = 0;
};

/// Hermitian, unit-trace-up-to-leakage operator. Tr(rho) must lie in
/// [1 - leakage - tol.trace, 1 + tol.trace]: sub-normalized states are allowed
/// only when their deficit is recorded in `leakage`. Positivity is checked by
/// hermitian_spectrum(), not at construction.
class DensityMatrix {
 public:
  DensityMatrix(FockSpec spec, MatrixXc matrix, Real leakage = 0,
                const Tolerances& tol = default_tolerances());

  const FockSpec& spec() const { return spec_; }
  const MatrixXc& matrix() const { return rho_; }
  Real leakage() const { return leakage_; }
  Real trace() const { return rho_.trace().real(); }

 private:
  FockSpec spec_;
  MatrixXc rho_;
  Real leakage_ = 0;
};

// ---------------------------------------------------------------------------
// State factories. Pure-state factories renormalize only when the discarded
// tail is below tol.truncation and throw TruncationError otherwise.

PureState fock_state(std::span<const int> occupations, const FockSpec& spec);
PureState fock_state(int n, int cutoff);

/// Smallest cutoff whose coherent-state tail mass beyond it is below `tau`.
int minimal_coherent_cutoff(Complex z, Real tau = default_tolerances().truncation);

PureState coherent_state(Complex z, int cutoff, const Tolerances& tol = default_tolerances());

/// (|z> + sign |-z>) normalized; sign must be +1 or -1.
PureState cat_state(Complex z, int sign, int cutoff, const Tolerances& tol = default_tolerances());
int minimal_cat_cutoff(Complex z, int sign, Real tau = default_tolerances().truncation);
/// sqrt(2 (1 + sign e^{-2|z|^2})): norm of the un-normalized |z> + sign|-z>.
Real cat_norm(Complex z, int sign);

/// exp[(r/2)(a^2 - a^dagger^2)] |0>.
PureState squeezed_vacuum(Real r, int cutoff, const Tolerances& tol = default_tolerances());
int minimal_squeezed_cutoff(Real r, Real tau = default_tolerances().truncation);

/// Diagonal thermal state p_n = nbar^n / (1 + nbar)^{n+1}. Not renormalized:
/// the tail (nbar / (1 + nbar))^cutoff is carried as leakage.
DensityMatrix thermal_state(Real nbar, int cutoff);
int minimal_thermal_cutoff(Real nbar, Real tau = default_tolerances().truncation);

// ---------------------------------------------------------------------------
// Single-mode operators.

/// a|n> = sqrt(n)|n-1>.
MatrixXc annihilation_matrix(int cutoff);
MatrixXc number_matrix(int cutoff);

/// exp(alpha a^dagger - alpha^* a) of the truncated generator. Unitary on the
/// truncated space; accurate on columns far below the cutoff.
MatrixXc displacement_operator(Complex alpha, int cutoff);

/// Exact matrix elements <m|D(alpha)|n> for m < rows, n < cols, built by the
/// column recurrence D|n+1> = (a^dagger - alpha^*) D|n> / sqrt(n+1) from the
/// coherent column. No truncation error.
MatrixXc displacement_block(Complex alpha, int rows, int cols);

/// Applies a (rows x cutoff(mode)) single-mode matrix to `mode` of every
/// column. The result lives in `spec` with that mode's cutoff set to op.rows().
MatrixXc apply_mode_operator(const MatrixXc& op, const MatrixXc& columns, const FockSpec& spec, int mode);

/// K rho K^dagger with K acting on `mode` of a Hermitian rho.
MatrixXc conjugate_mode_operator(const MatrixXc& op, const MatrixXc& rho, const FockSpec& spec, int mode);

/// `spec` with the cutoff of `mode` replaced.
FockSpec with_cutoff(const FockSpec& spec, int mode, int cutoff);

// ---------------------------------------------------------------------------
// Gaussian unitaries on states.

/// D(alpha) on `mode`, output cutoff `out_cutoff` for that mode. The mass
/// pushed above the cutoff must be below tol.truncation.
PureState displace(const PureState& psi, Complex alpha, int mode, int out_cutoff,
                   const Tolerances& tol = default_tolerances());
/// exp(i phi n) on `mode`.
PureState rotate(const PureState& psi, Real phi, int mode);
/// Single-mode squeezer exp[(r/2)(a^2 - a^dagger^2)] on a one-mode state.
PureState squeeze(const PureState& psi, Real r, int out_cutoff,
                  const Tolerances& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Structural operations.

PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state on `keep` (in ascending mode order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// Zero-pad to larger per-mode cutoffs. Exact; leakage unchanged.
PureState embed(const PureState& psi, const std::vector<int>& cutoffs);
DensityMatrix embed(const DensityMatrix& rho, const std::vector<int>& cutoffs);

/// Cut to smaller per-mode cutoffs; discarded diagonal mass joins leakage.
DensityMatrix truncate(const DensityMatrix& rho, const std::vector<int>& cutoffs);

/// Smallest per-mode cutoffs whose discarded marginal tails are each below
/// `tail`, then truncate.
DensityMatrix auto_truncate(const DensityMatrix& rho, Real tail);

/// Diagonal of the single-mode marginal of `mode`.
VectorXd marginal_populations(const DensityMatrix& rho, int mode);

/// Expectation of the total photon number.
Real mean_photon_number(const DensityMatrix& rho);

}  // namespace ngconv
