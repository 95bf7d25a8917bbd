#pragma once

#include <vector>

#include "ngconv/conv.hpp"
#include "ngconv/core.hpp"
#include "ngconv/fock.hpp"

namespace ngconv {

struct MeasureReport {
  Real value = 0;
  std::vector<int> cutoffs;  ///< per-mode cutoffs of the convolution outputs
  Real leakage = 0;          ///< tracked truncation mass of the inputs and outputs
  Real clipped_mass = 0;     ///< eigenvalue mass clipped to zero in entropies
  int quadrature_order = 0;  ///< 0 when no quadrature was involved
  Real projected_mass = 0;   ///< MING: joint mass outside supp(rho_A (x) rho_B)
};

struct FrobeniusReport : MeasureReport {
  Real joint_purity = 0;     ///< Tr rho_AB^2
  Real marginal_purity = 0;  ///< Tr rho_A^2 Tr rho_B^2
  Real cross = 0;            ///< Tr[rho_AB (rho_A (x) rho_B)]
};

struct MeasureOptions {
  ConvOptions conv;
  Tolerances tol;
  /// Support threshold of rho_A (x) rho_B for MING with alpha != 1.
  Real support_threshold = 1e-12;
  /// Joint mass outside that support above which MING_{alpha > 1} is +inf.
  Real support_mass_limit = 1e-8;
  /// |mean| gate for zero-mean protocols.
  Real mean_tolerance = 1e-6;
};

/// S_alpha of the k-fold self-convolution, in bits. k >= 1.
MeasureReport nge(const PureState& psi, Real alpha, int k, const MeasureOptions& opts = {});
/// Same for a density matrix that must be pure to 1e-8.
MeasureReport nge(const DensityMatrix& rho, Real alpha, int k, const MeasureOptions& opts = {});

/// Tr[(psi [+] psi)^2].
Real average_parity(const PureState& psi, const MeasureOptions& opts = {});

/// <psi| psi [+] psi |psi> for zero-mean psi; InvalidArgument otherwise.
Real zero_mean_parity(const PureState& psi, const MeasureOptions& opts = {});

/// Sandwiched Renyi-alpha divergence D_alpha(rho_AB || rho_A (x) rho_B) with
/// rho_AB = U (rho (x) rho) U^dagger. alpha = 1 uses
/// S(rho [+] rho) + S(rho [-] rho) - 2 S(rho).
MeasureReport ming(const DensityMatrix& rho, Real alpha, const MeasureOptions& opts = {});

/// ||rho_AB - rho_A (x) rho_B||_F with rho_B = rho [-] rho.
FrobeniusReport d_frobenius(const DensityMatrix& rho, const MeasureOptions& opts = {});

struct Verdict {
  bool gaussian = false;
  MeasureReport report;
};

/// Pure input: Gaussian iff <P> >= 1 - threshold.
Verdict gaussianity_verdict(const PureState& psi, Real threshold, const MeasureOptions& opts = {});
/// Mixed input: Gaussian iff d_F <= threshold.
Verdict gaussianity_verdict(const DensityMatrix& rho, Real threshold, const MeasureOptions& opts = {});

}  // namespace ngconv
