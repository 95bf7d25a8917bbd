#pragma once

#include <vector>

#include "ngconv/core.hpp"

// Closed-form ground truth. Nothing here calls into conv, channels or
// measures.

namespace ngconv::oracles {

/// exp(i 2 theta S_y) for spin S = two_s / 2 in the S_z basis; row and column
/// i correspond to m_z = i - S.
struct WignerBlock {
  int two_s = 0;
  Real theta = 0;
  MatrixXd matrix;

  /// Element <S_z = m_z| exp(i 2 theta S_y) |S_z = m_z'> with m_z = two_mz / 2.
  Real at(int two_mz, int two_mzp) const;
};

WignerBlock wigner_small_d(int two_s, Real theta);

/// Factorial closed form of the 50:50 column <m_z| e^{i pi S_y / 2} |0>,
/// integer S only.
Real wigner_half_column(int s, int mz);

/// Diagonal of |n><n| [+] |n><n| over m = 0..2n.
std::vector<Real> fock_selfconv_diagonal(int n);

/// Renyi-alpha entropy of the diagonal above, in bits (alpha = 1 and
/// alpha = infinity handled as limits).
Real nge_fock_closed_form(int n, Real alpha);

/// -sum p log2 p of the same diagonal. Equals S(|n><n| [+] |n><n|);
/// the full MING of a Fock state is twice this.
Real ming_fock(int n);

/// Diagonal of N_L[gamma](|n><n|) over m = 0..n, weight |U^{(n/2)}_{m - n/2, n/2}(theta_L)|^2
/// with theta_L = arcsin(sqrt(gamma)).
std::vector<Real> lossy_fock_state(int n, Real gamma);
/// Same with the mirrored row index n/2 - m; this is the loss law with
/// gamma and 1 - gamma exchanged.
std::vector<Real> lossy_fock_state_mirrored(int n, Real gamma);

/// Diagonal of rho [+] rho for rho = N_L[gamma](|n><n|), over l = 0..2n.
std::vector<Real> lossy_fock_selfconv(int n, Real gamma);

/// 2 S(rho [+] rho) - 2 S(rho) for the lossy Fock state.
Real ming_lossy_fock(int n, Real gamma);

// ---------------------------------------------------------------------------
// Lossy even cat rho = N_L[gamma](psi), psi proportional to |z> + |-z>.

/// Trace of the un-normalized (|z> +- |-z>)(<z| +- <-z|) / 2: 1 +- e^{-2|z|^2}.
Real cat_trace(Complex z, int sign);

/// Eigenvalues (descending) of the 2x2 matrix T1: spectrum of rho.
VectorXd cat_T1_spectrum(Complex z, Real gamma);
/// Eigenvalues (descending) of the 3x3 matrix T2: spectrum of rho [+] rho.
VectorXd cat_T2_spectrum(Complex z, Real gamma);

/// 2 S(T2) - 2 S(T1): the entropy form consistent with
/// S(rho [+] rho) + S(rho [-] rho) - 2 S(rho) and rho [+] rho = rho [-] rho.
Real ming_lossy_cat(Complex z, Real gamma);
/// -2 Tr T2 log2 T2 - 2 Tr T1 log2 T1, i.e. 2 S(T2) + 2 S(T1); agrees with the
/// form above only without loss.
Real ming_lossy_cat_entropy_sum(Complex z, Real gamma);

/// Frobenius measure from T1, T2, the A matrix and the nine-component nu
/// vectors.
Real dF_lossy_cat(Complex z, Real gamma);

/// The 3x3 A matrix and the nu vector for signs (s1, s2).
MatrixXd cat_A_matrix(Complex z, Real gamma);
VectorXd cat_nu_vector(Complex z, Real gamma, int s1, int s2);

}  // namespace ngconv::oracles
