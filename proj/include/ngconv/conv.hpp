#pragma once

#include <functional>
#include <vector>

#include "ngconv/core.hpp"
#include "ngconv/fock.hpp"
#include "ngconv/linalg.hpp"

namespace ngconv {

/// Orthogonal blocks of U_theta = exp[theta (a_A^dagger a_B - a_A a_B^dagger)]
/// per total photon number n, in the basis k = n_A = 0..n. Conventions:
///   U^dagger a_A U = cos(theta) a_A + sin(theta) a_B
///   U^dagger a_B U = cos(theta) a_B - sin(theta) a_A
///   U |1,0> = cos |1,0> - sin |0,1>
std::vector<MatrixXd> beamsplitter_blocks(Real theta, int max_total);

/// Applies U_theta on modes (mode_a, mode_b) to every column of `columns`,
/// which live in `spec`. Both modes must share one cutoff C and the support
/// must lie in sectors n_a + n_b <= C - 1; blocks must cover 0..C-1.
void apply_beamsplitter(MatrixXc& columns, const FockSpec& spec, int mode_a, int mode_b,
                        const std::vector<MatrixXd>& blocks);

/// U rho U^dagger for a density matrix under the same support precondition.
MatrixXc conjugate_beamsplitter(const MatrixXc& rho, const FockSpec& spec, int mode_a, int mode_b,
                                const std::vector<MatrixXd>& blocks);

class BeamSplitterOp {
 public:
  BeamSplitterOp(Real theta, int cutoff_a, int cutoff_b);

  Real theta() const { return theta_; }
  int cutoff_a() const { return da_; }
  int cutoff_b() const { return db_; }
  /// d_A + d_B - 1: every populated sector is complete at this cutoff.
  int output_cutoff() const { return da_ + db_ - 1; }
  const MatrixXd& block(int total) const { return blocks_.at(static_cast<std::size_t>(total)); }
  const std::vector<MatrixXd>& blocks() const { return blocks_; }

  /// Dense unitary on the (D, D) output space; zero outside complete sectors.
  MatrixXd matrix() const;

  PureState apply(const PureState& two_mode) const;
  DensityMatrix apply(const DensityMatrix& two_mode) const;

 private:
  Real theta_;
  int da_, db_;
  std::vector<MatrixXd> blocks_;
};

/// Verifies the sign convention by conjugating annihilation matrices; throws
/// NumericalError on mismatch. Runs once per process and is cached.
void beamsplitter_self_test();

struct ConvOptions {
  Real theta = kPi / 4;
  /// Upper bound on complex elements of any dense buffer a routine allocates.
  std::size_t max_elements = 40'000'000;
  /// Eigenvalues of inputs at or below this are dropped from the ensembles.
  Real weight_cut = 1e-14;
  /// Joint vectors are transformed in batches of this many columns.
  int batch = 32;
};

/// Per-mode cutoffs D_i = d_i + e_i - 1 of the convolution outputs.
std::vector<int> convolution_cutoffs(const FockSpec& a, const FockSpec& b);

/// Visits every weighted joint vector of U_theta (rho (x) sigma) U_theta^dagger
/// without forming the joint density matrix. The vector lives in
/// `joint` = (D_1..D_N, D_1..D_N); arm A modes are the slow half.
using JointVisitor = std::function<void(Real weight, const VectorXc& joint_vector)>;
FockSpec joint_output_spec(const FockSpec& a, const FockSpec& b);
void visit_joint_outputs(const Ensemble& a, const Ensemble& b, const ConvOptions& opts,
                         const JointVisitor& visit);

struct ConvolutionPair {
  DensityMatrix plus;   ///< arm A
  DensityMatrix minus;  ///< arm B
};

/// Both marginals of U_theta (rho (x) sigma) U_theta^dagger. At the default
/// theta these are rho [+] sigma and rho [-] sigma.
ConvolutionPair convolve(const Ensemble& a, const Ensemble& b, Real leakage,
                         const ConvOptions& opts = {});
ConvolutionPair convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                         const ConvOptions& opts = {});

DensityMatrix boxplus(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts = {});
DensityMatrix boxminus(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts = {});
DensityMatrix boxplus(const PureState& psi, const PureState& phi, const ConvOptions& opts = {});
DensityMatrix boxminus(const PureState& psi, const PureState& phi, const ConvOptions& opts = {});

/// k-fold self-convolution; k = 0 returns the input.
DensityMatrix boxplus_power(const DensityMatrix& rho, int k, const ConvOptions& opts = {});
DensityMatrix boxplus_power(const PureState& psi, int k, const ConvOptions& opts = {});

/// U (rho (x) sigma) U^dagger as a 2N-mode state. Throws MemoryGuardError
/// when the joint matrix exceeds opts.max_elements.
DensityMatrix joint_convolved_state(const DensityMatrix& rho, const DensityMatrix& sigma,
                                    const ConvOptions& opts = {});
DensityMatrix joint_convolved_state(const DensityMatrix& rho, const ConvOptions& opts = {});

/// Zero-pads both single-mode inputs to D = d_A + d_B - 1 and tensors them.
DensityMatrix embed_for_exact_bs(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                 const ConvOptions& opts = {});

/// Diagonal of (-1)^{sum of all occupations} over `spec`.
VectorXd parity_operator(const FockSpec& spec);
Real parity_expectation(const DensityMatrix& rho);

/// Tr[(rho [-] sigma) P], equal to Tr(rho sigma).
Real overlap_via_parity(const DensityMatrix& rho, const DensityMatrix& sigma, const ConvOptions& opts = {});

}  // namespace ngconv
