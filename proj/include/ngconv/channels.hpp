#pragma once

#include <variant>
#include <vector>

#include "ngconv/core.hpp"
#include "ngconv/fock.hpp"

namespace ngconv {

inline constexpr int kDefaultQuadratureOrder = 21;

struct LossChannel {
  Real gamma = 0;
};

/// rho_mn -> rho_mn exp(-variance (m - n)^2 / 2).
struct DephasingChannel {
  Real variance = 0;
};

/// Gaussian mixture of displacements with density
/// e^{-|xi|^2 / (2 variance)} / (2 pi variance); on vacuum this gives a
/// thermal state with nbar = 2 variance. `order` is the minimum Gauss-Hermite
/// order per component; it is raised to d_out + d_in - 1, where the rule is
/// exact on the truncated space.
struct DisplacementNoise {
  Real variance = 0;
  int order = kDefaultQuadratureOrder;
};

/// Mixture of U_{theta + phi} over phi ~ N(0, variance). Acts on a mode pair.
struct NoisyBeamSplitter {
  Real theta = kPi / 4;
  Real variance = 0;
  int order = kDefaultQuadratureOrder;
};

/// Single-mode Kraus operators (d_out x d_in).
struct KrausChannel {
  std::vector<MatrixXc> ops;
};

struct BosonicChannel;

/// ops = {c_1, ..., c_k} is c_1 o ... o c_k: c_k acts first.
struct Composition {
  std::vector<BosonicChannel> ops;
};

struct BosonicChannel {
  std::variant<LossChannel, DephasingChannel, DisplacementNoise, NoisyBeamSplitter, KrausChannel, Composition>
      kind;
  /// Target modes. Empty means every mode for single-mode kinds and (0, 1)
  /// for the noisy beam splitter.
  std::vector<int> modes;
};

BosonicChannel loss_channel(Real gamma, std::vector<int> modes = {});
BosonicChannel dephasing_channel(Real variance, std::vector<int> modes = {});
BosonicChannel displacement_noise_channel(Real variance, int order = kDefaultQuadratureOrder,
                                          std::vector<int> modes = {});
BosonicChannel noisy_beamsplitter(Real theta, Real variance, int order = kDefaultQuadratureOrder,
                                  int mode_a = 0, int mode_b = 1);
BosonicChannel kraus_channel(std::vector<MatrixXc> ops, std::vector<int> modes = {});
BosonicChannel compose(std::vector<BosonicChannel> ops);
/// N_D[var_d] o N_P[var_p] o N_L[gamma]: loss acts first.
BosonicChannel standard_noise(Real displacement_variance, Real dephasing_variance, Real gamma,
                              int order = kDefaultQuadratureOrder, std::vector<int> modes = {});

/// Loss Kraus set K_k = sqrt(gamma^k / k!) (1 - gamma)^{n/2} a^k, k < cutoff.
std::vector<MatrixXc> loss_kraus(Real gamma, int cutoff);

/// Checks every parameter range; throws InvalidArgument.
void validate(const BosonicChannel& channel);

DensityMatrix apply(const BosonicChannel& channel, const DensityMatrix& rho,
                    const Tolerances& tol = default_tolerances());

/// Independent loss route: beam splitter at arcsin(sqrt(gamma)) with a vacuum
/// ancilla, then trace out the ancilla. Single-mode input.
DensityMatrix loss_via_ancilla(const DensityMatrix& rho, Real gamma);

/// Max |entry| change of the displacement-noise output when Q is doubled.
Real displacement_noise_convergence(const DensityMatrix& rho, Real variance, int order);

}  // namespace ngconv
