#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ngconv/channels.hpp"
#include "ngconv/conv.hpp"
#include "ngconv/core.hpp"
#include "ngconv/fock.hpp"

namespace ngconv {

/// Noise of the simulated circuits. Variances are sigma^2; the uniform
/// shortcut sets every sigma, gamma and eps_p to one value.
struct NoiseConfig {
  Real displacement_variance = 0;  ///< sigma_D^2
  Real dephasing_variance = 0;     ///< sigma_P^2
  Real gamma = 0;                  ///< loss rate
  Real bs_variance = 0;            ///< sigma_B^2 of the beam splitter angle
  Real readout_flip = 0;           ///< eps_p of the ancilla
  int order = kDefaultQuadratureOrder;

  static NoiseConfig uniform(Real eps, int order = kDefaultQuadratureOrder);

  /// Throws InvalidArgument on negative values, gamma or eps_p above 1, order < 1.
  void validate() const;
  bool noiseless() const;
  /// The mode channel N_D o N_P o N_L.
  BosonicChannel mode_channel() const;

  bool operator==(const NoiseConfig&) const = default;
};

struct ShotPlan {
  std::int64_t shots = 1000;
  std::uint64_t seed = 0;
};

struct ShotEstimate {
  Real estimate = 0;
  Real stderr_ = 0;  ///< sqrt((1 - m^2) / shots)
  std::int64_t shots = 0;
};

/// Per-stage settings shared by the staged pipelines.
struct ProtocolOptions {
  ConvOptions conv;
  Tolerances tol;
  /// Marginal tail below which intermediate states are re-truncated.
  Real stage_tail = 1e-13;
};

/// Four-copy test: noise, noisy BS layer 1 keeping the [+] arms, noise, noisy
/// BS layer 2, parity of arm B, times (1 - 2 eps_p). At most two modes are
/// held jointly.
Real run_nge21_protocol(const PureState& psi, const NoiseConfig& noise, const ProtocolOptions& opts = {});

/// Three-copy zero-mean test. The third copy idles through layer 1 and so
/// passes the mode noise twice. Throws InvalidArgument for |mean| >= 1e-6.
Real run_zero_mean_protocol(const PureState& psi, const NoiseConfig& noise, const ProtocolOptions& opts = {});

/// Brute-force four-mode evolution of the same circuit, tracing nothing until
/// the readout. Displacement noise is not supported (it grows cutoffs);
/// input cutoff at most 6.
Real nge21_four_mode_reference(const PureState& psi, const NoiseConfig& noise);

/// Noise-free swap-test terms of the Frobenius measure.
struct FrobeniusCircuits {
  Real joint_purity = 0;     ///< circuit (c): Tr rho_AB^2
  Real marginal_purity = 0;  ///< circuit (e): Tr rho_A^2 Tr rho_B^2
  Real cross = 0;            ///< circuit (d): Tr[rho_AB (rho_A (x) rho_B)]
  Real d_f = 0;
};

FrobeniusCircuits run_dF_circuits(const DensityMatrix& rho, const ProtocolOptions& opts = {});

/// +-1 outcomes with mean `expectation` from a seeded mt19937_64:
/// u = (x >> 11) 2^-53, outcome +1 iff u < (1 + expectation) / 2.
ShotEstimate sample_shots(Real expectation, const ShotPlan& plan);

struct SweepRow {
  Real state_param = 0;
  Real noise_param = 0;
  std::string measure;
  Real value = 0;
  Real leakage = 0;
  int cutoff = 0;
};

using SweepEvaluator = std::function<SweepRow(Real state_param, Real noise_param)>;
using SweepSink = std::function<void(const SweepRow&)>;

/// State parameters outer, noise parameters inner; rows reach the sink in
/// that order and are also returned.
std::vector<SweepRow> sweep(const std::vector<Real>& state_grid, const std::vector<Real>& noise_grid,
                            const SweepEvaluator& evaluate, const SweepSink& sink = {});

}  // namespace ngconv
