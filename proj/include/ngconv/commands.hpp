#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ngconv/config.hpp"
#include "ngconv/fock.hpp"
#include "ngconv/measures.hpp"

namespace ngconv {

enum ExitCode : int {
  kExitOk = 0,
  kExitBadConfig = 2,
  kExitNumerical = 3,
  kExitMemoryGuard = 4,
  kExitOracleBreach = 5,
};

/// A state built under the cutoff policy together with the policy's record.
struct PreparedState {
  PureState psi;
  int cutoff = 0;
  bool auto_cutoff = false;
};

/// cutoff > 0 is used as given; 0 picks the smallest cutoff whose
/// construction leakage is below tau.
PreparedState prepare_state(const StateSpec& spec, int cutoff, Real tau);

/// One evaluated measure with its provenance.
struct MeasureRecord {
  std::string state;
  Real state_param = 0;
  Real noise_param = 0;
  std::string measure;
  Real value = 0;
  Real leakage = 0;
  int cutoff = 0;             ///< input cutoff
  int output_cutoff = 0;      ///< per-mode cutoff of the convolution outputs, 0 if none
  bool auto_cutoff = false;
  Real clipped_mass = 0;
  Real projected_mass = 0;
  int quadrature_order = 0;
  std::uint64_t seed = 0;
  std::int64_t shots = 0;
  Real stderr_ = 0;
};

/// Evaluates `measure` on `spec` under `noise`. Protocol measures (parity,
/// zero-mean-parity, and nge:2:1 with noise) run the noisy circuits; ming and
/// dF use the loss rate of `noise` as a state channel and reject other noise.
/// The auto policy raises the cutoff until output leakage is below 10 tau
/// (tau squared, floored at 1e-16, for dF).
MeasureRecord evaluate_measure(const StateSpec& spec, const std::string& measure, const NoiseConfig& noise,
                               int cutoff, Real tau, std::int64_t shots = 0, std::uint64_t seed = 0);

/// Schema-1 table text: `#schema=1`, the fixed header, then rows.
std::string csv_header();
std::string csv_row(const MeasureRecord& r);
std::string jsonl_row(const MeasureRecord& r);
/// The full provenance record printed by `measure`.
std::string json_record(const MeasureRecord& r);

int cmd_measure(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_oracle_check(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Validates and dispatches on config.command, mapping error categories to
/// exit codes.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Flag parsing for the `ngconv` executable.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ngconv
