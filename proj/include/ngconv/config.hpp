#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ngconv/core.hpp"
#include "ngconv/protocol.hpp"

namespace ngconv {

/// A parsed `--state` value.
///   fock:N  coherent:Z  cat:+:Z  cat:-:Z  file:PATH
/// Z is real or `re,im`. A file holds one amplitude per line as `re` or
/// `re im`, Fock index ascending. Sweeps accept the family names alone.
struct StateSpec {
  enum class Family { Fock, Coherent, Cat, File };
  Family family = Family::Fock;
  int n = 0;
  Complex z = 0;
  int sign = +1;
  std::string path;
  bool has_param = true;
};

StateSpec parse_state(const std::string& text);
std::string format_state(const StateSpec& s);

/// Everything one CLI invocation needs. The text form is one `key = value`
/// per line; `#` starts a comment; unknown keys are errors.
struct RunConfig {
  std::string command = "measure";  ///< measure | sweep | oracle-check
  std::string state = "fock:1";
  int cutoff = 0;                   ///< 0 selects the auto-by-leakage policy
  Real tau = 1e-10;                 ///< construction leakage bound of the auto policy
  std::string measure = "nge:2:1";  ///< nge:A:K | ming:A | dF | parity | zero-mean-parity
  NoiseConfig noise;
  std::vector<Real> state_grid;
  std::vector<Real> noise_grid;
  std::string noise_axis = "eps";  ///< eps (uniform noise) | gamma (state loss)
  std::string output;              ///< empty writes to stdout
  std::string format = "csv";      ///< csv | jsonl
  std::uint64_t seed = 0;
  std::int64_t shots = 0;          ///< 0 reports exact expectations
  std::string only = "all";        ///< oracle-check filter: all | fock | lossy-fock | cat
  Real tolerance = 1e-6;           ///< oracle-check pass bound

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Checks every field; throws InvalidArgument.
void validate(const RunConfig& config);

/// `a,b,c` or the inclusive range `start:stop:step`; empty text is an empty grid.
std::vector<Real> parse_grid(const std::string& text);

/// Shortest text that parses back to the same double.
std::string format_real(Real x);

}  // namespace ngconv
