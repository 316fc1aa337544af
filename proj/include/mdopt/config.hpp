// Flat key=value experiment configuration.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdopt/descent.hpp"
#include "mdopt/efficiency.hpp"
#include "mdopt/execution.hpp"
#include "mdopt/schedule.hpp"

namespace mdopt {

enum class Command { equiv, cross_equiv, efficiency, trajectory, identities };

std::string command_name(Command c);
std::optional<Command> parse_command(std::string_view s);

struct ExperimentConfig {
  Command command = Command::equiv;
  std::string family;
  int dim = 1;
  std::vector<double> mu_true;  // true parameter, mean coordinates
  OptimizerKind optimizer = OptimizerKind::natural;
  StepSchedule schedule{StepSchedule::Kind::inv_t, 1.0};
  std::int64_t T = 1000;
  int M = 1000;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;   // equivalence deviation budget
  double tol_gap = 1e-10;    // identities: relative duality gap
  double tol_inverse = 1e-9;   // identities: inverse-map deviation
  double tol_hessian = 1e-7;   // identities: Hessian reciprocity
  int samples = 1000;          // identities: random draws
  std::string out;             // output path prefix
  InitMode init = InitMode::first_observation;
  std::vector<double> init_value;
  bool per_replicate = false;
  ExecutionPolicy execution = ExecutionPolicy::parallel;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ParseError {
  int line = 0;  // 0: whole-document error
  std::string message;
};

std::string format_error(const ParseError& e);

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ParseError> errors;  // every problem found, not just the first
  bool ok() const { return config.has_value() && errors.empty(); }
};

// Accepts `key=value` lines ('#' starts a comment line, blank lines are
// skipped, whitespace around keys and values is trimmed). Repeated and
// unknown keys are rejected. Returns either a fully validated config or the
// list of all validation errors with line numbers.
ParseResult parse_config(std::string_view text);

// Canonical key=value form; parse_config(serialize_config(c)) compares equal
// to c and the bytes are stable across runs.
std::string serialize_config(const ExperimentConfig& c);

}  // namespace mdopt
