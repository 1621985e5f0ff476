#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dosest/dos_model.hpp"
#include "dosest/estimator.hpp"
#include "dosest/linalg.hpp"

namespace dosest {

/// Scenario text problem. `line()` is 0 when the problem is not tied to a
/// line (missing keys, overrides).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& message, int line);
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

class UnknownKeyError : public ScenarioError {
  using ScenarioError::ScenarioError;
};
class MissingKeyError : public ScenarioError {
  using ScenarioError::ScenarioError;
};
class InvalidValueError : public ScenarioError {
  using ScenarioError::ScenarioError;
};

enum class ControllerKind { None, Consensus, Impulsive };
[[nodiscard]] std::string_view to_string(ControllerKind kind) noexcept;

struct ConsensusSpec {
  std::string topology = "ring";
  int agents = 0;
  std::optional<Vector> x0;  ///< nullopt: drawn from run.seed in [-10, 10]
  double x0_sum = 0.0;
  double delta0 = 0.0;
  double gamma1 = 0.0;
  friend bool operator==(const ConsensusSpec&, const ConsensusSpec&) = default;
};

struct ImpulsiveSpec {
  Matrix a;
  double jump_gain = 0.0;
  double mu = 0.0;
  std::optional<double> beta;  ///< nullopt: spectral norm of a
  double gamma3 = 0.0;
  Vector x0;
  double integrator_step = 1e-3;
  friend bool operator==(const ImpulsiveSpec&, const ImpulsiveSpec&) = default;
};

struct RunSpec {
  double horizon = 0.0;
  std::uint64_t seed = 1;
  std::vector<std::string> outputs{"estimates", "trace", "summary", "plotdata"};
  double settle_threshold = 1e-3;
  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct SweepSpec {
  std::string parameter;
  std::vector<std::string> values;
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ScenarioConfig {
  std::string name;
  DoSSequence sequence;
  EstimatorConfig estimator;
  ControllerKind controller = ControllerKind::None;
  ConsensusSpec consensus;
  ImpulsiveSpec impulsive;
  RunSpec run;
  std::optional<SweepSpec> sweep;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Key/value overrides applied on top of the text, e.g. {"estimator.theta", "0.9"}.
using Overrides = std::map<std::string, std::string>;

/// Parses `section.key = value` lines (`#` starts a comment) and validates
/// the result. Throws a ScenarioError subclass naming the key and line.
[[nodiscard]] ScenarioConfig parse_scenario(std::string_view text, const Overrides& overrides = {});

/// Canonical text; parse_scenario(print_scenario(c)) == c.
[[nodiscard]] std::string print_scenario(const ScenarioConfig& config);

/// One config per sweep value (named `<name>_<key>_<value>`), or the config
/// itself when it has no sweep.
[[nodiscard]] std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& config);

/// Shortest decimal that reads back to the same double.
[[nodiscard]] std::string format_double(double v);

}  // namespace dosest
