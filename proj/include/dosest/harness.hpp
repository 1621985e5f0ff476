#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dosest/consensus.hpp"
#include "dosest/estimator.hpp"
#include "dosest/impulsive.hpp"
#include "dosest/scenario.hpp"

namespace dosest {

/// Failure while running a scenario; the message starts with its name.
class RunError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSummary {
  std::string name;
  ControllerKind controller = ControllerKind::None;
  /// First logged instant from which every logged estimate pair is a
  /// certified duration/frequency bound of the sequence.
  std::optional<double> reliability_time;
  double final_bd_hat = 0.0;
  double final_bf_hat = 0.0;
  /// First sample after which the error (consensus) or state (impulsive)
  /// norm stays below run.settle_threshold.
  std::optional<double> settling_time;
  std::optional<double> peak_state_norm;
  std::optional<impulsive::DecayFit> decay;
  std::uint64_t seed = 0;
  double horizon = 0.0;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<EstimateEvent> estimates;
  std::vector<Step> bd_steps;
  std::vector<Step> bf_steps;
  std::optional<consensus::MasTrace> mas;
  std::optional<impulsive::ImpulsiveTrace> impulsive;
  RunSummary summary;
};

/// Builds the controller scenario of a config (initial states drawn from
/// run.seed when requested).
[[nodiscard]] consensus::MasScenario make_mas_scenario(const ScenarioConfig& config);
[[nodiscard]] impulsive::ImpulsiveScenario make_impulsive_scenario(const ScenarioConfig& config);

/// Replays the estimator to run.horizon and runs the configured controller.
/// Throws RunError.
[[nodiscard]] RunResult run_scenario(const ScenarioConfig& config);

/// Runs configs concurrently; results keep the input order.
[[nodiscard]] std::vector<RunResult> run_batch(const std::vector<ScenarioConfig>& configs);

// CSV writers. Numbers use the shortest round-trip form.

/// t,bd_hat,bf_hat,event_kind
void emit_estimates(const std::vector<EstimateEvent>& log, std::ostream& out);
/// Consensus: t_k,delta_k,denied,e_norm,x_1..x_N.
void emit_trace(const consensus::MasTrace& trace, std::ostream& out);
/// Impulsive: t_k,delta_k,applied,norm_x_minus,norm_x_plus,V,alpha_cum.
void emit_trace(const impulsive::ImpulsiveTrace& trace, std::ostream& out);
/// series,t,value: vertices of the bd_hat and bf_hat step functions up to
/// `until`, starting at (0, epsilon0).
void emit_plotdata(const std::vector<Step>& bd, const std::vector<Step>& bf, double until, std::ostream& out);
/// key,value
void emit_summary(const RunSummary& summary, std::ostream& out);
/// Summary as a JSON object.
[[nodiscard]] std::string summary_json(const RunSummary& summary);
[[nodiscard]] std::string summaries_json(const std::vector<RunSummary>& summaries);

/// Writes the requested outputs as `<dir>/<name>_<output>.csv`; the trace
/// file is skipped when no controller runs. Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace dosest
