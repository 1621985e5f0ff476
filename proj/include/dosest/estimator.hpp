#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dosest/dos_model.hpp"

namespace dosest {

struct EstimatorConfig {
  double epsilon0 = 0.01;
  double theta = 0.67;
  int ell = 2;
  /// Admits theta == 1. Only the counterexample scenarios set this; the
  /// resulting estimates are not guaranteed to become bounds.
  bool unsafe_unit_theta = false;

  /// Throws std::invalid_argument unless 0 < epsilon0 < 1, 0 < theta < 1
  /// (or theta == 1 with the unsafe flag) and ell >= 2.
  void validate() const;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

struct Estimates {
  double bd = 0.0;
  double bf = 0.0;
};

/// A step of a right-continuous piecewise-constant function: `value` holds
/// from `t` until the next step.
struct Step {
  double t = 0.0;
  double value = 0.0;
};

/// Event-driven duration/frequency estimator. Both estimates start at
/// epsilon0; from the ell-th launch on, each launch h_n raises the frequency
/// estimate to at least (n / h_n) / theta and each completion h_n + tau_n
/// raises the duration estimate to at least
/// theta * |Xi(0, h_n + tau_n)| / (h_n + tau_n) + 1 - theta.
class Estimator {
 public:
  explicit Estimator(EstimatorConfig config);

  /// Launch of the next attack at h. Throws std::invalid_argument if h is
  /// not strictly after the previous attack, precedes the clock, or an
  /// attack is still open.
  void attack_start(double h);
  /// Completion of the open attack. `xi_to_end` is |Xi(0, h + tau)| as
  /// measured by the caller; it must agree with the measure accumulated
  /// from the observed attacks.
  void attack_end(double h, double tau, double xi_to_end);
  /// Declares that time has been observed up to t with no further event.
  void advance_clock(double t);

  /// Estimates held at time t (right-continuous). Throws std::out_of_range
  /// for t < 0 or t beyond the observed history.
  [[nodiscard]] Estimates query(double t) const;

  [[nodiscard]] const EstimatorConfig& config() const noexcept { return config_; }
  [[nodiscard]] double bd_hat() const noexcept { return bd_hat_; }
  [[nodiscard]] double bf_hat() const noexcept { return bf_hat_; }
  [[nodiscard]] double observed_until() const noexcept { return clock_; }
  [[nodiscard]] std::int64_t launches() const noexcept { return launches_; }
  [[nodiscard]] bool attack_open() const noexcept { return open_.has_value(); }

  /// Completed attacks in order.
  [[nodiscard]] const std::vector<DoSInterval>& events() const noexcept { return events_; }
  /// B_d(i) for every completed attack i (1-based index i at position i-1).
  [[nodiscard]] const std::vector<double>& bd_samples() const noexcept { return bd_samples_; }
  /// B_f(i) = i / h_i for every launch (+inf when h_1 = 0).
  [[nodiscard]] const std::vector<double>& bf_samples() const noexcept { return bf_samples_; }
  [[nodiscard]] const std::vector<Step>& bd_steps() const noexcept { return bd_steps_; }
  [[nodiscard]] const std::vector<Step>& bf_steps() const noexcept { return bf_steps_; }

 private:
  EstimatorConfig config_;
  double bd_hat_;
  double bf_hat_;
  double clock_ = 0.0;
  double xi_ = 0.0;
  std::int64_t launches_ = 0;
  std::optional<double> open_;
  std::vector<DoSInterval> events_;
  std::vector<double> bd_samples_;
  std::vector<double> bf_samples_;
  std::vector<Step> bd_steps_;
  std::vector<Step> bf_steps_;
};

// Value-style transitions.
[[nodiscard]] Estimator on_attack_start(Estimator s, double h);
[[nodiscard]] Estimator on_attack_end(Estimator s, double h, double tau, double xi_to_end);

enum class EventKind { Init, AttackStart, AttackEnd };
[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;

struct EstimateEvent {
  double t = 0.0;
  EventKind kind = EventKind::Init;
  std::int64_t index = 0;
  double bd_hat = 0.0;
  double bf_hat = 0.0;
};

struct Completion {
  double time = 0.0;
  std::int64_t index = 0;
  double bd_hat = 0.0;
  double bf_hat = 0.0;
};

/// Drives an Estimator from a known sequence, taking |Xi(0, h_n + tau_n)|
/// from xi_measure at each completion.
class SequenceFeed {
 public:
  SequenceFeed(EstimatorConfig config, DoSSequence seq);

  /// Feeds every launch and completion at or before t, then advances the
  /// clock to t. t must not decrease between calls.
  void advance_to(double t);

  [[nodiscard]] const Estimator& estimator() const noexcept { return est_; }
  [[nodiscard]] const DoSSequence& sequence() const noexcept { return seq_; }
  [[nodiscard]] const std::optional<Completion>& last_completion() const noexcept { return last_; }
  /// One entry per event, starting with the Init entry at t = 0.
  [[nodiscard]] const std::vector<EstimateEvent>& log() const noexcept { return log_; }

 private:
  DoSSequence seq_;
  Estimator est_;
  std::int64_t next_ = 1;
  std::optional<DoSInterval> pending_;
  bool pending_started_ = false;
  std::optional<Completion> last_;
  std::vector<EstimateEvent> log_;
};

/// Runs a feed over [0, until].
[[nodiscard]] SequenceFeed replay(const EstimatorConfig& config, const DoSSequence& seq, double until);

/// Limits of the two estimates as t -> infinity. Finite sequences settle
/// after their last attack; for eventually-periodic ones each residue class
/// of samples is a monotone ratio in the period count, so the supremum is
/// the larger of its first value and the per-period rate. Throws for
/// generators.
[[nodiscard]] Estimates limit_estimates(const EstimatorConfig& config, const DoSSequence& seq);

struct DeadlineInput {
  double theta = 0.0;
  double b_d = 0.0;
  double kappa_prime = 0.0;
  double b_f = 0.0;
  double lambda_prime = 0.0;
  double inf_d = 0.0;
  double inf_f = 0.0;
};

struct Deadline {
  bool immediate = false;
  std::int64_t n1 = 0;
  double time = 0.0;
};

/// Time after which the estimates are guaranteed bounds, given lower rates
/// (b_d, kappa'), (b_f, Lambda') for the sequence. The lower-rate constants
/// are checked against `seq` over `horizon` before use. Returns `immediate`
/// when inf_f = 0; otherwise the first n with
///   h_n + tau_n > kappa' theta / (theta b_d + 1 - theta - inf_d)  and
///   h_n > Lambda' / (b_f - theta inf_f),
/// with deadline h_n + tau_n.
[[nodiscard]] Deadline reliability_deadline(const DeadlineInput& input, const DoSSequence& seq, double horizon);

}  // namespace dosest
