#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace dosest {

/// One attack interval, the set {h} ∪ [h, h + tau). A zero duration is the
/// single instant {h}.
struct DoSInterval {
  double h = 0.0;
  double tau = 0.0;

  [[nodiscard]] double end() const noexcept { return h + tau; }
  [[nodiscard]] bool contains(double t) const noexcept { return t == h || (h <= t && t < end()); }

  friend bool operator==(const DoSInterval&, const DoSInterval&) = default;
};

/// Asymptotic facts a generator family declares about itself. Needed to
/// classify families that cannot be classified from finitely many intervals.
struct DeclaredAsymptotics {
  double sup_tau = 0.0;        ///< sup of single-attack lengths (+inf allowed)
  double inf_duration = 0.0;   ///< inf of the duration-bound set
  double inf_frequency = 0.0;  ///< inf of the frequency-bound set (+inf allowed)
};

/// Finite list of intervals, ordered and strictly separated.
struct FiniteSequence {
  std::vector<DoSInterval> intervals;
  friend bool operator==(const FiniteSequence&, const FiniteSequence&) = default;
};

/// A finite prologue followed by a pattern repeating every `period` from
/// `start`. Pattern entries hold offsets relative to the period start;
/// absolute times are always `start + k * period + offset`.
struct PeriodicSequence {
  std::vector<DoSInterval> prologue;
  double start = 0.0;
  double period = 1.0;
  std::vector<DoSInterval> pattern;
  friend bool operator==(const PeriodicSequence&, const PeriodicSequence&) = default;
};

/// n -> (h_n, tau_n) with n starting at 1. Verdicts on generators only
/// cover the scanned horizon.
struct GeneratorSequence {
  std::function<DoSInterval(std::int64_t)> interval;
  std::optional<DeclaredAsymptotics> asymptotics;
};

/// An attack sequence. Construction validates ordering and separation
/// (h_{n+1} > h_n + tau_n, h_n >= 0); generators are checked lazily during
/// enumeration.
class DoSSequence {
 public:
  enum class Kind { Finite, EventuallyPeriodic, Generator };

  DoSSequence() = default;  // empty finite sequence

  static DoSSequence none() { return {}; }
  static DoSSequence finite(std::vector<DoSInterval> intervals);
  static DoSSequence eventually_periodic(std::vector<DoSInterval> prologue, double start,
                                         double period, std::vector<DoSInterval> pattern);
  static DoSSequence generator(std::function<DoSInterval(std::int64_t)> fn,
                               std::optional<DeclaredAsymptotics> asymptotics = std::nullopt);

  [[nodiscard]] Kind kind() const noexcept;
  /// Finite and eventually-periodic sequences admit conclusive certificates.
  [[nodiscard]] bool structured() const noexcept { return kind() != Kind::Generator; }

  [[nodiscard]] const FiniteSequence* as_finite() const noexcept { return std::get_if<FiniteSequence>(&rep_); }
  [[nodiscard]] const PeriodicSequence* as_periodic() const noexcept { return std::get_if<PeriodicSequence>(&rep_); }
  [[nodiscard]] const GeneratorSequence* as_generator() const noexcept { return std::get_if<GeneratorSequence>(&rep_); }

  /// The n-th interval (1-based); nullopt past the end of a finite sequence.
  [[nodiscard]] std::optional<DoSInterval> interval(std::int64_t n) const;

  /// Generators never compare equal.
  friend bool operator==(const DoSSequence& a, const DoSSequence& b);

 private:
  std::variant<FiniteSequence, PeriodicSequence, GeneratorSequence> rep_;
};

/// Walks a sequence in order, enforcing separation as it goes.
class IntervalCursor {
 public:
  explicit IntervalCursor(const DoSSequence& seq) : seq_(&seq) {}

  /// Next interval, or nullopt once a finite sequence is exhausted. Throws
  /// std::length_error after an absurd number of intervals (a generator
  /// whose h_n does not diverge fast enough for the requested horizon).
  std::optional<DoSInterval> next();
  [[nodiscard]] std::int64_t index() const noexcept { return n_; }

 private:
  const DoSSequence* seq_;
  std::int64_t n_ = 0;
  std::optional<DoSInterval> prev_;
};

/// Outcome of a bound check. `witnessed_offset` is max(0, sup of the defect)
/// and `worst_time` where that sup is attained (or approached). `conclusive`
/// is false for generators, whose verdict only covers the scanned horizon.
struct BoundVerdict {
  bool holds = false;
  double witnessed_offset = 0.0;
  double worst_time = 0.0;
  bool conclusive = true;
};

struct EdgeCaseReport {
  bool unbounded_duration_ratio = false;
  bool unbounded_frequency = false;
  bool unbounded_single_attack = false;

  [[nodiscard]] bool any() const noexcept {
    return unbounded_duration_ratio || unbounded_frequency || unbounded_single_attack;
  }
};

// Measures. All throw std::invalid_argument on a < 0, a > b or non-finite b.

/// Lebesgue measure of the attacked set within [a, b].
[[nodiscard]] double xi_measure(const DoSSequence& seq, double a, double b);
/// (b - a) - xi_measure(seq, a, b).
[[nodiscard]] double theta_measure(const DoSSequence& seq, double a, double b);
/// Number of attack launches h_n in [a, b], both ends inclusive.
[[nodiscard]] std::int64_t n_xi(const DoSSequence& seq, double a, double b);
[[nodiscard]] bool contains(const DoSSequence& seq, double t);

// Oracles. A bound "holds" when a finite offset exists for all t >= 0.

/// |Xi(0,t)| <= kappa + b_d t. Scans the defect at every attack end.
[[nodiscard]] BoundVerdict verify_duration_bound(const DoSSequence& seq, double b_d, double horizon);
/// n_xi(0,t) <= Lambda + b_f t. Scans the defect at every launch.
[[nodiscard]] BoundVerdict verify_frequency_bound(const DoSSequence& seq, double b_f, double horizon);
/// |Xi(0,t)| >= -kappa' + b_d t; witnessed_offset is the smallest such kappa'.
[[nodiscard]] BoundVerdict verify_lower_duration_bound(const DoSSequence& seq, double b_d, double horizon);
/// n_xi(0,t) >= -Lambda' + b_f t; witnessed_offset is the smallest such Lambda'.
[[nodiscard]] BoundVerdict verify_lower_frequency_bound(const DoSSequence& seq, double b_f, double horizon);

/// limsup |Xi(0,t)|/t. Closed form for structured sequences; otherwise the
/// max of the ratio over attack ends in [horizon/2, horizon].
[[nodiscard]] double limsup_duration_ratio(const DoSSequence& seq, double horizon);
/// limsup n_xi(0,t)/t, same conventions.
[[nodiscard]] double limsup_frequency(const DoSSequence& seq, double horizon);

/// Throws std::invalid_argument for generators without declared asymptotics.
[[nodiscard]] EdgeCaseReport classify_edge_case(const DoSSequence& seq);

}  // namespace dosest
