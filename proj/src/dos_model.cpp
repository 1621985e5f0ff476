#include "dosest/dos_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dosest {

namespace {

constexpr std::int64_t kMaxEnumeration = 50'000'000;

void check_interval(const DoSInterval& iv, const char* what) {
  if (!std::isfinite(iv.h) || !std::isfinite(iv.tau) || iv.h < 0.0 || iv.tau < 0.0) {
    throw std::invalid_argument(std::string(what) + ": interval needs finite h >= 0 and tau >= 0");
  }
}

void check_separated(const std::vector<DoSInterval>& list, const char* what) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    check_interval(list[i], what);
    if (i > 0 && !(list[i].h > list[i - 1].end())) {
      throw std::invalid_argument(std::string(what) + ": intervals must be ordered and strictly separated");
    }
  }
}

void check_range(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("measure: bounds must be finite");
  if (a < 0.0) throw std::invalid_argument("measure: lower bound must be >= 0");
  if (a > b) throw std::invalid_argument("measure: lower bound exceeds upper bound");
}

void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be positive and finite");
  }
}

double pattern_measure(const PeriodicSequence& p) {
  double m = 0.0;
  for (const auto& iv : p.pattern) m += iv.tau;
  return m;
}

// Drift per period is compared against zero with a relative slack so that a
// rate equal to the closed-form limit (e.g. (4/3)/2) is not rejected by one ulp.
bool drift_nonpositive(double drift, double period) {
  return drift <= 1e-12 * std::max(1.0, period);
}

enum class Defect { UpperDuration, UpperFrequency, LowerDuration, LowerFrequency };

BoundVerdict scan_defect(const DoSSequence& seq, Defect kind, double rate, double horizon) {
  check_horizon(horizon);
  if (!std::isfinite(rate) || rate < 0.0) throw std::invalid_argument("bound rate must be finite and >= 0");

  const auto* periodic = seq.as_periodic();
  const std::int64_t first_cycle =
      periodic ? static_cast<std::int64_t>(periodic->prologue.size() + periodic->pattern.size()) : 0;
  const bool generator = seq.kind() == DoSSequence::Kind::Generator;

  double sup = 0.0;  // t = 0 contributes a zero defect in all four cases
  double worst = 0.0;
  double first_half = 0.0;
  double second_half = -std::numeric_limits<double>::infinity();
  auto consider = [&](double t, double value) {
    if (value > sup) {
      sup = value;
      worst = t;
    }
    if (t <= 0.5 * horizon) {
      first_half = std::max(first_half, value);
    } else {
      second_half = std::max(second_half, value);
    }
  };

  IntervalCursor cursor(seq);
  double measure = 0.0;
  while (auto iv = cursor.next()) {
    const std::int64_t n = cursor.index();
    if (iv->h > horizon) {
      if (generator) break;
      if (periodic && n > first_cycle) break;
    }
    const double before = measure;
    measure += iv->end() - iv->h;
    switch (kind) {
      case Defect::UpperDuration: consider(iv->end(), measure - rate * iv->end()); break;
      case Defect::UpperFrequency: consider(iv->h, static_cast<double>(n) - rate * iv->h); break;
      case Defect::LowerDuration: consider(iv->h, rate * iv->h - before); break;
      case Defect::LowerFrequency: consider(iv->h, rate * iv->h - static_cast<double>(n - 1)); break;
    }
  }

  const bool lower = kind == Defect::LowerDuration || kind == Defect::LowerFrequency;
  if (generator || (lower && seq.as_finite())) {
    // The defect can peak at the horizon itself: inside an attack for the
    // upper duration defect, inside a gap for the lower ones.
    double value = 0.0;
    switch (kind) {
      case Defect::UpperDuration: value = xi_measure(seq, 0.0, horizon) - rate * horizon; break;
      case Defect::UpperFrequency: value = static_cast<double>(n_xi(seq, 0.0, horizon)) - rate * horizon; break;
      case Defect::LowerDuration: value = rate * horizon - xi_measure(seq, 0.0, horizon); break;
      case Defect::LowerFrequency: value = rate * horizon - static_cast<double>(n_xi(seq, 0.0, horizon)); break;
    }
    consider(horizon, value);
  }

  BoundVerdict v;
  v.witnessed_offset = std::max(0.0, sup);
  v.worst_time = worst;
  if (seq.as_finite()) {
    // Past the last attack the upper defects only decrease; the lower ones
    // grow without bound unless the rate is zero.
    v.holds = lower ? rate == 0.0 : true;
  } else if (periodic) {
    const double m = pattern_measure(*periodic);
    const double q = static_cast<double>(periodic->pattern.size());
    const double span = rate * periodic->period;
    double drift = 0.0;
    switch (kind) {
      case Defect::UpperDuration: drift = m - span; break;
      case Defect::UpperFrequency: drift = q - span; break;
      case Defect::LowerDuration: drift = span - m; break;
      case Defect::LowerFrequency: drift = span - q; break;
    }
    v.holds = drift_nonpositive(drift, periodic->period);
  } else {
    // No certificate: call it holding when the second half of the horizon
    // sets no new high.
    v.conclusive = false;
    v.holds = second_half <= first_half + 1e-12 * std::max(1.0, std::abs(first_half));
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------- DoSSequence

DoSSequence DoSSequence::finite(std::vector<DoSInterval> intervals) {
  check_separated(intervals, "finite sequence");
  DoSSequence s;
  s.rep_ = FiniteSequence{std::move(intervals)};
  return s;
}

DoSSequence DoSSequence::eventually_periodic(std::vector<DoSInterval> prologue, double start,
                                             double period, std::vector<DoSInterval> pattern) {
  if (!std::isfinite(start) || start < 0.0) throw std::invalid_argument("periodic sequence: start must be >= 0");
  if (!std::isfinite(period) || period <= 0.0) throw std::invalid_argument("periodic sequence: period must be > 0");
  if (pattern.empty()) throw std::invalid_argument("periodic sequence: pattern is empty");
  check_separated(prologue, "periodic prologue");
  check_separated(pattern, "periodic pattern");
  for (const auto& iv : pattern) {
    if (iv.h >= period) throw std::invalid_argument("periodic sequence: pattern offsets must lie in [0, period)");
  }
  if (!(pattern.back().end() < period + pattern.front().h)) {
    throw std::invalid_argument("periodic sequence: pattern must stay separated across the period boundary");
  }
  if (!prologue.empty() && !(start + pattern.front().h > prologue.back().end())) {
    throw std::invalid_argument("periodic sequence: prologue must end before the periodic part starts");
  }
  DoSSequence s;
  s.rep_ = PeriodicSequence{std::move(prologue), start, period, std::move(pattern)};
  return s;
}

DoSSequence DoSSequence::generator(std::function<DoSInterval(std::int64_t)> fn,
                                   std::optional<DeclaredAsymptotics> asymptotics) {
  if (!fn) throw std::invalid_argument("generator sequence: empty function");
  DoSSequence s;
  s.rep_ = GeneratorSequence{std::move(fn), asymptotics};
  return s;
}

DoSSequence::Kind DoSSequence::kind() const noexcept {
  switch (rep_.index()) {
    case 0: return Kind::Finite;
    case 1: return Kind::EventuallyPeriodic;
    default: return Kind::Generator;
  }
}

std::optional<DoSInterval> DoSSequence::interval(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("interval index starts at 1");
  if (const auto* f = as_finite()) {
    if (static_cast<std::size_t>(n) > f->intervals.size()) return std::nullopt;
    return f->intervals[static_cast<std::size_t>(n - 1)];
  }
  if (const auto* p = as_periodic()) {
    const auto pro = static_cast<std::int64_t>(p->prologue.size());
    if (n <= pro) return p->prologue[static_cast<std::size_t>(n - 1)];
    const std::int64_t m = n - pro - 1;
    const auto q = static_cast<std::int64_t>(p->pattern.size());
    const std::int64_t k = m / q;
    const auto& off = p->pattern[static_cast<std::size_t>(m % q)];
    return DoSInterval{p->start + static_cast<double>(k) * p->period + off.h, off.tau};
  }
  const auto iv = as_generator()->interval(n);
  check_interval(iv, "generator sequence");
  return iv;
}

bool operator==(const DoSSequence& a, const DoSSequence& b) {
  if (const auto* fa = a.as_finite()) {
    const auto* fb = b.as_finite();
    return fb && *fa == *fb;
  }
  if (const auto* pa = a.as_periodic()) {
    const auto* pb = b.as_periodic();
    return pb && *pa == *pb;
  }
  return false;
}

std::optional<DoSInterval> IntervalCursor::next() {
  if (n_ >= kMaxEnumeration) {
    throw std::length_error("attack sequence too dense to enumerate over the requested range");
  }
  auto iv = seq_->interval(n_ + 1);
  if (!iv) return std::nullopt;
  if (prev_ && !(iv->h > prev_->end())) {
    throw std::invalid_argument("attack sequence violates h_{n+1} > h_n + tau_n at n = " + std::to_string(n_));
  }
  ++n_;
  prev_ = iv;
  return iv;
}

// ------------------------------------------------------------------ measures

double xi_measure(const DoSSequence& seq, double a, double b) {
  check_range(a, b);
  double sum = 0.0;
  IntervalCursor cursor(seq);
  while (auto iv = cursor.next()) {
    if (iv->h > b) break;
    const double lo = std::max(a, iv->h);
    const double hi = std::min(b, iv->end());
    if (hi > lo) sum += hi - lo;
  }
  return sum;
}

double theta_measure(const DoSSequence& seq, double a, double b) {
  return (b - a) - xi_measure(seq, a, b);
}

std::int64_t n_xi(const DoSSequence& seq, double a, double b) {
  check_range(a, b);
  std::int64_t count = 0;
  IntervalCursor cursor(seq);
  while (auto iv = cursor.next()) {
    if (iv->h > b) break;
    if (iv->h >= a) ++count;
  }
  return count;
}

namespace {

bool list_contains(const std::vector<DoSInterval>& list, double t) {
  auto it = std::upper_bound(list.begin(), list.end(), t,
                             [](double value, const DoSInterval& iv) { return value < iv.h; });
  if (it == list.begin()) return false;
  return std::prev(it)->contains(t);
}

}  // namespace

bool contains(const DoSSequence& seq, double t) {
  if (!std::isfinite(t) || t < 0.0) return false;
  if (const auto* f = seq.as_finite()) return list_contains(f->intervals, t);
  if (const auto* p = seq.as_periodic()) {
    if (list_contains(p->prologue, t)) return true;
    const double k0 = std::floor((t - p->start) / p->period);
    for (double k = k0 - 1.0; k <= k0 + 1.0; k += 1.0) {
      if (k < 0.0) continue;
      for (const auto& off : p->pattern) {
        const DoSInterval iv{p->start + k * p->period + off.h, off.tau};
        if (iv.contains(t)) return true;
      }
    }
    return false;
  }
  IntervalCursor cursor(seq);
  while (auto iv = cursor.next()) {
    if (iv->h > t) break;
    if (iv->contains(t)) return true;
  }
  return false;
}

// ------------------------------------------------------------------- oracles

BoundVerdict verify_duration_bound(const DoSSequence& seq, double b_d, double horizon) {
  if (!(b_d >= 0.0 && b_d <= 1.0)) throw std::invalid_argument("duration bound must lie in [0, 1]");
  return scan_defect(seq, Defect::UpperDuration, b_d, horizon);
}

BoundVerdict verify_frequency_bound(const DoSSequence& seq, double b_f, double horizon) {
  if (!(b_f >= 0.0)) throw std::invalid_argument("frequency bound must be >= 0");
  return scan_defect(seq, Defect::UpperFrequency, b_f, horizon);
}

BoundVerdict verify_lower_duration_bound(const DoSSequence& seq, double b_d, double horizon) {
  if (!(b_d >= 0.0 && b_d <= 1.0)) throw std::invalid_argument("lower duration rate must lie in [0, 1]");
  return scan_defect(seq, Defect::LowerDuration, b_d, horizon);
}

BoundVerdict verify_lower_frequency_bound(const DoSSequence& seq, double b_f, double horizon) {
  if (!(b_f >= 0.0)) throw std::invalid_argument("lower frequency rate must be >= 0");
  return scan_defect(seq, Defect::LowerFrequency, b_f, horizon);
}

double limsup_duration_ratio(const DoSSequence& seq, double horizon) {
  check_horizon(horizon);
  if (seq.as_finite()) return 0.0;
  if (const auto* p = seq.as_periodic()) return pattern_measure(*p) / p->period;

  double best = -1.0;
  double measure = 0.0;
  IntervalCursor cursor(seq);
  while (auto iv = cursor.next()) {
    if (iv->end() > horizon) break;
    measure += iv->end() - iv->h;
    if (iv->end() >= 0.5 * horizon && iv->end() > 0.0) best = std::max(best, measure / iv->end());
  }
  return best >= 0.0 ? best : xi_measure(seq, 0.0, horizon) / horizon;
}

double limsup_frequency(const DoSSequence& seq, double horizon) {
  check_horizon(horizon);
  if (seq.as_finite()) return 0.0;
  if (const auto* p = seq.as_periodic()) return static_cast<double>(p->pattern.size()) / p->period;

  double best = -1.0;
  IntervalCursor cursor(seq);
  while (auto iv = cursor.next()) {
    if (iv->h > horizon) break;
    if (iv->h >= 0.5 * horizon && iv->h > 0.0) {
      best = std::max(best, static_cast<double>(cursor.index()) / iv->h);
    }
  }
  return best >= 0.0 ? best : static_cast<double>(n_xi(seq, 0.0, horizon)) / horizon;
}

EdgeCaseReport classify_edge_case(const DoSSequence& seq) {
  EdgeCaseReport r;
  if (seq.as_finite()) return r;
  if (const auto* p = seq.as_periodic()) {
    r.unbounded_duration_ratio = pattern_measure(*p) / p->period >= 1.0;
    return r;
  }
  const auto& decl = seq.as_generator()->asymptotics;
  if (!decl) {
    throw std::invalid_argument("cannot classify a generator family without declared asymptotics");
  }
  r.unbounded_duration_ratio = decl->inf_duration >= 1.0;
  r.unbounded_frequency = std::isinf(decl->inf_frequency);
  r.unbounded_single_attack = std::isinf(decl->sup_tau);
  return r;
}

}  // namespace dosest
