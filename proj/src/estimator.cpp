#include "dosest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dosest {

void EstimatorConfig::validate() const {
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) {
    throw std::invalid_argument("epsilon0 must satisfy 0 < epsilon0 < 1");
  }
  const bool unit_ok = unsafe_unit_theta && theta == 1.0;
  if (!(theta > 0.0 && theta < 1.0) && !unit_ok) {
    throw std::invalid_argument("theta must satisfy 0 < theta < 1 (theta = 1 never certifies a duration bound)");
  }
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");
}

Estimator::Estimator(EstimatorConfig config)
    : config_(config), bd_hat_(config.epsilon0), bf_hat_(config.epsilon0) {
  config_.validate();
  bd_steps_.push_back({0.0, bd_hat_});
  bf_steps_.push_back({0.0, bf_hat_});
}

void Estimator::attack_start(double h) {
  if (!std::isfinite(h) || h < 0.0) throw std::invalid_argument("attack start must be finite and >= 0");
  if (open_) throw std::invalid_argument("attack started while the previous one is still open");
  if (!events_.empty() && !(h > events_.back().end())) {
    throw std::invalid_argument("attack start must come strictly after the previous attack ends");
  }
  if (h < clock_) throw std::invalid_argument("attack start precedes the observed clock");

  open_ = h;
  clock_ = h;
  ++launches_;
  const double sample = h > 0.0 ? static_cast<double>(launches_) / h : std::numeric_limits<double>::infinity();
  bf_samples_.push_back(sample);
  if (launches_ >= config_.ell) {
    const double candidate = std::max(config_.epsilon0, sample / config_.theta);
    if (candidate > bf_hat_) {
      bf_hat_ = candidate;
      bf_steps_.push_back({h, bf_hat_});
    }
  }
}

void Estimator::attack_end(double h, double tau, double xi_to_end) {
  if (!open_ || *open_ != h) throw std::invalid_argument("attack end does not match the open attack");
  if (!std::isfinite(tau) || tau < 0.0) throw std::invalid_argument("attack duration must be finite and >= 0");
  const double end = h + tau;
  const double expected = xi_ + tau;
  if (!std::isfinite(xi_to_end) || std::abs(xi_to_end - expected) > 1e-9 * std::max(1.0, end)) {
    throw std::invalid_argument("attacked measure " + std::to_string(xi_to_end) +
                                " disagrees with the observed history (" + std::to_string(expected) + ")");
  }

  open_.reset();
  clock_ = end;
  xi_ = xi_to_end;
  events_.push_back({h, tau});
  const double sample = end > 0.0 ? xi_to_end / end : 0.0;
  bd_samples_.push_back(sample);
  const auto n = static_cast<std::int64_t>(events_.size());
  if (n >= config_.ell) {
    const double candidate = std::max(config_.epsilon0, config_.theta * sample + (1.0 - config_.theta));
    if (candidate > bd_hat_) {
      bd_hat_ = candidate;
      bd_steps_.push_back({end, bd_hat_});
    }
  }
}

void Estimator::advance_clock(double t) {
  if (!std::isfinite(t) || t < clock_) throw std::invalid_argument("clock cannot move backwards");
  clock_ = t;
}

namespace {

double value_at(const std::vector<Step>& steps, double t) {
  auto it = std::upper_bound(steps.begin(), steps.end(), t,
                             [](double value, const Step& s) { return value < s.t; });
  return std::prev(it)->value;
}

}  // namespace

Estimates Estimator::query(double t) const {
  if (!(t >= 0.0) || t > clock_) {
    throw std::out_of_range("query time " + std::to_string(t) + " outside observed history [0, " +
                            std::to_string(clock_) + "]");
  }
  return {value_at(bd_steps_, t), value_at(bf_steps_, t)};
}

Estimator on_attack_start(Estimator s, double h) {
  s.attack_start(h);
  return s;
}

Estimator on_attack_end(Estimator s, double h, double tau, double xi_to_end) {
  s.attack_end(h, tau, xi_to_end);
  return s;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Init: return "init";
    case EventKind::AttackStart: return "start";
    case EventKind::AttackEnd: return "end";
  }
  return "?";
}

// ------------------------------------------------------------- SequenceFeed

SequenceFeed::SequenceFeed(EstimatorConfig config, DoSSequence seq)
    : seq_(std::move(seq)), est_(config) {
  log_.push_back({0.0, EventKind::Init, 0, est_.bd_hat(), est_.bf_hat()});
}

void SequenceFeed::advance_to(double t) {
  if (t < est_.observed_until()) throw std::invalid_argument("feed cannot move backwards");
  for (;;) {
    if (!pending_) {
      pending_ = seq_.interval(next_);
      pending_started_ = false;
      if (!pending_) break;
    }
    const DoSInterval iv = *pending_;
    if (!pending_started_) {
      if (iv.h > t) break;
      est_.attack_start(iv.h);
      pending_started_ = true;
      log_.push_back({iv.h, EventKind::AttackStart, next_, est_.bd_hat(), est_.bf_hat()});
    }
    if (iv.end() > t) break;
    est_.attack_end(iv.h, iv.tau, xi_measure(seq_, 0.0, iv.end()));
    log_.push_back({iv.end(), EventKind::AttackEnd, next_, est_.bd_hat(), est_.bf_hat()});
    last_ = Completion{iv.end(), next_, est_.bd_hat(), est_.bf_hat()};
    pending_.reset();
    ++next_;
  }
  est_.advance_clock(t);
}

SequenceFeed replay(const EstimatorConfig& config, const DoSSequence& seq, double until) {
  SequenceFeed feed(config, seq);
  feed.advance_to(until);
  return feed;
}

// ------------------------------------------------------------------ limits

Estimates limit_estimates(const EstimatorConfig& config, const DoSSequence& seq) {
  config.validate();
  if (seq.as_generator()) throw std::invalid_argument("limit estimates need a finite or eventually-periodic sequence");

  std::int64_t last_index = 0;
  double bd_sup = -1.0;
  double bf_sup = -1.0;
  if (const auto* f = seq.as_finite()) {
    last_index = static_cast<std::int64_t>(f->intervals.size());
  } else {
    const auto* p = seq.as_periodic();
    const auto q = static_cast<std::int64_t>(p->pattern.size());
    // First occurrence at or after ell of every pattern position, plus slack.
    last_index = std::max<std::int64_t>(config.ell, static_cast<std::int64_t>(p->prologue.size())) + 2 * q;
    double m = 0.0;
    for (const auto& iv : p->pattern) m += iv.tau;
    bd_sup = m / p->period;
    bf_sup = static_cast<double>(q) / p->period;
  }

  double xi = 0.0;
  IntervalCursor cursor(seq);
  while (cursor.index() < last_index) {
    const auto iv = cursor.next();
    if (!iv) break;
    xi += iv->tau;
    const std::int64_t n = cursor.index();
    if (n < config.ell) continue;
    bd_sup = std::max(bd_sup, xi / iv->end());
    bf_sup = std::max(bf_sup, static_cast<double>(n) / iv->h);
  }

  Estimates out{config.epsilon0, config.epsilon0};
  if (bd_sup >= 0.0) out.bd = std::max(out.bd, config.theta * bd_sup + (1.0 - config.theta));
  if (bf_sup >= 0.0) out.bf = std::max(out.bf, bf_sup / config.theta);
  return out;
}

// ---------------------------------------------------------------- deadline

Deadline reliability_deadline(const DeadlineInput& in, const DoSSequence& seq, double horizon) {
  if (!(in.theta > 0.0 && in.theta < 1.0)) throw std::invalid_argument("theta must satisfy 0 < theta < 1");
  if (in.kappa_prime < 0.0 || in.lambda_prime < 0.0) throw std::invalid_argument("offsets must be >= 0");
  if (in.b_d > in.inf_d) throw std::invalid_argument("b_d must not exceed inf_d");
  if (in.b_f > in.inf_f) throw std::invalid_argument("b_f must not exceed inf_f");
  if (in.inf_f == 0.0) return {true, 0, 0.0};

  const double limit = std::min((1.0 - in.inf_d) / (1.0 - in.b_d), in.b_f / in.inf_f);
  if (!(in.theta < limit)) {
    throw std::invalid_argument("theta " + std::to_string(in.theta) + " violates theta < " + std::to_string(limit));
  }
  if (!(in.b_f > in.theta * in.inf_f)) throw std::invalid_argument("b_f must exceed theta * inf_f");

  const auto dur = verify_lower_duration_bound(seq, in.b_d, horizon);
  if (!dur.holds || dur.witnessed_offset > in.kappa_prime + 1e-12) {
    throw std::invalid_argument("kappa' = " + std::to_string(in.kappa_prime) +
                                " is not a lower duration offset (needs " + std::to_string(dur.witnessed_offset) + ")");
  }
  const auto freq = verify_lower_frequency_bound(seq, in.b_f, horizon);
  if (!freq.holds || freq.witnessed_offset > in.lambda_prime + 1e-12) {
    throw std::invalid_argument("Lambda' = " + std::to_string(in.lambda_prime) +
                                " is not a lower frequency offset (needs " + std::to_string(freq.witnessed_offset) + ")");
  }

  const double end_threshold = in.kappa_prime * in.theta / (in.theta * in.b_d + 1.0 - in.theta - in.inf_d);
  const double start_threshold = in.lambda_prime / (in.b_f - in.theta * in.inf_f);
  IntervalCursor cursor(seq);
  while (auto iv = cursor.next()) {
    if (iv->end() > end_threshold && iv->h > start_threshold) return {false, cursor.index(), iv->end()};
  }
  throw std::invalid_argument("sequence ends before the deadline thresholds are crossed");
}

}  // namespace dosest
