// Test-only reference implementations and random generators. Nothing here
// calls the library's measures, so agreement is a genuine cross-check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dosest/dos_model.hpp"
#include "dosest/estimator.hpp"
#include "dosest/rng.hpp"

namespace oracle {

using dosest::DoSInterval;
using dosest::DoSSequence;

/// Every interval with h <= until, read straight from the descriptor.
inline std::vector<DoSInterval> intervals_until(const DoSSequence& seq, double until) {
  std::vector<DoSInterval> out;
  for (std::int64_t n = 1;; ++n) {
    auto iv = seq.interval(n);
    if (!iv || iv->h > until) break;
    out.push_back(*iv);
  }
  return out;
}

/// Measure of the attacked set in [a, b] by clipping, sorting and merging.
inline double measure(const std::vector<DoSInterval>& all, double a, double b) {
  std::vector<std::pair<double, double>> pieces;
  for (const auto& iv : all) {
    const double lo = std::max(a, iv.h);
    const double hi = std::min(b, iv.h + iv.tau);
    if (hi > lo) pieces.emplace_back(lo, hi);
  }
  std::sort(pieces.begin(), pieces.end());
  double total = 0.0;
  double cur_lo = 0.0;
  double cur_hi = -1.0;
  for (const auto& [lo, hi] : pieces) {
    if (lo > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return total;
}

inline double measure(const DoSSequence& seq, double a, double b) { return measure(intervals_until(seq, b), a, b); }

inline std::int64_t count(const DoSSequence& seq, double a, double b) {
  std::int64_t c = 0;
  for (const auto& iv : intervals_until(seq, b)) c += (iv.h >= a && iv.h <= b) ? 1 : 0;
  return c;
}

/// sup over attack ends up to `until` of |Xi(0,t)| - b t, each measure
/// recomputed from scratch.
inline double duration_defect_sup(const DoSSequence& seq, double b, double until) {
  const auto all = intervals_until(seq, until);
  double sup = 0.0;
  for (const auto& iv : all) {
    const double t = iv.h + iv.tau;
    if (t > until) break;
    sup = std::max(sup, measure(all, 0.0, t) - b * t);
  }
  return sup;
}

inline double frequency_defect_sup(const DoSSequence& seq, double b, double until) {
  const auto all = intervals_until(seq, until);
  double sup = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) sup = std::max(sup, static_cast<double>(i + 1) - b * all[i].h);
  return sup;
}

/// Estimates after each event, recomputed from the max-rules over the
/// whole history every time.
struct Replayed {
  double t;
  double bd;
  double bf;
};

inline std::vector<Replayed> replay_from_scratch(const dosest::EstimatorConfig& c, const DoSSequence& seq,
                                                 double until) {
  const auto all = intervals_until(seq, until);
  std::vector<double> bd_samples;
  std::vector<double> bf_samples;
  std::vector<Replayed> out;
  double running_xi = 0.0;
  auto estimates = [&] {
    double bd = c.epsilon0;
    double bf = c.epsilon0;
    for (std::size_t i = c.ell; i <= bd_samples.size(); ++i) {
      bd = std::max(bd, c.theta * bd_samples[i - 1] + (1.0 - c.theta));
    }
    for (std::size_t i = c.ell; i <= bf_samples.size(); ++i) bf = std::max(bf, bf_samples[i - 1] / c.theta);
    return std::pair{bd, bf};
  };
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& iv = all[i];
    bf_samples.push_back(static_cast<double>(i + 1) / iv.h);
    auto [bd1, bf1] = estimates();
    out.push_back({iv.h, bd1, bf1});
    if (iv.h + iv.tau > until) break;
    running_xi += iv.tau;
    bd_samples.push_back(running_xi / (iv.h + iv.tau));
    auto [bd2, bf2] = estimates();
    out.push_back({iv.h + iv.tau, bd2, bf2});
  }
  return out;
}

}  // namespace oracle

namespace gen {

/// Random eventually-periodic sequence: up to three prologue attacks, then a
/// pattern of one to three attacks per period. Zero-length attacks appear
/// with probability 1/8.
inline dosest::DoSSequence periodic(dosest::Rng& rng) {
  std::vector<dosest::DoSInterval> prologue;
  double t = rng.uniform(0.0, 2.0);
  const auto p = rng.integer(0, 3);
  for (std::int64_t i = 0; i < p; ++i) {
    const double h = t + rng.uniform(0.1, 2.0);
    const double tau = rng.integer(0, 7) == 0 ? 0.0 : rng.uniform(0.0, 1.5);
    prologue.push_back({h, tau});
    t = h + tau;
  }
  const double start = t + rng.uniform(0.1, 2.0);
  const double period = rng.uniform(0.5, 5.0);
  const auto q = rng.integer(1, 3);
  const double slot = period / static_cast<double>(q);
  std::vector<dosest::DoSInterval> pattern;
  for (std::int64_t j = 0; j < q; ++j) {
    const double h = static_cast<double>(j) * slot + rng.uniform(0.0, 0.3) * slot;
    const double tau = rng.integer(0, 7) == 0 ? 0.0 : rng.uniform(0.0, 0.6) * slot;
    pattern.push_back({h, tau});
  }
  return dosest::DoSSequence::eventually_periodic(std::move(prologue), start, period, std::move(pattern));
}

inline dosest::DoSSequence finite(dosest::Rng& rng) {
  std::vector<dosest::DoSInterval> list;
  double t = 0.0;
  const auto n = rng.integer(0, 12);
  for (std::int64_t i = 0; i < n; ++i) {
    const double h = t + rng.uniform(0.05, 3.0);
    const double tau = rng.integer(0, 7) == 0 ? 0.0 : rng.uniform(0.0, 2.0);
    list.push_back({h, tau});
    t = h + tau;
  }
  return dosest::DoSSequence::finite(std::move(list));
}

inline dosest::EstimatorConfig estimator(dosest::Rng& rng) {
  dosest::EstimatorConfig c;
  c.epsilon0 = rng.uniform(0.001, 0.5);
  c.theta = rng.uniform(0.05, 0.99);
  c.ell = static_cast<int>(rng.integer(2, 5));
  return c;
}

}  // namespace gen

namespace fixtures {

/// Attacks [2n+1, 2n+2), n >= 1.
inline dosest::DoSSequence odd_unit() { return dosest::DoSSequence::eventually_periodic({}, 3.0, 2.0, {{0.0, 1.0}}); }

/// Two short attacks before t = 12, then 4/3 s of every 2 s.
inline dosest::DoSSequence canonical() {
  return dosest::DoSSequence::eventually_periodic({{4.0, 0.5}, {9.0, 0.5}}, 12.0, 2.0, {{0.0, 4.0 / 3.0}});
}

/// h_n = n, tau_n = 0.5.
inline dosest::DoSSequence unit_halves() {
  return dosest::DoSSequence::eventually_periodic({}, 1.0, 1.0, {{0.0, 0.5}});
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("dosest_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
