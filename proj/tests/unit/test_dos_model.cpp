#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "../support.hpp"
#include "dosest/dos_model.hpp"

using namespace dosest;
using doctest::Approx;

TEST_CASE("measures on h_n = n, tau_n = 0.5") {
  const auto seq = fixtures::unit_halves();
  CHECK(xi_measure(seq, 2.3, 5.6) == Approx(1.7).epsilon(1e-12));
  CHECK(theta_measure(seq, 2.3, 5.6) == Approx(1.6).epsilon(1e-12));
  CHECK(n_xi(seq, 2.3, 5.6) == 3);
}

TEST_CASE("measures on the empty sequence") {
  const auto seq = DoSSequence::none();
  CHECK(xi_measure(seq, 0.0, 100.0) == 0.0);
  CHECK(theta_measure(seq, 3.0, 7.5) == 4.5);
  CHECK(n_xi(seq, 0.0, 1e6) == 0);
}

TEST_CASE("measures on odd unit attacks") {
  const auto seq = fixtures::odd_unit();
  for (int n = 1; n <= 40; ++n) {
    CHECK(xi_measure(seq, 0.0, 2.0 * n + 2.0) == Approx(n));
  }
  CHECK(n_xi(seq, 0.0, 9.0) == 4);
}

TEST_CASE("single interval covering the window leaves no free time") {
  const auto seq = DoSSequence::finite({{1.0, 10.0}});
  CHECK(theta_measure(seq, 2.0, 9.0) == 0.0);
}

TEST_CASE("measure arguments are validated") {
  const auto seq = fixtures::odd_unit();
  CHECK_THROWS_AS((void)xi_measure(seq, 5.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS((void)xi_measure(seq, -1.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS((void)xi_measure(seq, 0.0, std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS((void)n_xi(seq, 5.0, 4.0), std::invalid_argument);
}

TEST_CASE("membership is left-closed and right-open") {
  const auto seq = DoSSequence::finite({{1.0, 0.5}});
  CHECK(contains(seq, 1.0));
  CHECK(contains(seq, 1.25));
  CHECK_FALSE(contains(seq, 1.5));
  CHECK_FALSE(contains(seq, 0.999));
  const auto point = DoSSequence::finite({{1.0, 0.0}});
  CHECK(contains(point, 1.0));
  CHECK_FALSE(contains(point, 1.0 + 1e-12));
}

TEST_CASE("construction rejects overlapping or unordered attacks") {
  CHECK_THROWS_AS(DoSSequence::finite({{1.0, 1.0}, {2.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(DoSSequence::finite({{3.0, 1.0}, {1.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(DoSSequence::finite({{-1.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(DoSSequence::eventually_periodic({}, 0.0, 2.0, {{0.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(DoSSequence::eventually_periodic({}, 0.0, 2.0, {{2.0, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(DoSSequence::eventually_periodic({}, 0.0, 0.0, {{0.0, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(DoSSequence::eventually_periodic({{1.0, 2.0}}, 2.5, 2.0, {{0.0, 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(DoSSequence::eventually_periodic({}, 0.0, 2.0, {}), std::invalid_argument);
}

TEST_CASE("generators are checked while enumerating") {
  const auto bad = DoSSequence::generator([](std::int64_t n) { return DoSInterval{static_cast<double>(n), 2.0}; });
  CHECK_THROWS_AS((void)xi_measure(bad, 0.0, 10.0), std::invalid_argument);
}

TEST_CASE("periodic times are computed, not accumulated") {
  const auto seq = DoSSequence::eventually_periodic({}, 0.1, 0.1, {{0.0, 0.05}});
  const auto iv = seq.interval(1'000'001);
  REQUIRE(iv);
  CHECK(iv->h == 0.1 + 1e6 * 0.1);
}

TEST_CASE("duration bound verification") {
  const auto seq = fixtures::odd_unit();
  const auto ok = verify_duration_bound(seq, 0.5, 100.0);
  CHECK(ok.holds);
  CHECK(ok.conclusive);
  CHECK(ok.witnessed_offset == 0.0);
  CHECK_FALSE(verify_duration_bound(seq, 0.49, 100.0).holds);
  const auto empty = verify_duration_bound(DoSSequence::none(), 0.0, 10.0);
  CHECK(empty.holds);
  CHECK(empty.witnessed_offset == 0.0);
  CHECK_THROWS_AS((void)verify_duration_bound(seq, 1.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS((void)verify_duration_bound(seq, -0.1, 10.0), std::invalid_argument);
  CHECK_THROWS_AS((void)verify_duration_bound(seq, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("frequency bound verification") {
  const auto seq = fixtures::odd_unit();
  const auto ok = verify_frequency_bound(seq, 0.5, 100.0);
  CHECK(ok.holds);
  // n - 0.5 (2n + 1) = -0.5 at every launch, so the offset is zero.
  CHECK(ok.witnessed_offset == 0.0);
  CHECK_FALSE(verify_frequency_bound(seq, 0.4, 100.0).holds);
  CHECK(verify_frequency_bound(DoSSequence::none(), 0.0, 10.0).holds);
  CHECK_THROWS_AS((void)verify_frequency_bound(seq, -0.1, 10.0), std::invalid_argument);
}

TEST_CASE("witnessed offsets match a from-scratch defect scan") {
  // The horizon falls in a gap, so both scans see the same attacks.
  const auto seq = fixtures::canonical();
  for (double b : {0.55, 2.0 / 3.0, 0.7, 0.9}) {
    CHECK(verify_duration_bound(seq, b, 199.5).witnessed_offset ==
          Approx(oracle::duration_defect_sup(seq, b, 199.5)).epsilon(1e-12));
  }
  for (double b : {0.5, 0.6, 1.0}) {
    CHECK(verify_frequency_bound(seq, b, 199.5).witnessed_offset ==
          Approx(oracle::frequency_defect_sup(seq, b, 199.5)).epsilon(1e-12));
  }
}

TEST_CASE("lower bounds on odd unit attacks need offset 1.5") {
  const auto seq = fixtures::odd_unit();
  const auto d = verify_lower_duration_bound(seq, 0.5, 100.0);
  CHECK(d.holds);
  CHECK(d.witnessed_offset == Approx(1.5));
  const auto f = verify_lower_frequency_bound(seq, 0.5, 100.0);
  CHECK(f.holds);
  CHECK(f.witnessed_offset == Approx(1.5));
  CHECK_FALSE(verify_lower_duration_bound(seq, 0.51, 100.0).holds);
  CHECK_FALSE(verify_lower_duration_bound(DoSSequence::finite({{1.0, 1.0}}), 0.1, 100.0).holds);
  CHECK(verify_lower_duration_bound(DoSSequence::finite({{1.0, 1.0}}), 0.0, 100.0).holds);
}

TEST_CASE("limsup closed forms") {
  CHECK(limsup_duration_ratio(fixtures::odd_unit(), 100.0) == 0.5);
  CHECK(limsup_frequency(fixtures::odd_unit(), 100.0) == 0.5);
  CHECK(limsup_duration_ratio(DoSSequence::none(), 100.0) == 0.0);
  CHECK(limsup_frequency(DoSSequence::none(), 100.0) == 0.0);
  CHECK(limsup_duration_ratio(fixtures::canonical(), 100.0) == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(limsup_frequency(fixtures::canonical(), 100.0) == 0.5);
  CHECK_THROWS_AS((void)limsup_duration_ratio(fixtures::odd_unit(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)limsup_frequency(fixtures::odd_unit(), -1.0), std::invalid_argument);
}

TEST_CASE("generator limsup and verdicts are horizon-limited") {
  const auto seq = DoSSequence::generator(
      [](std::int64_t n) { return DoSInterval{2.0 * static_cast<double>(n) + 1.0, 1.0}; });
  CHECK(limsup_duration_ratio(seq, 4000.0) == Approx(0.5).epsilon(1e-3));
  CHECK(limsup_frequency(seq, 4000.0) == Approx(0.5).epsilon(1e-3));
  const auto v = verify_duration_bound(seq, 0.5, 1000.0);
  CHECK_FALSE(v.conclusive);
  CHECK(v.holds);
  CHECK_FALSE(verify_duration_bound(seq, 0.45, 1000.0).holds);
}

TEST_CASE("edge-case classification") {
  CHECK_FALSE(classify_edge_case(fixtures::canonical()).any());
  CHECK_FALSE(classify_edge_case(DoSSequence::none()).any());

  const auto growing = DoSSequence::generator(
      [](std::int64_t n) {
        const double k = static_cast<double>(n);
        return DoSInterval{k * (k + 1.0) / 2.0 + k - 1.0, k};
      },
      DeclaredAsymptotics{std::numeric_limits<double>::infinity(), 1.0, 0.0});
  const auto r = classify_edge_case(growing);
  CHECK(r.unbounded_single_attack);
  CHECK(r.unbounded_duration_ratio);

  const auto dense = DoSSequence::generator(
      [](std::int64_t n) { return DoSInterval{std::log(static_cast<double>(n) + 1.0), 0.0}; },
      DeclaredAsymptotics{0.0, 0.0, std::numeric_limits<double>::infinity()});
  CHECK(classify_edge_case(dense).unbounded_frequency);

  const auto undeclared = DoSSequence::generator([](std::int64_t n) { return DoSInterval{double(n), 0.1}; });
  CHECK_THROWS_AS((void)classify_edge_case(undeclared), std::invalid_argument);
}

TEST_CASE("equality of descriptors") {
  CHECK(fixtures::canonical() == fixtures::canonical());
  CHECK_FALSE(fixtures::canonical() == fixtures::odd_unit());
  const auto g = DoSSequence::generator([](std::int64_t n) { return DoSInterval{double(n), 0.1}; });
  CHECK_FALSE(g == g);
}

// ----------------------------------------------------------------- properties

TEST_CASE("property: measures agree with the merge oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto seq = trial % 3 == 0 ? gen::finite(rng) : gen::periodic(rng);
    for (int k = 0; k < 5; ++k) {
      double a = rng.uniform(0.0, 30.0);
      double b = rng.uniform(0.0, 30.0);
      if (a > b) std::swap(a, b);
      const double xi = xi_measure(seq, a, b);
      CHECK(xi == Approx(oracle::measure(seq, a, b)).epsilon(1e-12));
      CHECK(n_xi(seq, a, b) == oracle::count(seq, a, b));
      CHECK(xi + theta_measure(seq, a, b) == Approx(b - a).epsilon(1e-14));
    }
  }
}

TEST_CASE("property: measures are monotone and bounded by t") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = gen::periodic(rng);
    double prev_xi = 0.0;
    std::int64_t prev_n = 0;
    for (double t = 0.0; t <= 40.0; t += 0.37) {
      const double xi = xi_measure(seq, 0.0, t);
      const auto n = n_xi(seq, 0.0, t);
      CHECK(xi >= prev_xi);
      CHECK(n >= prev_n);
      CHECK(xi <= t);
      prev_xi = xi;
      prev_n = n;
    }
  }
}

TEST_CASE("property: endpoints of every generated interval") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = gen::periodic(rng);
    for (std::int64_t n = 1; n <= 20; ++n) {
      const auto iv = seq.interval(n);
      REQUIRE(iv);
      CHECK(contains(seq, iv->h));
      if (iv->tau > 0.0) CHECK_FALSE(contains(seq, iv->end()));
    }
  }
}

TEST_CASE("property: verified bounds are upward closed") {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = gen::periodic(rng);
    const double b = rng.uniform(0.0, 1.0);
    if (verify_duration_bound(seq, b, 50.0).holds) {
      for (double up = b; up <= 1.0; up += 0.05) CHECK(verify_duration_bound(seq, up, 50.0).holds);
    }
    const double f = rng.uniform(0.0, 3.0);
    if (verify_frequency_bound(seq, f, 50.0).holds) {
      for (double up = f; up <= 4.0; up += 0.2) CHECK(verify_frequency_bound(seq, up, 50.0).holds);
    }
  }
}

TEST_CASE("property: limsup equals the smallest verified bound") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = gen::periodic(rng);
    const auto* p = seq.as_periodic();
    const double horizon = p->start + 12.0 * p->period;

    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (verify_duration_bound(seq, mid, horizon).holds ? hi : lo) = mid;
    }
    CHECK(std::abs(hi - limsup_duration_ratio(seq, horizon)) <= 1e-9);

    lo = 0.0;
    hi = 10.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (verify_frequency_bound(seq, mid, horizon).holds ? hi : lo) = mid;
    }
    CHECK(std::abs(hi - limsup_frequency(seq, horizon)) <= 1e-9);
  }
}

TEST_CASE("property: certified verdicts agree with long-horizon growth") {
  // Independent check: below the rate the defect keeps growing, above it the
  // defect over the second half never beats the first half.
  Rng rng(16);
  for (int trial = 0; trial < 60; ++trial) {
    const auto seq = gen::periodic(rng);
    const double rate = limsup_duration_ratio(seq, 100.0);
    const double horizon = seq.as_periodic()->start + 200.0 * seq.as_periodic()->period;
    const double below = rate - 0.02;
    const double above = std::min(1.0, rate + 0.02);
    if (below > 0.0) {
      CHECK_FALSE(verify_duration_bound(seq, below, horizon).holds);
      CHECK(oracle::duration_defect_sup(seq, below, horizon) > oracle::duration_defect_sup(seq, below, horizon / 2));
    }
    CHECK(verify_duration_bound(seq, above, horizon).holds);
    CHECK(oracle::duration_defect_sup(seq, above, horizon) ==
          Approx(oracle::duration_defect_sup(seq, above, horizon / 2)));
  }
}
