#include "dosest/consensus.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dosest::consensus {

Graph Graph::ring(std::size_t n) {
  if (n < 3) throw std::invalid_argument("a ring needs at least 3 agents");
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, (i + 1) % n) = 1.0;
    a((i + 1) % n, i) = 1.0;
  }
  return Graph(std::move(a));
}

Graph Graph::path(std::size_t n) {
  if (n < 2) throw std::invalid_argument("a path needs at least 2 agents");
  Matrix a(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = 1.0;
    a(i + 1, i) = 1.0;
  }
  return Graph(std::move(a));
}

Graph Graph::complete(std::size_t n) {
  if (n < 2) throw std::invalid_argument("a complete graph needs at least 2 agents");
  Matrix a(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 0.0;
  return Graph(std::move(a));
}

Graph Graph::from_adjacency(Matrix adjacency) {
  const std::size_t n = adjacency.rows();
  if (!adjacency.square() || n < 2) throw std::invalid_argument("adjacency must be square with at least 2 agents");
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) throw std::invalid_argument("adjacency diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = adjacency(i, j);
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("adjacency entries must be 0 or 1");
      if (v != adjacency(j, i)) throw std::invalid_argument("adjacency must be symmetric");
    }
  }
  return Graph(std::move(adjacency));
}

Matrix laplacian(const Graph& g) {
  const std::size_t n = g.size();
  const Matrix& a = g.adjacency();

  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) != 0.0 && !seen[j]) {
        seen[j] = true;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  if (reached != n) throw std::invalid_argument("graph is disconnected");

  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      degree += a(i, j);
      if (i != j) l(i, j) = -a(i, j);
    }
    l(i, i) = degree;
  }
  return l;
}

Spectrum lambda_extremes(const Matrix& laplacian) {
  const Vector eig = symmetric_eigenvalues(laplacian);
  if (eig.size() < 2) throw std::invalid_argument("laplacian needs at least 2 rows");
  return {eig[1], eig.back()};
}

bool admissible(double delta, double lambda_n) noexcept {
  return std::abs(1.0 - delta * lambda_n) < 1.0;
}

double delta_update(double bd_hat, double bf_hat, double delta0, double gamma1) {
  if (!(bd_hat < 1.0) || !(bd_hat > 0.0)) throw std::invalid_argument("bd_hat must lie in (0, 1)");
  if (!(bf_hat > 0.0)) throw std::invalid_argument("bf_hat must be positive");
  if (!(gamma1 > 1.0)) throw std::invalid_argument("gamma1 must exceed 1");
  return std::min(delta0, (1.0 - bd_hat) / (gamma1 * bf_hat));
}

Vector step(std::span<const double> x, const Matrix& laplacian, double delta, bool denied) {
  Vector out(x.begin(), x.end());
  if (denied) return out;
  const Vector lx = laplacian * x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= delta * lx[i];
  return out;
}

Vector random_initial_state(std::size_t n, double lo, double hi, double sum, Rng& rng) {
  if (n < 1 || !(lo < hi)) throw std::invalid_argument("invalid initial-state range");
  const double n_d = static_cast<double>(n);
  if (sum < lo * n_d || sum > hi * n_d) throw std::invalid_argument("target sum unreachable within the range");
  Vector x(n);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      x[i] = rng.uniform(lo, hi);
      partial += x[i];
    }
    x[n - 1] = sum - partial;
    if (x[n - 1] >= lo && x[n - 1] <= hi) return x;
  }
  throw std::runtime_error("could not draw an initial state with the requested sum");
}

Vector flagship_initial_state() { return {-7.2, 4.5, 9.1, -3.8, -8.6, 6.4, -3.4}; }

MasTrace run(const MasScenario& sc) {
  const std::size_t n = sc.graph.size();
  if (sc.x0.size() != n) throw std::invalid_argument("x0 has " + std::to_string(sc.x0.size()) + " entries for " +
                                                     std::to_string(n) + " agents");
  if (!(sc.horizon > 0.0) || !std::isfinite(sc.horizon)) throw std::invalid_argument("horizon must be positive");
  if (!(sc.gamma1 > 1.0)) throw std::invalid_argument("gamma1 must exceed 1");

  const Matrix l = laplacian(sc.graph);
  const Spectrum spec = lambda_extremes(l);
  if (!(sc.delta0 > 0.0) || !admissible(sc.delta0, spec.lambda_n)) {
    throw std::invalid_argument("delta0 must satisfy |1 - delta0 * lambda_N| < 1 (delta0 < " +
                                std::to_string(2.0 / spec.lambda_n) + ")");
  }

  MasTrace trace;
  trace.lambda2 = spec.lambda2;
  trace.lambda_n = spec.lambda_n;
  trace.mean = std::accumulate(sc.x0.begin(), sc.x0.end(), 0.0) / static_cast<double>(n);

  SequenceFeed feed(sc.estimator, sc.seq);
  double delta = sc.delta0;
  std::int64_t applied_completion = 0;
  trace.delta_min = trace.delta_max = delta;

  Vector x = sc.x0;
  Vector e(n);
  for (double t = 0.0; t <= sc.horizon; t += delta) {
    feed.advance_to(t);
    if (const auto& c = feed.last_completion(); c && c->index != applied_completion) {
      delta = delta_update(c->bd_hat, c->bf_hat, sc.delta0, sc.gamma1);
      applied_completion = c->index;
      trace.delta_min = std::min(trace.delta_min, delta);
      trace.delta_max = std::max(trace.delta_max, delta);
    }
    const bool denied = contains(sc.seq, t);
    for (std::size_t i = 0; i < n; ++i) e[i] = x[i] - trace.mean;
    trace.samples.push_back({t, delta, denied, x, norm(e)});
    x = step(x, l, delta, denied);
  }

  trace.gamma2 = std::max(std::abs(1.0 - trace.delta_min * spec.lambda2),
                          std::abs(1.0 - trace.delta_max * spec.lambda_n));
  trace.estimates = feed.log();
  return trace;
}

}  // namespace dosest::consensus
