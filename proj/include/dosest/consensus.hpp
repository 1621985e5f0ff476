#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dosest/dos_model.hpp"
#include "dosest/estimator.hpp"
#include "dosest/linalg.hpp"
#include "dosest/rng.hpp"

namespace dosest::consensus {

/// Undirected graph given by a symmetric 0/1 adjacency matrix.
class Graph {
 public:
  static Graph ring(std::size_t n);
  static Graph path(std::size_t n);
  static Graph complete(std::size_t n);
  /// Throws std::invalid_argument unless square, n >= 2, entries in {0, 1},
  /// symmetric, zero diagonal.
  static Graph from_adjacency(Matrix adjacency);

  [[nodiscard]] std::size_t size() const noexcept { return adj_.rows(); }
  [[nodiscard]] const Matrix& adjacency() const noexcept { return adj_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  explicit Graph(Matrix adj) : adj_(std::move(adj)) {}
  Matrix adj_;
};

/// Degree matrix minus adjacency. Throws std::invalid_argument for a
/// disconnected graph.
[[nodiscard]] Matrix laplacian(const Graph& g);

struct Spectrum {
  double lambda2 = 0.0;
  double lambda_n = 0.0;
};

/// Second-smallest and largest eigenvalue of a symmetric Laplacian.
[[nodiscard]] Spectrum lambda_extremes(const Matrix& laplacian);

/// |1 - delta * lambda_n| < 1.
[[nodiscard]] bool admissible(double delta, double lambda_n) noexcept;

/// min{delta0, (1 - bd_hat) / (gamma1 * bf_hat)}.
[[nodiscard]] double delta_update(double bd_hat, double bf_hat, double delta0, double gamma1);

/// One sampling period of x' = -L x with input held from t_k: x is
/// unchanged when the sample is denied, else (I - delta L) x.
[[nodiscard]] Vector step(std::span<const double> x, const Matrix& laplacian, double delta, bool denied);

/// n values uniform in [lo, hi] with the given sum, by rejection on the
/// last coordinate.
[[nodiscard]] Vector random_initial_state(std::size_t n, double lo, double hi, double sum, Rng& rng);
/// Fixed 7-agent start in [-10, 10] summing to -3.
[[nodiscard]] Vector flagship_initial_state();

struct MasScenario {
  Graph graph = Graph::ring(7);
  Vector x0;
  double delta0 = 0.0;
  double gamma1 = 0.0;
  EstimatorConfig estimator;
  DoSSequence seq;
  double horizon = 0.0;
};

struct MasSample {
  double t = 0.0;
  double delta = 0.0;  ///< interval to the next sample
  bool denied = false;
  Vector x;            ///< state at t, before this sample's update
  double e_norm = 0.0; ///< |x - mean * 1|
};

struct MasTrace {
  std::vector<MasSample> samples;
  double mean = 0.0;
  double gamma2 = 0.0;
  double lambda2 = 0.0;
  double lambda_n = 0.0;
  double delta_min = 0.0;
  double delta_max = 0.0;
  std::vector<EstimateEvent> estimates;
};

/// Samples at t_1 = 0, t_{k+1} = t_k + delta_k while t_k <= horizon.
/// delta_k stays at delta0 until the first attack completion; after each
/// completion it is recomputed from the estimates and used from the first
/// sample at or after that completion.
[[nodiscard]] MasTrace run(const MasScenario& scenario);

}  // namespace dosest::consensus
