#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "dosest/dos_model.hpp"
#include "dosest/estimator.hpp"
#include "dosest/linalg.hpp"
#include "dosest/rng.hpp"

namespace dosest::impulsive {

using Rhs = std::function<Vector(double t, std::span<const double> x)>;
using JumpMap = std::function<Vector(std::span<const double> x)>;

/// Continuous dynamics X' = f(t, X) with impulses X+ = X + U(X), analysed
/// with V = |X|: V grows at most like exp(beta t) between impulses and
/// shrinks by mu at each applied impulse.
struct Plant {
  std::size_t dim = 0;
  std::variant<Matrix, Rhs> rhs;
  JumpMap jump;  ///< U(X)
  double beta = 0.0;
  double mu = 0.0;

  /// f(t, X) = A X and U(X) = gain X.
  static Plant linear(Matrix a, double gain, double beta, double mu);

  [[nodiscard]] const Matrix* matrix() const noexcept { return std::get_if<Matrix>(&rhs); }
  [[nodiscard]] Vector derivative(double t, std::span<const double> x) const;
};

/// Spectral norm sqrt(lambda_max(A^T A)).
[[nodiscard]] double beta_from_linear(const Matrix& a);

/// Throws std::invalid_argument unless mu in (0, 1), beta > 0 and, on
/// `samples` random states, |X + U(X)| <= mu |X| and X.f(t, X) <= beta |X|^2.
void validate_plant(const Plant& plant, Rng& rng, int samples = 64);

/// -chi / (gamma3 beta).
[[nodiscard]] double delta0(double chi, double gamma3, double beta);
/// chi (1 - bd_hat) / (gamma3 (bf_hat chi - beta)).
[[nodiscard]] double delta_update(double bd_hat, double bf_hat, double chi, double gamma3, double beta);

/// Classical fixed-step RK4 over [t, t + delta]; the last step is shortened
/// to land on t + delta.
[[nodiscard]] Vector rk4(const Rhs& f, std::span<const double> x, double t, double delta, double step);

/// State after flowing for delta: exp(A delta) X for linear plants, RK4 with
/// `step` otherwise. Throws std::runtime_error if the state stops being finite.
[[nodiscard]] Vector flow(const Plant& plant, std::span<const double> x, double t, double delta, double step);

/// |y(h) - y(h/2)| / |y(h/2) - y(h/4)| for RK4 over one flow segment;
/// close to 16 for smooth right-hand sides.
[[nodiscard]] double richardson_ratio(const Plant& plant, std::span<const double> x, double t, double delta,
                                      double step);

/// X when denied, X + U(X) otherwise.
[[nodiscard]] Vector jump(const Plant& plant, std::span<const double> x, bool denied);

struct ImpulsiveScenario {
  Plant plant;
  Vector x0;
  double gamma3 = 0.0;
  EstimatorConfig estimator;
  DoSSequence seq;
  double horizon = 0.0;
  double integrator_step = 1e-3;
};

struct ImpulsiveEvent {
  double t = 0.0;
  double delta = 0.0;  ///< interval to the next control instant
  bool applied = false;
  Vector x_minus;
  Vector x_plus;
  double v = 0.0;           ///< |x_plus|
  std::int64_t alpha = 0;   ///< applied impulses on [0, t]
};

/// |X(t)| ~ c0 |X0| exp(-zeta t).
struct DecayFit {
  double c0 = 0.0;
  double zeta = 0.0;
};

struct ImpulsiveTrace {
  std::vector<ImpulsiveEvent> events;
  double v0 = 0.0;
  double chi = 0.0;
  double delta0 = 0.0;
  double delta_min = 0.0;
  double delta_max = 0.0;
  std::optional<DecayFit> decay;
  std::vector<EstimateEvent> estimates;
};

/// Control instants t_1 = 0, t_{k+1} = t_k + delta_k while t_k <= horizon.
/// delta_k starts at delta0 and is recomputed at every attack completion,
/// taking effect at the first instant at or after it. An impulse is applied
/// at t_k unless t_k lies in an attack.
[[nodiscard]] ImpulsiveTrace run(const ImpulsiveScenario& scenario);

/// Least squares of ln|X(t_k+)| against t_k over the last half of the
/// events, skipping zero states. nullopt with fewer than two usable points.
[[nodiscard]] std::optional<DecayFit> fit_decay(const std::vector<ImpulsiveEvent>& events, double v0);

/// V(t) <= V(0) mu^alpha(0,t) exp(beta t) before and after every event, with
/// the alpha recorded in the trace.
[[nodiscard]] bool audit_lyapunov(const ImpulsiveTrace& trace, double mu, double beta);

struct AttackBounds {
  double b_d = 0.0;
  double kappa = 0.0;
  double b_f = 0.0;
  double lambda = 0.0;
};

/// alpha(0,t) >= (t / delta_bar)(1 - B_d - delta_bar B_f) - C1 for all t from
/// the first event at or after t_check_from up to the last event, with
/// C1 = (t_k + kappa) / delta_bar + 1 + Lambda. The bounds are verified
/// against `seq` over `horizon` first (std::invalid_argument otherwise), and
/// every interval used after t_check_from must be at most delta_bar.
[[nodiscard]] bool audit_impulse_count(const ImpulsiveTrace& trace, const DoSSequence& seq, const AttackBounds& bounds,
                                       double delta_bar, double t_check_from, double horizon);

/// (delta_bar (beta - B_f chi) + chi (1 - B_d)) / delta_bar; negative means
/// V decays exponentially.
[[nodiscard]] double decay_rate_bound(double b_d, double b_f, double delta_bar, double chi, double beta);

}  // namespace dosest::impulsive
