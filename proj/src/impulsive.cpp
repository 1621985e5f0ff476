#include "dosest/impulsive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dosest::impulsive {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(Vector& y, double a, const Vector& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void require_finite(const Vector& x, double t) {
  for (double v : x) {
    if (!std::isfinite(v)) throw std::runtime_error("state diverged during integration near t = " + std::to_string(t));
  }
}

}  // namespace

Plant Plant::linear(Matrix a, double gain, double beta, double mu) {
  if (!a.square() || a.empty()) throw std::invalid_argument("plant matrix must be square and non-empty");
  Plant p;
  p.dim = a.rows();
  p.rhs = std::move(a);
  p.jump = [gain](std::span<const double> x) {
    Vector u(x.begin(), x.end());
    for (double& v : u) v *= gain;
    return u;
  };
  p.beta = beta;
  p.mu = mu;
  return p;
}

Vector Plant::derivative(double t, std::span<const double> x) const {
  if (const auto* a = matrix()) return *a * x;
  return std::get<Rhs>(rhs)(t, x);
}

double beta_from_linear(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("beta needs a square matrix");
  const Vector eig = symmetric_eigenvalues(a.transpose() * a);
  return eig.empty() ? 0.0 : std::sqrt(std::max(0.0, eig.back()));
}

void validate_plant(const Plant& plant, Rng& rng, int samples) {
  if (!(plant.mu > 0.0 && plant.mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1)");
  if (!(plant.beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (plant.dim == 0 || !plant.jump) throw std::invalid_argument("plant needs a dimension and a jump map");
  if (!plant.matrix() && !std::get<Rhs>(plant.rhs)) throw std::invalid_argument("plant needs a right-hand side");

  Vector x(plant.dim);
  for (int s = 0; s < samples; ++s) {
    const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
    for (double& v : x) v = scale * rng.uniform(-1.0, 1.0);
    const double t = rng.uniform(0.0, 10.0);
    const double nx = norm(x);

    const Vector after = jump(plant, x, false);
    if (norm(after) > plant.mu * nx * (1.0 + 1e-9)) {
      throw std::invalid_argument("jump map does not contract |X| by mu = " + std::to_string(plant.mu));
    }
    const Vector f = plant.derivative(t, x);
    if (dot(x, f) > plant.beta * nx * nx * (1.0 + 1e-9)) {
      throw std::invalid_argument("flow grows |X| faster than beta = " + std::to_string(plant.beta));
    }
  }
}

double delta0(double chi, double gamma3, double beta) {
  if (!(chi < 0.0)) throw std::invalid_argument("chi = ln(mu) must be negative");
  if (!(gamma3 > 1.0)) throw std::invalid_argument("gamma3 must exceed 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  return -chi / (gamma3 * beta);
}

double delta_update(double bd_hat, double bf_hat, double chi, double gamma3, double beta) {
  if (!(bd_hat > 0.0 && bd_hat < 1.0)) throw std::invalid_argument("bd_hat must lie in (0, 1)");
  if (!(bf_hat > 0.0)) throw std::invalid_argument("bf_hat must be positive");
  if (!(chi < 0.0)) throw std::invalid_argument("chi = ln(mu) must be negative");
  if (!(gamma3 > 1.0)) throw std::invalid_argument("gamma3 must exceed 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  return chi * (1.0 - bd_hat) / (gamma3 * (bf_hat * chi - beta));
}

Vector rk4(const Rhs& f, std::span<const double> x0, double t0, double delta, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("integrator step must be positive");
  Vector x(x0.begin(), x0.end());
  const auto n = static_cast<std::int64_t>(std::ceil(delta / step - 1e-9));
  Vector tmp(x.size());
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    const double h = std::min(step, delta - static_cast<double>(i) * step);
    if (h <= 0.0) break;
    const Vector k1 = f(t, x);
    tmp = x;
    axpy(tmp, 0.5 * h, k1);
    const Vector k2 = f(t + 0.5 * h, tmp);
    tmp = x;
    axpy(tmp, 0.5 * h, k2);
    const Vector k3 = f(t + 0.5 * h, tmp);
    tmp = x;
    axpy(tmp, h, k3);
    const Vector k4 = f(t + h, tmp);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  require_finite(x, t0 + delta);
  return x;
}

Vector flow(const Plant& plant, std::span<const double> x, double t, double delta, double step) {
  if (!(delta > 0.0)) throw std::invalid_argument("flow interval must be positive");
  if (const auto* a = plant.matrix()) {
    Vector out = expm(delta * *a) * x;
    require_finite(out, t + delta);
    return out;
  }
  return rk4(std::get<Rhs>(plant.rhs), x, t, delta, step);
}

double richardson_ratio(const Plant& plant, std::span<const double> x, double t, double delta, double step) {
  const Rhs f = [&plant](double tt, std::span<const double> xx) { return plant.derivative(tt, xx); };
  const Vector y1 = rk4(f, x, t, delta, step);
  const Vector y2 = rk4(f, x, t, delta, step / 2.0);
  const Vector y4 = rk4(f, x, t, delta, step / 4.0);
  Vector d12(y1.size());
  Vector d24(y1.size());
  for (std::size_t i = 0; i < y1.size(); ++i) {
    d12[i] = y1[i] - y2[i];
    d24[i] = y2[i] - y4[i];
  }
  return norm(d12) / norm(d24);
}

Vector jump(const Plant& plant, std::span<const double> x, bool denied) {
  Vector out(x.begin(), x.end());
  if (denied) return out;
  const Vector u = plant.jump(x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += u[i];
  return out;
}

ImpulsiveTrace run(const ImpulsiveScenario& sc) {
  const Plant& plant = sc.plant;
  if (sc.x0.size() != plant.dim) throw std::invalid_argument("x0 dimension does not match the plant");
  if (!(sc.horizon > 0.0) || !std::isfinite(sc.horizon)) throw std::invalid_argument("horizon must be positive");
  if (!(plant.mu > 0.0 && plant.mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1)");

  ImpulsiveTrace trace;
  trace.chi = std::log(plant.mu);
  trace.delta0 = delta0(trace.chi, sc.gamma3, plant.beta);
  trace.v0 = norm(sc.x0);

  SequenceFeed feed(sc.estimator, sc.seq);
  double delta = trace.delta0;
  trace.delta_min = trace.delta_max = delta;
  std::int64_t applied_completion = 0;
  std::int64_t alpha = 0;

  // exp(A delta) only changes when delta does.
  double cached_delta = -1.0;
  Matrix cached;

  Vector x = sc.x0;
  for (double t = 0.0; t <= sc.horizon; t += delta) {
    feed.advance_to(t);
    if (const auto& c = feed.last_completion(); c && c->index != applied_completion) {
      delta = delta_update(c->bd_hat, c->bf_hat, trace.chi, sc.gamma3, plant.beta);
      applied_completion = c->index;
      trace.delta_min = std::min(trace.delta_min, delta);
      trace.delta_max = std::max(trace.delta_max, delta);
    }
    const bool denied = contains(sc.seq, t);
    Vector plus = jump(plant, x, denied);
    if (!denied) ++alpha;
    const double v = norm(plus);
    trace.events.push_back({t, delta, !denied, x, plus, v, alpha});

    if (const auto* a = plant.matrix()) {
      if (delta != cached_delta) {
        cached = expm(delta * *a);
        cached_delta = delta;
      }
      x = cached * plus;
      require_finite(x, t + delta);
    } else {
      x = flow(plant, plus, t, delta, sc.integrator_step);
    }
  }

  trace.decay = fit_decay(trace.events, trace.v0);
  trace.estimates = feed.log();
  return trace;
}

std::optional<DecayFit> fit_decay(const std::vector<ImpulsiveEvent>& events, double v0) {
  if (!(v0 > 0.0)) return std::nullopt;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = events.size() / 2; i < events.size(); ++i) {
    if (events[i].v > 0.0) pts.emplace_back(events[i].t, std::log(events[i].v));
  }
  if (pts.size() < 2) return std::nullopt;

  double mt = 0.0;
  double my = 0.0;
  for (const auto& [t, y] : pts) {
    mt += t;
    my += y;
  }
  mt /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double stt = 0.0;
  double sty = 0.0;
  for (const auto& [t, y] : pts) {
    stt += (t - mt) * (t - mt);
    sty += (t - mt) * (y - my);
  }
  if (stt == 0.0) return std::nullopt;
  const double slope = sty / stt;
  const double intercept = my - slope * mt;
  return DecayFit{std::exp(intercept) / v0, -slope};
}

bool audit_lyapunov(const ImpulsiveTrace& trace, double mu, double beta) {
  if (trace.events.empty() || trace.v0 == 0.0) {
    return std::all_of(trace.events.begin(), trace.events.end(), [](const auto& e) { return e.v == 0.0; });
  }
  const double log_mu = std::log(mu);
  const double log_v0 = std::log(trace.v0);
  auto within = [&](double v, std::int64_t alpha, double t) {
    if (v == 0.0) return true;
    const double bound = log_v0 + static_cast<double>(alpha) * log_mu + beta * t;
    return std::log(v) <= bound + 1e-9 * std::max(1.0, std::abs(bound));
  };
  for (const auto& e : trace.events) {
    const std::int64_t before = e.alpha - (e.applied ? 1 : 0);
    if (!within(norm(e.x_minus), before, e.t) || !within(e.v, e.alpha, e.t)) return false;
  }
  return true;
}

bool audit_impulse_count(const ImpulsiveTrace& trace, const DoSSequence& seq, const AttackBounds& b,
                         double delta_bar, double t_check_from, double horizon) {
  if (!(delta_bar > 0.0)) throw std::invalid_argument("delta_bar must be positive");
  const auto dur = verify_duration_bound(seq, b.b_d, horizon);
  if (!dur.holds || dur.witnessed_offset > b.kappa + 1e-12) {
    throw std::invalid_argument("(B_d, kappa) is not a verified duration bound of the sequence");
  }
  const auto freq = verify_frequency_bound(seq, b.b_f, horizon);
  if (!freq.holds || freq.witnessed_offset > b.lambda + 1e-12) {
    throw std::invalid_argument("(B_f, Lambda) is not a verified frequency bound of the sequence");
  }

  const auto& ev = trace.events;
  auto first = std::find_if(ev.begin(), ev.end(), [&](const auto& e) { return e.t >= t_check_from; });
  if (first == ev.end()) return true;
  const double tk = first->t;
  const double c1 = (tk + b.kappa) / delta_bar + 1.0 + b.lambda;
  const double slope = (1.0 - b.b_d - delta_bar * b.b_f) / delta_bar;

  for (auto it = first; it != ev.end(); ++it) {
    if (it->delta > delta_bar * (1.0 + 1e-12)) {
      throw std::invalid_argument("control interval " + std::to_string(it->delta) + " at t = " +
                                  std::to_string(it->t) + " exceeds delta_bar");
    }
    // alpha is constant until the next instant, where the right-hand side peaks.
    const double alpha = static_cast<double>(it->alpha);
    const auto next = std::next(it);
    const double t_end = next != ev.end() ? next->t : it->t;
    if (alpha < slope * it->t - c1 || alpha < slope * t_end - c1) return false;
  }
  return true;
}

double decay_rate_bound(double b_d, double b_f, double delta_bar, double chi, double beta) {
  if (!(delta_bar > 0.0)) throw std::invalid_argument("delta_bar must be positive");
  return (delta_bar * (beta - b_f * chi) + chi * (1.0 - b_d)) / delta_bar;
}

}  // namespace dosest::impulsive
