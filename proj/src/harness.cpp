#include "dosest/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>

#include <json.hpp>

namespace dosest {

namespace {

using nlohmann::json;

std::optional<double> reliability_time(const std::vector<EstimateEvent>& log, const DoSSequence& seq,
                                       double horizon) {
  std::optional<double> since;
  double last_bd = -1.0;
  double last_bf = -1.0;
  bool last_ok = false;
  for (const auto& e : log) {
    if (e.bd_hat != last_bd || e.bf_hat != last_bf) {
      last_ok = verify_duration_bound(seq, e.bd_hat, horizon).holds &&
                verify_frequency_bound(seq, e.bf_hat, horizon).holds;
      last_bd = e.bd_hat;
      last_bf = e.bf_hat;
    }
    if (!last_ok) {
      since.reset();
    } else if (!since) {
      since = e.t;
    }
  }
  return since;
}

template <class Samples, class NormOf>
void settle_and_peak(const Samples& samples, double threshold, NormOf norm_of, RunSummary& s) {
  double peak = 0.0;
  std::optional<double> settled;
  for (const auto& sample : samples) {
    const double v = norm_of(sample);
    peak = std::max(peak, v);
    if (v >= threshold) {
      settled.reset();
    } else if (!settled) {
      settled = sample.t;
    }
  }
  s.peak_state_norm = peak;
  s.settling_time = settled;
}

}  // namespace

consensus::MasScenario make_mas_scenario(const ScenarioConfig& c) {
  const auto& spec = c.consensus;
  const auto n = static_cast<std::size_t>(spec.agents);
  consensus::MasScenario m;
  if (spec.topology == "ring") {
    m.graph = consensus::Graph::ring(n);
  } else if (spec.topology == "path") {
    m.graph = consensus::Graph::path(n);
  } else {
    m.graph = consensus::Graph::complete(n);
  }
  if (spec.x0) {
    m.x0 = *spec.x0;
  } else {
    Rng rng(c.run.seed);
    m.x0 = consensus::random_initial_state(n, -10.0, 10.0, spec.x0_sum, rng);
  }
  m.delta0 = spec.delta0;
  m.gamma1 = spec.gamma1;
  m.estimator = c.estimator;
  m.seq = c.sequence;
  m.horizon = c.run.horizon;
  return m;
}

impulsive::ImpulsiveScenario make_impulsive_scenario(const ScenarioConfig& c) {
  const auto& spec = c.impulsive;
  impulsive::ImpulsiveScenario s;
  const double beta = spec.beta.value_or(impulsive::beta_from_linear(spec.a));
  s.plant = impulsive::Plant::linear(spec.a, spec.jump_gain, beta, spec.mu);
  s.x0 = spec.x0;
  s.gamma3 = spec.gamma3;
  s.estimator = c.estimator;
  s.seq = c.sequence;
  s.horizon = c.run.horizon;
  s.integrator_step = spec.integrator_step;
  return s;
}

RunResult run_scenario(const ScenarioConfig& config) {
  try {
    RunResult r;
    r.config = config;
    const double horizon = config.run.horizon;
    const SequenceFeed feed = replay(config.estimator, config.sequence, horizon);
    r.estimates = feed.log();
    r.bd_steps = feed.estimator().bd_steps();
    r.bf_steps = feed.estimator().bf_steps();

    RunSummary& s = r.summary;
    s.name = config.name;
    s.controller = config.controller;
    s.seed = config.run.seed;
    s.horizon = horizon;
    s.final_bd_hat = feed.estimator().bd_hat();
    s.final_bf_hat = feed.estimator().bf_hat();
    s.reliability_time = reliability_time(r.estimates, config.sequence, horizon);

    const double threshold = config.run.settle_threshold;
    if (config.controller == ControllerKind::Consensus) {
      r.mas = consensus::run(make_mas_scenario(config));
      settle_and_peak(r.mas->samples, threshold, [](const consensus::MasSample& m) { return m.e_norm; }, s);
      double peak = 0.0;
      for (const auto& m : r.mas->samples) peak = std::max(peak, norm(m.x));
      s.peak_state_norm = peak;
    } else if (config.controller == ControllerKind::Impulsive) {
      r.impulsive = impulsive::run(make_impulsive_scenario(config));
      settle_and_peak(r.impulsive->events, threshold,
                      [](const impulsive::ImpulsiveEvent& e) { return std::max(norm(e.x_minus), e.v); }, s);
      s.decay = r.impulsive->decay;
    }
    return r;
  } catch (const std::exception& ex) {
    throw RunError(config.name + ": " + ex.what());
  }
}

std::vector<RunResult> run_batch(const std::vector<ScenarioConfig>& configs) {
  std::vector<std::future<RunResult>> jobs;
  jobs.reserve(configs.size());
  for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, [&c] { return run_scenario(c); }));
  std::vector<RunResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

// ------------------------------------------------------------------ writers

void emit_estimates(const std::vector<EstimateEvent>& log, std::ostream& out) {
  out << "t,bd_hat,bf_hat,event_kind\n";
  for (const auto& e : log) {
    out << format_double(e.t) << ',' << format_double(e.bd_hat) << ',' << format_double(e.bf_hat) << ','
        << to_string(e.kind) << '\n';
  }
}

void emit_trace(const consensus::MasTrace& trace, std::ostream& out) {
  out << "t_k,delta_k,denied,e_norm";
  const std::size_t n = trace.samples.empty() ? 0 : trace.samples.front().x.size();
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  out << '\n';
  for (const auto& s : trace.samples) {
    out << format_double(s.t) << ',' << format_double(s.delta) << ',' << (s.denied ? 1 : 0) << ','
        << format_double(s.e_norm);
    for (double v : s.x) out << ',' << format_double(v);
    out << '\n';
  }
}

void emit_trace(const impulsive::ImpulsiveTrace& trace, std::ostream& out) {
  out << "t_k,delta_k,applied,norm_x_minus,norm_x_plus,V,alpha_cum\n";
  for (const auto& e : trace.events) {
    out << format_double(e.t) << ',' << format_double(e.delta) << ',' << (e.applied ? 1 : 0) << ','
        << format_double(norm(e.x_minus)) << ',' << format_double(norm(e.x_plus)) << ',' << format_double(e.v)
        << ',' << e.alpha << '\n';
  }
}

void emit_plotdata(const std::vector<Step>& bd, const std::vector<Step>& bf, double until, std::ostream& out) {
  out << "series,t,value\n";
  auto series = [&](const char* name, const std::vector<Step>& steps) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i > 0) out << name << ',' << format_double(steps[i].t) << ',' << format_double(steps[i - 1].value) << '\n';
      out << name << ',' << format_double(steps[i].t) << ',' << format_double(steps[i].value) << '\n';
    }
    if (!steps.empty() && until > steps.back().t) {
      out << name << ',' << format_double(until) << ',' << format_double(steps.back().value) << '\n';
    }
  };
  series("bd_hat", bd);
  series("bf_hat", bf);
}

void emit_summary(const RunSummary& s, std::ostream& out) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("not reached"); };
  out << "key,value\n";
  out << "name," << s.name << '\n';
  out << "controller," << to_string(s.controller) << '\n';
  out << "horizon," << format_double(s.horizon) << '\n';
  out << "seed," << s.seed << '\n';
  out << "reliability_time," << opt(s.reliability_time) << '\n';
  out << "final_bd_hat," << format_double(s.final_bd_hat) << '\n';
  out << "final_bf_hat," << format_double(s.final_bf_hat) << '\n';
  if (s.controller != ControllerKind::None) {
    out << "settling_time," << opt(s.settling_time) << '\n';
    out << "peak_state_norm," << opt(s.peak_state_norm) << '\n';
  }
  if (s.decay) {
    out << "decay_c0," << format_double(s.decay->c0) << '\n';
    out << "decay_zeta," << format_double(s.decay->zeta) << '\n';
  }
}

namespace {

json to_json(const RunSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["name"] = s.name;
  j["controller"] = std::string(to_string(s.controller));
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  j["reliability_time"] = opt(s.reliability_time);
  j["final_bd_hat"] = s.final_bd_hat;
  j["final_bf_hat"] = s.final_bf_hat;
  j["settling_time"] = opt(s.settling_time);
  j["peak_state_norm"] = opt(s.peak_state_norm);
  if (s.decay) {
    j["decay"] = {{"c0", s.decay->c0}, {"zeta", s.decay->zeta}};
  } else {
    j["decay"] = nullptr;
  }
  return j;
}

}  // namespace

std::string summary_json(const RunSummary& summary) { return to_json(summary).dump(2); }

std::string summaries_json(const std::vector<RunSummary>& summaries) {
  json runs = json::array();
  for (const auto& s : summaries) runs.push_back(to_json(s));
  return json{{"runs", runs}}.dump(2);
}

std::vector<std::filesystem::path> write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& what, const auto& emit) {
    const auto path = dir / (r.config.name + "_" + what + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (out) emit(out);
    out.close();
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  };
  for (const auto& what : r.config.run.outputs) {
    if (what == "estimates") {
      write(what, [&](std::ostream& o) { emit_estimates(r.estimates, o); });
    } else if (what == "trace" && r.mas) {
      write(what, [&](std::ostream& o) { emit_trace(*r.mas, o); });
    } else if (what == "trace" && r.impulsive) {
      write(what, [&](std::ostream& o) { emit_trace(*r.impulsive, o); });
    } else if (what == "plotdata") {
      write(what, [&](std::ostream& o) { emit_plotdata(r.bd_steps, r.bf_steps, r.config.run.horizon, o); });
    } else if (what == "summary") {
      write(what, [&](std::ostream& o) { emit_summary(r.summary, o); });
    }
  }
  return written;
}

}  // namespace dosest
