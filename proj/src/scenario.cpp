#include "dosest/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "dosest/consensus.hpp"
#include "dosest/impulsive.hpp"

namespace dosest {

ScenarioError::ScenarioError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string_view to_string(ControllerKind kind) noexcept {
  switch (kind) {
    case ControllerKind::None: return "none";
    case ControllerKind::Consensus: return "consensus";
    case ControllerKind::Impulsive: return "impulsive";
  }
  return "?";
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

namespace {

constexpr std::array kKnownKeys = {
    "name",
    "sequence.kind", "sequence.intervals", "sequence.prologue", "sequence.start", "sequence.period",
    "sequence.pattern",
    "estimator.theta", "estimator.ell", "estimator.epsilon0", "estimator.unsafe_unit_theta",
    "controller.kind",
    "consensus.topology", "consensus.agents", "consensus.x0", "consensus.x0_sum", "consensus.delta0",
    "consensus.gamma1",
    "impulsive.a", "impulsive.jump_gain", "impulsive.mu", "impulsive.beta", "impulsive.gamma3", "impulsive.x0",
    "impulsive.integrator_step",
    "run.horizon", "run.seed", "run.outputs", "run.settle_threshold",
    "sweep.parameter", "sweep.values",
};

constexpr std::array kOutputs = {"estimates", "trace", "summary", "plotdata"};

bool known_key(std::string_view key) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  if (trim(s).empty()) return parts;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  const Entry& require(const std::string& key) {
    if (const Entry* e = find(key)) return *e;
    throw MissingKeyError("missing required key '" + key + "'", 0);
  }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  /// Keys present in the text but not consumed by the active sections.
  void reject_unused(const std::string& context) const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) {
        throw InvalidValueError("key '" + key + "' does not apply to " + context, entry.line);
      }
    }
  }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

[[noreturn]] void bad_value(const std::string& key, const Entry& e, const std::string& why) {
  throw InvalidValueError(key + " = '" + e.value + "': " + why, e.line);
}

double to_double(std::string_view text, const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) bad_value(key, e, "not a number");
  return v;
}

double number(Reader& r, const std::string& key) {
  const Entry& e = r.require(key);
  return to_double(e.value, key, e);
}

std::optional<double> optional_number(Reader& r, const std::string& key) {
  const Entry* e = r.find(key);
  if (!e) return std::nullopt;
  return to_double(e->value, key, *e);
}

std::int64_t integer(const Entry& e, const std::string& key) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (e.value.empty() || ec != std::errc() || ptr != e.value.data() + e.value.size()) {
    bad_value(key, e, "not an integer");
  }
  return v;
}

Vector vector_of(const Entry& e, const std::string& key) {
  Vector out;
  for (auto part : split(e.value, ',')) out.push_back(to_double(part, key, e));
  return out;
}

std::vector<DoSInterval> intervals_of(const Entry& e, const std::string& key) {
  std::vector<DoSInterval> out;
  for (auto part : split(e.value, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) bad_value(key, e, "intervals are written h:tau");
    out.push_back({to_double(trim(part.substr(0, colon)), key, e), to_double(trim(part.substr(colon + 1)), key, e)});
  }
  return out;
}

Matrix matrix_of(const Entry& e, const std::string& key) {
  std::vector<Vector> rows;
  for (auto row : split(e.value, ';')) {
    Vector r;
    for (auto part : split(row, ',')) r.push_back(to_double(part, key, e));
    rows.push_back(std::move(r));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const std::invalid_argument& ex) {
    bad_value(key, e, ex.what());
  }
}

bool boolean(const Entry& e, const std::string& key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  bad_value(key, e, "expected true or false");
}

std::map<std::string, Entry> tokenize(std::string_view text) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InvalidValueError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    if (!known_key(key)) throw UnknownKeyError("unknown key '" + key + "'", line_no);
    if (entries.count(key)) throw InvalidValueError("duplicate key '" + key + "'", line_no);
    entries[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
  }
  return entries;
}

DoSSequence parse_sequence(Reader& r) {
  const Entry* kind = r.find("sequence.kind");
  if (!kind) throw MissingKeyError("missing sequence (no 'sequence.kind')", 0);
  try {
    if (kind->value == "finite") {
      const Entry& iv = r.require("sequence.intervals");
      auto list = intervals_of(iv, "sequence.intervals");
      try {
        return DoSSequence::finite(std::move(list));
      } catch (const std::invalid_argument& ex) {
        bad_value("sequence.intervals", iv, ex.what());
      }
    }
    if (kind->value == "periodic") {
      std::vector<DoSInterval> prologue;
      if (const Entry* p = r.find("sequence.prologue")) prologue = intervals_of(*p, "sequence.prologue");
      const double start = number(r, "sequence.start");
      const double period = number(r, "sequence.period");
      const Entry& pat = r.require("sequence.pattern");
      auto pattern = intervals_of(pat, "sequence.pattern");
      try {
        return DoSSequence::eventually_periodic(std::move(prologue), start, period, std::move(pattern));
      } catch (const std::invalid_argument& ex) {
        bad_value("sequence.pattern", pat, ex.what());
      }
    }
  } catch (const MissingKeyError& ex) {
    throw MissingKeyError(std::string(ex.what()) + " for sequence.kind = " + kind->value, 0);
  }
  bad_value("sequence.kind", *kind, "expected finite or periodic");
}

EstimatorConfig parse_estimator(Reader& r) {
  EstimatorConfig c;
  if (const Entry* e = r.find("estimator.unsafe_unit_theta")) c.unsafe_unit_theta = boolean(*e, "estimator.unsafe_unit_theta");

  const Entry& theta = r.require("estimator.theta");
  c.theta = to_double(theta.value, "estimator.theta", theta);
  if (!(c.theta > 0.0 && c.theta < 1.0) && !(c.theta == 1.0 && c.unsafe_unit_theta)) {
    bad_value("estimator.theta", theta, "theta must satisfy 0 < theta < 1 (theta = 1 never certifies a duration bound)");
  }
  const Entry& eps = r.require("estimator.epsilon0");
  c.epsilon0 = to_double(eps.value, "estimator.epsilon0", eps);
  if (!(c.epsilon0 > 0.0 && c.epsilon0 < 1.0)) bad_value("estimator.epsilon0", eps, "must satisfy 0 < epsilon0 < 1");
  const Entry& ell = r.require("estimator.ell");
  const auto ell_value = integer(ell, "estimator.ell");
  if (ell_value < 2 || ell_value > 1'000'000) bad_value("estimator.ell", ell, "must be an integer >= 2");
  c.ell = static_cast<int>(ell_value);
  c.validate();
  return c;
}

ConsensusSpec parse_consensus(Reader& r) {
  ConsensusSpec s;
  const Entry& topo = r.require("consensus.topology");
  s.topology = topo.value;
  const Entry& agents = r.require("consensus.agents");
  const auto n = integer(agents, "consensus.agents");
  if (n < 2 || n > 10'000) bad_value("consensus.agents", agents, "must be between 2 and 10000");
  s.agents = static_cast<int>(n);

  consensus::Graph graph = consensus::Graph::path(2);
  try {
    if (s.topology == "ring") {
      graph = consensus::Graph::ring(static_cast<std::size_t>(n));
    } else if (s.topology == "path") {
      graph = consensus::Graph::path(static_cast<std::size_t>(n));
    } else if (s.topology == "complete") {
      graph = consensus::Graph::complete(static_cast<std::size_t>(n));
    } else {
      bad_value("consensus.topology", topo, "expected ring, path or complete");
    }
  } catch (const std::invalid_argument& ex) {
    bad_value("consensus.topology", topo, ex.what());
  }

  const Entry& x0 = r.require("consensus.x0");
  if (x0.value == "random") {
    s.x0_sum = number(r, "consensus.x0_sum");
    if (std::abs(s.x0_sum) > 10.0 * static_cast<double>(n)) {
      throw InvalidValueError("consensus.x0_sum is unreachable with states in [-10, 10]", r.line_of("consensus.x0_sum"));
    }
  } else {
    s.x0 = vector_of(x0, "consensus.x0");
    if (s.x0->size() != static_cast<std::size_t>(n)) {
      bad_value("consensus.x0", x0, "expected " + std::to_string(n) + " values or 'random'");
    }
  }

  const Entry& d0 = r.require("consensus.delta0");
  s.delta0 = to_double(d0.value, "consensus.delta0", d0);
  const auto spec = consensus::lambda_extremes(consensus::laplacian(graph));
  if (!(s.delta0 > 0.0) || !consensus::admissible(s.delta0, spec.lambda_n)) {
    bad_value("consensus.delta0", d0, "needs |1 - delta0 * lambda_N| < 1, i.e. 0 < delta0 < " +
                                          format_double(2.0 / spec.lambda_n));
  }
  const Entry& g1 = r.require("consensus.gamma1");
  s.gamma1 = to_double(g1.value, "consensus.gamma1", g1);
  if (!(s.gamma1 > 1.0)) bad_value("consensus.gamma1", g1, "must exceed 1");
  return s;
}

ImpulsiveSpec parse_impulsive(Reader& r, std::uint64_t seed) {
  ImpulsiveSpec s;
  const Entry& a = r.require("impulsive.a");
  s.a = matrix_of(a, "impulsive.a");
  if (s.a.empty() || !s.a.square()) bad_value("impulsive.a", a, "must be a non-empty square matrix");

  const Entry& x0 = r.require("impulsive.x0");
  s.x0 = vector_of(x0, "impulsive.x0");
  if (s.x0.size() != s.a.rows()) bad_value("impulsive.x0", x0, "dimension does not match impulsive.a");

  const Entry& mu = r.require("impulsive.mu");
  s.mu = to_double(mu.value, "impulsive.mu", mu);
  if (!(s.mu > 0.0 && s.mu < 1.0)) bad_value("impulsive.mu", mu, "must lie in (0, 1)");
  const Entry& g3 = r.require("impulsive.gamma3");
  s.gamma3 = to_double(g3.value, "impulsive.gamma3", g3);
  if (!(s.gamma3 > 1.0)) bad_value("impulsive.gamma3", g3, "must exceed 1");
  const Entry& gain = r.require("impulsive.jump_gain");
  s.jump_gain = to_double(gain.value, "impulsive.jump_gain", gain);

  if (const Entry* b = r.find("impulsive.beta"); b && b->value != "auto") {
    s.beta = to_double(b->value, "impulsive.beta", *b);
    if (!(*s.beta > 0.0)) bad_value("impulsive.beta", *b, "must be positive");
  }
  if (auto step = optional_number(r, "impulsive.integrator_step")) {
    if (!(*step > 0.0)) throw InvalidValueError("impulsive.integrator_step must be positive", r.line_of("impulsive.integrator_step"));
    s.integrator_step = *step;
  }

  const double beta = s.beta.value_or(impulsive::beta_from_linear(s.a));
  if (!(beta > 0.0)) bad_value("impulsive.a", a, "flow bound beta is zero; nothing to stabilize");
  Rng rng(seed);
  try {
    impulsive::validate_plant(impulsive::Plant::linear(s.a, s.jump_gain, beta, s.mu), rng);
  } catch (const std::invalid_argument& ex) {
    bad_value("impulsive.jump_gain", gain, ex.what());
  }
  return s;
}

RunSpec parse_run(Reader& r) {
  RunSpec s;
  const Entry& h = r.require("run.horizon");
  s.horizon = to_double(h.value, "run.horizon", h);
  if (!(s.horizon > 0.0)) bad_value("run.horizon", h, "must be positive");
  if (const Entry* e = r.find("run.seed")) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (e->value.empty() || ec != std::errc() || ptr != e->value.data() + e->value.size()) {
      bad_value("run.seed", *e, "not an unsigned integer");
    }
    s.seed = v;
  }
  if (const Entry* e = r.find("run.outputs")) {
    s.outputs.clear();
    for (auto part : split(e->value, ',')) {
      if (std::find(kOutputs.begin(), kOutputs.end(), part) == kOutputs.end()) {
        bad_value("run.outputs", *e, "unknown output '" + std::string(part) + "'");
      }
      s.outputs.emplace_back(part);
    }
  }
  if (auto th = optional_number(r, "run.settle_threshold")) {
    if (!(*th > 0.0)) throw InvalidValueError("run.settle_threshold must be positive", r.line_of("run.settle_threshold"));
    s.settle_threshold = *th;
  }
  return s;
}

std::optional<SweepSpec> parse_sweep(Reader& r) {
  const Entry* p = r.find("sweep.parameter");
  const Entry* v = r.find("sweep.values");
  if (!p && !v) return std::nullopt;
  if (!p) throw MissingKeyError("sweep.values given without sweep.parameter", 0);
  if (!v) throw MissingKeyError("sweep.parameter given without sweep.values", 0);
  if (!known_key(p->value) || p->value == "name" || p->value.rfind("sweep.", 0) == 0) {
    bad_value("sweep.parameter", *p, "not a sweepable key");
  }
  SweepSpec s;
  s.parameter = p->value;
  for (auto part : split(v->value, ',')) s.values.emplace_back(part);
  if (s.values.empty()) bad_value("sweep.values", *v, "needs at least one value");
  return s;
}

bool valid_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string join_intervals(const std::vector<DoSInterval>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ", ";
    out += format_double(list[i].h) + ":" + format_double(list[i].tau);
  }
  return out;
}

std::string join_vector(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, const Overrides& overrides) {
  auto entries = tokenize(text);
  for (const auto& [key, value] : overrides) {
    if (!known_key(key)) throw UnknownKeyError("unknown override key '" + key + "'", 0);
    entries[key] = Entry{value, 0};
  }
  Reader r(std::move(entries));

  ScenarioConfig c;
  c.sequence = parse_sequence(r);
  const Entry& name = r.require("name");
  if (!valid_name(name.value)) bad_value("name", name, "use letters, digits, '_', '-' or '.'");
  c.name = name.value;
  c.estimator = parse_estimator(r);
  c.run = parse_run(r);

  std::string context = "controller.kind = none";
  if (const Entry* kind = r.find("controller.kind")) {
    if (kind->value == "none") {
      c.controller = ControllerKind::None;
    } else if (kind->value == "consensus") {
      c.controller = ControllerKind::Consensus;
    } else if (kind->value == "impulsive") {
      c.controller = ControllerKind::Impulsive;
    } else {
      bad_value("controller.kind", *kind, "expected none, consensus or impulsive");
    }
    context = "controller.kind = " + kind->value;
  }
  if (c.controller == ControllerKind::Consensus) c.consensus = parse_consensus(r);
  if (c.controller == ControllerKind::Impulsive) c.impulsive = parse_impulsive(r, c.run.seed);
  c.sweep = parse_sweep(r);

  r.reject_unused(context + " and sequence.kind = " +
                  std::string(c.sequence.as_finite() ? "finite" : "periodic"));
  return c;
}

std::string print_scenario(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "name = " << c.name << "\n\n";
  if (const auto* f = c.sequence.as_finite()) {
    o << "sequence.kind = finite\n";
    o << "sequence.intervals = " << join_intervals(f->intervals) << "\n";
  } else if (const auto* p = c.sequence.as_periodic()) {
    o << "sequence.kind = periodic\n";
    if (!p->prologue.empty()) o << "sequence.prologue = " << join_intervals(p->prologue) << "\n";
    o << "sequence.start = " << format_double(p->start) << "\n";
    o << "sequence.period = " << format_double(p->period) << "\n";
    o << "sequence.pattern = " << join_intervals(p->pattern) << "\n";
  } else {
    throw std::invalid_argument("generator sequences have no scenario text");
  }

  o << "\nestimator.theta = " << format_double(c.estimator.theta) << "\n";
  o << "estimator.ell = " << c.estimator.ell << "\n";
  o << "estimator.epsilon0 = " << format_double(c.estimator.epsilon0) << "\n";
  if (c.estimator.unsafe_unit_theta) o << "estimator.unsafe_unit_theta = true\n";

  o << "\ncontroller.kind = " << to_string(c.controller) << "\n";
  if (c.controller == ControllerKind::Consensus) {
    const auto& s = c.consensus;
    o << "consensus.topology = " << s.topology << "\n";
    o << "consensus.agents = " << s.agents << "\n";
    if (s.x0) {
      o << "consensus.x0 = " << join_vector(*s.x0) << "\n";
    } else {
      o << "consensus.x0 = random\n";
      o << "consensus.x0_sum = " << format_double(s.x0_sum) << "\n";
    }
    o << "consensus.delta0 = " << format_double(s.delta0) << "\n";
    o << "consensus.gamma1 = " << format_double(s.gamma1) << "\n";
  } else if (c.controller == ControllerKind::Impulsive) {
    const auto& s = c.impulsive;
    std::string rows;
    for (const auto& row : s.a.to_rows()) {
      if (!rows.empty()) rows += "; ";
      rows += join_vector(row);
    }
    o << "impulsive.a = " << rows << "\n";
    o << "impulsive.jump_gain = " << format_double(s.jump_gain) << "\n";
    o << "impulsive.mu = " << format_double(s.mu) << "\n";
    o << "impulsive.beta = " << (s.beta ? format_double(*s.beta) : std::string("auto")) << "\n";
    o << "impulsive.gamma3 = " << format_double(s.gamma3) << "\n";
    o << "impulsive.x0 = " << join_vector(s.x0) << "\n";
    o << "impulsive.integrator_step = " << format_double(s.integrator_step) << "\n";
  }

  o << "\nrun.horizon = " << format_double(c.run.horizon) << "\n";
  o << "run.seed = " << c.run.seed << "\n";
  std::string outs;
  for (const auto& s : c.run.outputs) outs += (outs.empty() ? "" : ", ") + s;
  o << "run.outputs = " << outs << "\n";
  o << "run.settle_threshold = " << format_double(c.run.settle_threshold) << "\n";

  if (c.sweep) {
    std::string values;
    for (const auto& v : c.sweep->values) values += (values.empty() ? "" : ", ") + v;
    o << "\nsweep.parameter = " << c.sweep->parameter << "\n";
    o << "sweep.values = " << values << "\n";
  }
  return o.str();
}

std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& config) {
  if (!config.sweep) return {config};
  ScenarioConfig base = config;
  base.sweep.reset();
  const std::string text = print_scenario(base);
  const auto& key = config.sweep->parameter;
  const std::string tail = key.substr(key.rfind('.') + 1);

  std::vector<ScenarioConfig> out;
  for (const auto& value : config.sweep->values) {
    try {
      ScenarioConfig variant = parse_scenario(text, {{key, value}});
      variant.name = config.name + "_" + tail + "_" + value;
      out.push_back(std::move(variant));
    } catch (const ScenarioError& ex) {
      throw InvalidValueError("sweep value '" + value + "' for " + key + ": " + ex.what(), 0);
    }
  }
  return out;
}

}  // namespace dosest
