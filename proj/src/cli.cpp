#include "dosest/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dosest/corpus.hpp"
#include "dosest/harness.hpp"
#include "dosest/scenario.hpp"

namespace dosest {

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "not reached"; }

int run_config(const ScenarioConfig& config, const std::string& out_dir, bool as_json, std::ostream& out,
               std::ostream& err) {
  std::vector<ScenarioConfig> variants;
  try {
    variants = expand_sweep(config);
  } catch (const ScenarioError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitInvalid;
  }

  try {
    const auto results = run_batch(variants);
    const std::filesystem::path dir =
        out_dir.empty() ? std::filesystem::path("out") / config.name : std::filesystem::path(out_dir);
    std::vector<RunSummary> summaries;
    std::size_t files = 0;
    for (const auto& r : results) {
      files += write_outputs(r, dir).size();
      summaries.push_back(r.summary);
    }
    if (as_json) {
      out << summaries_json(summaries) << '\n';
      return kExitOk;
    }
    for (const auto& s : summaries) {
      out << s.name << ": reliability_time=" << opt_text(s.reliability_time)
          << " final_bd_hat=" << format_double(s.final_bd_hat) << " final_bf_hat=" << format_double(s.final_bf_hat);
      if (s.controller != ControllerKind::None) {
        out << " settling_time=" << opt_text(s.settling_time) << " peak_state_norm=" << opt_text(s.peak_state_norm);
      }
      if (s.decay) out << " zeta=" << format_double(s.decay->zeta);
      out << '\n';
    }
    out << "wrote " << files << " files to " << dir.string() << '\n';
    return kExitOk;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
}

/// Reads and parses a scenario file, reporting failures on `err`.
std::optional<ScenarioConfig> load(const std::string& path, std::ostream& err) {
  const auto text = read_file(path);
  if (!text) {
    err << "error: cannot read " << path << '\n';
    return std::nullopt;
  }
  try {
    return parse_scenario(*text);
  } catch (const ScenarioError& ex) {
    err << "error: " << path << ": " << ex.what() << '\n';
    return std::nullopt;
  }
}

nlohmann::json verdict_json(const BoundVerdict& v) {
  return {{"holds", v.holds},
          {"witnessed_offset", v.witnessed_offset},
          {"worst_time", v.worst_time},
          {"conclusive", v.conclusive}};
}

void print_verdict(std::ostream& out, const char* what, double bound, const BoundVerdict& v) {
  out << what << " bound " << format_double(bound) << ": holds=" << (v.holds ? "true" : "false")
      << " witnessed_offset=" << format_double(v.witnessed_offset) << " worst_time=" << format_double(v.worst_time)
      << '\n';
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attack-bound estimation and resilient control experiments", "dosest"};
  app.require_subcommand(1);

  std::string file;
  std::string out_dir;
  std::string corpus_name;
  bool as_json = false;
  double bd = 0.0;
  double bf = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;

  auto* run = app.add_subcommand("run", "Run a scenario file and write its CSV outputs");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory (default out/<name>)");
  run->add_flag("--json", as_json, "Print the run summary as JSON");

  auto* verify = app.add_subcommand("verify", "Check candidate duration/frequency bounds against a scenario's attacks");
  verify->add_option("file", file, "Scenario file")->required();
  verify->add_option("--bd", bd, "Candidate duration bound")->required();
  verify->add_option("--bf", bf, "Candidate frequency bound")->required();
  verify->add_flag("--json", as_json, "Print the verdicts as JSON");

  auto* corpus_cmd = app.add_subcommand("corpus", "Built-in scenarios");
  corpus_cmd->require_subcommand(1);
  auto* corpus_list = corpus_cmd->add_subcommand("list", "List built-in scenarios");
  auto* corpus_run = corpus_cmd->add_subcommand("run", "Run a built-in scenario");
  corpus_run->add_option("name", corpus_name, "Scenario name")->required();
  corpus_run->add_option("--out", out_dir, "Output directory (default out/<name>)");
  corpus_run->add_flag("--json", as_json, "Print the run summary as JSON");

  auto* deadline = app.add_subcommand("deadline", "Time after which the estimates are guaranteed bounds");
  deadline->add_option("file", file, "Scenario file")->required();
  deadline->add_option("--bd", bd, "Lower duration rate b_d")->required();
  deadline->add_option("--kappa", kappa, "Lower duration offset kappa'")->required();
  deadline->add_option("--bf", bf, "Lower frequency rate b_f")->required();
  deadline->add_option("--lambda", lambda, "Lower frequency offset Lambda'")->required();
  deadline->add_flag("--json", as_json, "Print the result as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  if (run->parsed()) {
    const auto config = load(file, err);
    if (!config) return kExitInvalid;
    return run_config(*config, out_dir, as_json, out, err);
  }

  if (corpus_list->parsed()) {
    for (const auto& e : corpus::entries()) out << e.name << '\n';
    return kExitOk;
  }

  if (corpus_run->parsed()) {
    const auto entry = corpus::find(corpus_name);
    if (!entry) {
      err << "error: no built-in scenario named '" << corpus_name << "' (see 'corpus list')\n";
      return kExitInvalid;
    }
    try {
      return run_config(parse_scenario(entry->text), out_dir, as_json, out, err);
    } catch (const ScenarioError& ex) {
      err << "error: " << corpus_name << ": " << ex.what() << '\n';
      return kExitInvalid;
    }
  }

  if (verify->parsed()) {
    const auto config = load(file, err);
    if (!config) return kExitInvalid;
    try {
      const double horizon = config->run.horizon;
      const auto d = verify_duration_bound(config->sequence, bd, horizon);
      const auto f = verify_frequency_bound(config->sequence, bf, horizon);
      if (as_json) {
        out << nlohmann::json{{"duration", verdict_json(d)}, {"frequency", verdict_json(f)}}.dump(2) << '\n';
      } else {
        print_verdict(out, "duration", bd, d);
        print_verdict(out, "frequency", bf, f);
      }
      return kExitOk;
    } catch (const std::invalid_argument& ex) {
      err << "error: " << ex.what() << '\n';
      return kExitInvalid;
    }
  }

  if (deadline->parsed()) {
    const auto config = load(file, err);
    if (!config) return kExitInvalid;
    try {
      const auto& seq = config->sequence;
      const double horizon = config->run.horizon;
      const DeadlineInput input{config->estimator.theta, bd, kappa, bf, lambda,
                                limsup_duration_ratio(seq, horizon), limsup_frequency(seq, horizon)};
      const auto result = reliability_deadline(input, seq, horizon);
      if (as_json) {
        nlohmann::json j{{"immediate", result.immediate}, {"n1", result.n1}, {"deadline", result.time}};
        out << j.dump(2) << '\n';
      } else if (result.immediate) {
        out << "immediate: the estimates are bounds from t = 0\n";
      } else {
        out << "N1 = " << result.n1 << ", deadline = " << format_double(result.time) << '\n';
      }
      return kExitOk;
    } catch (const std::invalid_argument& ex) {
      err << "error: " << ex.what() << '\n';
      return kExitInvalid;
    } catch (const std::exception& ex) {
      err << "error: " << ex.what() << '\n';
      return kExitRuntime;
    }
  }

  err << app.help();
  return kExitInvalid;
}

}  // namespace dosest
