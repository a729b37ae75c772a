#include "nsmia/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <stdexcept>

#include "nsmia/analysis.hpp"
#include "nsmia/montecarlo.hpp"
#include "nsmia/report.hpp"

namespace nsmia::cli {
namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;
  std::string m = "default";
  std::string k = "default";
  std::string n = "1:4";
  std::int64_t trials = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::string format = "csv";
  std::string out = "-";
  bool paper_rounding = false;
  int workers = 0;
  bool quiet = false;
};

int parse_int(std::string_view s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw UsageError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<int> default_m_list(const std::string& command) {
  if (command == "sir" || command == "bound") return {128};
  if (command == "thresholds") return parse_int_list("64:32:512");
  return {64, 128, 256, 512};
}

std::vector<int> resolve_k(const RunConfig& cfg, int m) {
  std::string spec = cfg.k;
  if (cfg.command == "table1" || cfg.command == "table2") spec = "auto";
  if (spec == "default") spec = (cfg.command == "sir" || cfg.command == "bound") ? "2,4,8,16" : "auto";
  if (spec != "auto") return parse_int_list(spec);
  if (cfg.command == "table1" || cfg.command == "convergence") return {analysis::max_users_convergence(m)};
  return {analysis::max_users_ddm(m)};
}

mc::ExperimentKind kind_for(const std::string& command) {
  if (command == "table1" || command == "convergence") return mc::ExperimentKind::Convergence;
  if (command == "table2" || command == "ddm") return mc::ExperimentKind::Ddm;
  if (command == "sir") return mc::ExperimentKind::Sir;
  return mc::ExperimentKind::BoundComparison;
}

struct Output {
  report::Table table;
  nlohmann::json rows = nlohmann::json::array();
  double wall_seconds = 0.0;
};

Output execute(const RunConfig& cfg, const std::vector<int>& m_list, std::ostream& err) {
  Output result;
  if (cfg.command == "thresholds") {
    result.table = report::thresholds_table(m_list);
    result.rows = report::thresholds_rows_json(m_list);
    return result;
  }

  const mc::ExperimentKind kind = kind_for(cfg.command);
  const bool sir_like = kind == mc::ExperimentKind::Sir || kind == mc::ExperimentKind::BoundComparison;
  std::vector<int> n_list;
  if (sir_like) {
    n_list = parse_int_list(cfg.n);
    for (int n : n_list) {
      if (n < 1 || n > 4) throw UsageError("--n: estimated SIR is available for N in 1..4 only");
    }
  }

  std::vector<mc::ProbabilityRow> prob_rows;
  std::vector<mc::SirCurvePoint> sir_rows;
  for (int m : m_list) {
    mc::ExperimentSpec spec;
    spec.m = m;
    spec.k_list = resolve_k(cfg, m);
    spec.n_list = n_list;
    spec.trials = cfg.trials;
    spec.base_seed = cfg.seed;
    spec.kind = kind;
    spec.workers = cfg.workers;
    mc::ProgressFn progress;
    if (!cfg.quiet) progress = [&err](const std::string& msg) { err << "[mia] " << msg << '\n'; };
    const mc::ExperimentReport rep = mc::run_experiment(spec, progress);
    result.wall_seconds += rep.wall_seconds;
    prob_rows.insert(prob_rows.end(), rep.probability_rows.begin(), rep.probability_rows.end());
    sir_rows.insert(sir_rows.end(), rep.sir_rows.begin(), rep.sir_rows.end());
  }

  switch (kind) {
    case mc::ExperimentKind::Convergence:
      result.table = report::convergence_table(prob_rows, cfg.seed, cfg.paper_rounding);
      result.rows = report::probability_rows_json(prob_rows, false);
      break;
    case mc::ExperimentKind::Ddm:
      result.table = report::ddm_table(prob_rows, cfg.seed, cfg.paper_rounding);
      result.rows = report::probability_rows_json(prob_rows, true);
      break;
    default:
      result.table = report::sir_table(sir_rows, cfg.seed);
      result.rows = report::sir_rows_json(sir_rows);
      break;
  }
  return result;
}

std::string render(const RunConfig& cfg, const std::vector<int>& m_list, const Output& result) {
  if (cfg.format == "csv") return report::emit_csv(result.table);
  nlohmann::json doc;
  doc["spec"] = {{"command", cfg.command}, {"M", m_list}, {"K", cfg.k},     {"N", cfg.n},
                 {"trials", cfg.trials},   {"seed", cfg.seed}, {"paper_rounding", cfg.paper_rounding}};
  doc["rows"] = result.rows;
  doc["meta"] = {{"version", report::kVersion},
                 {"seed", cfg.seed},
                 {"wall_time_s", result.wall_seconds},
                 {"workers", cfg.workers}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    if (item.empty()) throw UsageError("empty item in list '" + std::string(text) + "'");
    const std::size_t c1 = item.find(':');
    if (c1 == std::string_view::npos) {
      out.push_back(parse_int(item));
    } else {
      const std::size_t c2 = item.find(':', c1 + 1);
      const int lo = parse_int(item.substr(0, c1));
      int step = 1;
      int hi = 0;
      if (c2 == std::string_view::npos) {
        hi = parse_int(item.substr(c1 + 1));
      } else {
        step = parse_int(item.substr(c1 + 1, c2 - c1 - 1));
        hi = parse_int(item.substr(c2 + 1));
      }
      if (step < 1 || hi < lo) throw UsageError("bad range '" + std::string(item) + "'");
      for (int v = lo; v <= hi; v += step) out.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Neumann-series matrix inversion experiments for massive MIMO zero-forcing", "mia"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "key=value configuration file (flags override it)");
  app.require_subcommand(1, 1);
  app.add_option("--m", cfg.m, "antenna counts: list such as 64,128 or 64:32:512");
  app.add_option("--k", cfg.k, "user counts: list, or 'auto' for the threshold-derived maximum");
  app.add_option("--n", cfg.n, "series lengths for sir/bound (1..4)");
  app.add_option("--trials", cfg.trials, "Monte Carlo trials per configuration")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "base seed");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "output path, '-' for standard output");
  app.add_flag("--paper-rounding", cfg.paper_rounding, "round probabilities to 3 decimals in CSV");
  app.add_option("--workers", cfg.workers, "worker threads, 0 for one per hardware thread");
  app.add_flag("--quiet", cfg.quiet, "no progress on standard error");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"table1", "maximum K and convergence probability for M = 64, 128, 256, 512"},
      {"table2", "maximum K and diagonal-dominance probability for M = 64, 128, 256, 512"},
      {"convergence", "convergence probability (spectral radius and lambda_max conditions)"},
      {"ddm", "diagonal-dominance probability (strict and correlation-based)"},
      {"sir", "exact vs estimated SIR"},
      {"bound", "exact vs estimated SIR and the loose-bound SIR"},
      {"thresholds", "alpha thresholds and maximum K per M"}};
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough()->callback([&cfg, n = std::string(name)] { cfg.command = n; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mia: " << e.what() << '\n';
    return kUsage;
  }

  std::vector<int> m_list;
  Output result;
  try {
    m_list = cfg.m == "default" ? default_m_list(cfg.command) : parse_int_list(cfg.m);
    if (m_list.empty()) throw UsageError("--m is empty");
    result = execute(cfg, m_list, err);
  } catch (const std::exception& e) {
    err << "mia: " << e.what() << '\n';
    return kUsage;
  }

  const std::string text = render(cfg, m_list, result);
  if (cfg.out == "-") {
    out << text;
    out.flush();
    if (!out) {
      err << "mia: failed writing to standard output\n";
      return kIo;
    }
    return kOk;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) {
    err << "mia: cannot open '" << cfg.out << "' for writing\n";
    return kIo;
  }
  file << text;
  file.close();
  if (!file) {
    err << "mia: failed writing '" << cfg.out << "'\n";
    return kIo;
  }
  return kOk;
}

}  // namespace nsmia::cli
