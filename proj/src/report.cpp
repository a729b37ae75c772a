#include "nsmia/report.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <system_error>

#include "nsmia/analysis.hpp"

namespace nsmia::report {
namespace {

std::string probability_cell(double p, bool paper_rounding) {
  return paper_rounding ? format_fixed(p, 3) : format_number(p);
}

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

nlohmann::json number_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return number_json(*v);
}

nlohmann::json estimate_json(const mc::ProbabilityEstimate& e) {
  return {{"successes", e.successes},
          {"trials", e.trials},
          {"p_hat", e.p_hat},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string format_fixed(double v, int decimals) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

double parse_number(std::string_view cell) {
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw std::invalid_argument("not a number: '" + std::string(cell) + "'");
  }
  return v;
}

Table convergence_table(const std::vector<mc::ProbabilityRow>& rows, std::uint64_t seed, bool paper_rounding) {
  Table t;
  t.header = {"M", "K", "p_exact", "ci_low", "ci_high", "p_approx", "approx_ci_low", "approx_ci_high",
              "agreement", "trials", "seed"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.m), std::to_string(r.k), probability_cell(r.primary.p_hat, paper_rounding),
                      probability_cell(r.primary.ci_low, paper_rounding),
                      probability_cell(r.primary.ci_high, paper_rounding),
                      probability_cell(r.secondary.p_hat, paper_rounding),
                      probability_cell(r.secondary.ci_low, paper_rounding),
                      probability_cell(r.secondary.ci_high, paper_rounding),
                      probability_cell(static_cast<double>(r.agreement) / r.primary.trials, paper_rounding),
                      std::to_string(r.primary.trials), std::to_string(seed)});
  }
  return t;
}

Table ddm_table(const std::vector<mc::ProbabilityRow>& rows, std::uint64_t seed, bool paper_rounding) {
  Table t;
  t.header = {"M", "K", "p_strict", "ci_low", "ci_high", "p_delta", "delta_ci_low", "delta_ci_high",
              "mean_max_delta", "agreement", "trials", "seed"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.m), std::to_string(r.k), probability_cell(r.primary.p_hat, paper_rounding),
                      probability_cell(r.primary.ci_low, paper_rounding),
                      probability_cell(r.primary.ci_high, paper_rounding),
                      probability_cell(r.secondary.p_hat, paper_rounding),
                      probability_cell(r.secondary.ci_low, paper_rounding),
                      probability_cell(r.secondary.ci_high, paper_rounding), format_number(r.mean_max_delta),
                      probability_cell(static_cast<double>(r.agreement) / r.primary.trials, paper_rounding),
                      std::to_string(r.primary.trials), std::to_string(seed)});
  }
  return t;
}

Table sir_table(const std::vector<mc::SirCurvePoint>& rows, std::uint64_t seed) {
  Table t;
  t.header = {"M", "K", "N", "sir_exact_db", "sir_estimated_db", "sir_lower_bound_db", "trials", "seed"};
  for (const auto& p : rows) {
    t.rows.push_back({std::to_string(p.m), std::to_string(p.k), std::to_string(p.n), format_number(p.sir_exact_db),
                      format_number(p.sir_estimated_db), format_number(p.sir_lower_bound_db),
                      std::to_string(p.trials), std::to_string(seed)});
  }
  return t;
}

Table thresholds_table(const std::vector<int>& m_list) {
  Table t;
  t.header = {"M", "convergence_alpha", "ddm_alpha", "max_k_convergence", "max_k_ddm"};
  for (int m : m_list) {
    t.rows.push_back({std::to_string(m), format_number(analysis::convergence_alpha_threshold()),
                      format_number(analysis::ddm_alpha_threshold(m)),
                      std::to_string(analysis::max_users_convergence(m)), std::to_string(analysis::max_users_ddm(m))});
  }
  return t;
}

std::string emit_csv(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

Table parse_csv(std::string_view text) {
  auto split = [](std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  Table t;
  bool first = true;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw std::invalid_argument("CSV row width does not match header");
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw std::invalid_argument("CSV has no header row");
  return t;
}

nlohmann::json probability_rows_json(const std::vector<mc::ProbabilityRow>& rows, bool ddm) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = {{"M", r.m}, {"K", r.k}, {"agreement", r.agreement}};
    row[ddm ? "strict_ddm" : "spectral_radius"] = estimate_json(r.primary);
    row[ddm ? "delta_condition" : "lambda_max_condition"] = estimate_json(r.secondary);
    if (ddm) row["mean_max_delta"] = number_json(r.mean_max_delta);
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json sir_rows_json(const std::vector<mc::SirCurvePoint>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : rows) {
    out.push_back({{"M", p.m},
                   {"K", p.k},
                   {"N", p.n},
                   {"trials", p.trials},
                   {"epsilon_exact", number_json(p.epsilon_exact)},
                   {"epsilon_exact_stderr", number_json(p.epsilon_exact_stderr)},
                   {"sir_exact_db", number_json(p.sir_exact_db)},
                   {"epsilon_estimated", number_json(p.epsilon_estimated)},
                   {"sir_estimated_db", number_json(p.sir_estimated_db)},
                   {"epsilon_expansion", number_json(p.epsilon_expansion)},
                   {"sir_expansion_db", number_json(p.sir_expansion_db)},
                   {"epsilon_bound", number_json(p.epsilon_bound)},
                   {"sir_lower_bound_db", number_json(p.sir_lower_bound_db)}});
  }
  return out;
}

nlohmann::json thresholds_rows_json(const std::vector<int>& m_list) {
  nlohmann::json out = nlohmann::json::array();
  for (int m : m_list) {
    out.push_back({{"M", m},
                   {"convergence_alpha", analysis::convergence_alpha_threshold()},
                   {"ddm_alpha", analysis::ddm_alpha_threshold(m)},
                   {"max_k_convergence", analysis::max_users_convergence(m)},
                   {"max_k_ddm", analysis::max_users_ddm(m)}});
  }
  return out;
}

}  // namespace nsmia::report
