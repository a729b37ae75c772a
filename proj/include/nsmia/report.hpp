#ifndef NSMIA_REPORT_HPP
#define NSMIA_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nsmia/montecarlo.hpp"

namespace nsmia::report {

inline constexpr const char* kVersion = "0.1.0";

/// Header plus string cells, exactly what goes into a CSV file.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const Table&) const = default;
};

/// Shortest decimal that parses back to the same double; "inf", "-inf",
/// "nan" for non-finite values.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);  // empty when absent
/// Fixed `decimals` places (used for --paper-rounding).
std::string format_fixed(double v, int decimals);
double parse_number(std::string_view cell);

/// Convergence (table1 / convergence) rows.
Table convergence_table(const std::vector<mc::ProbabilityRow>& rows, std::uint64_t seed, bool paper_rounding);
/// Ddm (table2 / ddm) rows.
Table ddm_table(const std::vector<mc::ProbabilityRow>& rows, std::uint64_t seed, bool paper_rounding);
/// Header: M,K,N,sir_exact_db,sir_estimated_db,sir_lower_bound_db,trials,seed
Table sir_table(const std::vector<mc::SirCurvePoint>& rows, std::uint64_t seed);
/// Per M: both alpha thresholds and both user limits.
Table thresholds_table(const std::vector<int>& m_list);

/// UTF-8, comma separated, '\n' line ends, header first.
std::string emit_csv(const Table& table);
/// Inverse of emit_csv. Throws std::invalid_argument on ragged rows.
Table parse_csv(std::string_view text);

/// JSON rows at full precision. Non-finite numbers become the strings
/// "inf" / "-inf" / "nan"; absent optionals become null.
nlohmann::json probability_rows_json(const std::vector<mc::ProbabilityRow>& rows, bool ddm);
nlohmann::json sir_rows_json(const std::vector<mc::SirCurvePoint>& rows);
nlohmann::json thresholds_rows_json(const std::vector<int>& m_list);

}  // namespace nsmia::report

#endif  // NSMIA_REPORT_HPP
