#ifndef NSMIA_MONTECARLO_HPP
#define NSMIA_MONTECARLO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsmia/channel.hpp"
#include "nsmia/rng.hpp"

namespace nsmia::mc {

enum class ExperimentKind { Convergence, Ddm, Sir, BoundComparison };

const char* to_string(ExperimentKind kind);

struct ExperimentSpec {
  int m = 128;
  std::vector<int> k_list;
  std::vector<int> n_list;  // Sir / BoundComparison only, each in 1..8
  std::int64_t trials = 10000;
  std::uint64_t base_seed = 0;
  ExperimentKind kind = ExperimentKind::Convergence;
  int workers = 1;               // <= 0: one per hardware thread
  double work_budget = 2e12;     // cap on trials * M * sum(K)
};

/// Counts with a 95% Wilson score interval.
struct ProbabilityEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  static ProbabilityEstimate wilson(std::int64_t successes, std::int64_t trials);
};

/// One (M, K) row of a Convergence or Ddm experiment.
///   Convergence: primary = rho(I - D^{-1}G) < 1, secondary = lambda_max(G) < 2M.
///   Ddm:         primary = strict row dominance of G, secondary = all Delta_i < 1.
struct ProbabilityRow {
  int m = 0;
  int k = 0;
  ProbabilityEstimate primary;
  ProbabilityEstimate secondary;
  std::int64_t agreement = 0;     // trials where both conditions gave the same verdict
  std::optional<double> mean_max_delta;  // Ddm only
};

struct SirCurvePoint {
  int m = 0;
  int k = 0;
  int n = 0;
  std::int64_t trials = 0;
  double epsilon_exact = 0.0;         // Monte Carlo mean of ||Z^N||_F^2
  double epsilon_exact_stderr = 0.0;
  double sir_exact_db = 0.0;          // +inf when epsilon_exact == 0 (K = 1)
  std::optional<double> epsilon_estimated;   // published closed form, N <= 4
  std::optional<double> sir_estimated_db;
  std::optional<double> epsilon_expansion;   // walk-expansion closed form, N <= 4
  std::optional<double> sir_expansion_db;
  std::optional<double> epsilon_bound;       // loose upper bound, M > 4
  std::optional<double> sir_lower_bound_db;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<ProbabilityRow> probability_rows;
  std::vector<SirCurvePoint> sir_rows;
  double wall_seconds = 0.0;
};

struct ConvergenceOutcome {
  bool exact_ok;
  bool approx_ok;
};

struct DdmOutcome {
  bool strict_ddm;
  bool delta_ok;
  double max_delta;
};

/// Stream for trial `trial` of configuration (M, K). Independent of the
/// experiment kind, so Convergence and Ddm runs at one (M, K) see the same
/// channels.
Stream trial_stream(std::uint64_t seed, int m, int k, std::int64_t trial);

ConvergenceOutcome convergence_check(const GramMatrix<double>& g, int m);
DdmOutcome ddm_check(const GramMatrix<double>& g);

ConvergenceOutcome convergence_trial(int m, int k, Stream& stream);
DdmOutcome ddm_trial(int m, int k, Stream& stream);
/// ||Z^N||_F^2 for one sampled channel.
double sir_trial(int m, int k, int n, Stream& stream);

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every configuration of `spec`. Output depends only on the spec
/// (workers and scheduling do not change a single bit); wall_seconds aside.
/// Throws BudgetError before doing any work if the spec exceeds work_budget.
ExperimentReport run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});

/// Exact (Monte Carlo), estimated and bound-derived SIR for every (K, N).
std::vector<SirCurvePoint> bound_comparison(int m, const std::vector<int>& k_list, const std::vector<int>& n_list,
                                            std::int64_t trials, std::uint64_t seed, int workers = 1);

}  // namespace nsmia::mc

#endif  // NSMIA_MONTECARLO_HPP
