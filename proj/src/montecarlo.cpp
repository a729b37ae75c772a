#include "nsmia/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "nsmia/analysis.hpp"
#include "nsmia/errors.hpp"
#include "nsmia/linalg.hpp"
#include "nsmia/neumann.hpp"

namespace nsmia::mc {
namespace {

constexpr double kWilsonZ = 1.959963984540054;
constexpr int kMaxSirTerms = 8;

// Runs body(i) for i in [0, count) on `workers` threads. Results must be
// written to per-index slots; nothing here depends on scheduling order.
template <typename Body>
void parallel_for(std::int64_t count, int workers, Body&& body) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(count, 1)));
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  constexpr std::int64_t kChunk = 64;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::int64_t begin = next.fetch_add(kChunk);
        if (begin >= count) return;
        const std::int64_t end = std::min(begin + kChunk, count);
        for (std::int64_t i = begin; i < end; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool is_sir_kind(ExperimentKind kind) {
  return kind == ExperimentKind::Sir || kind == ExperimentKind::BoundComparison;
}

void validate(const ExperimentSpec& spec) {
  if (spec.m < 1) throw DimensionError("experiment: M must be positive");
  if (spec.kind == ExperimentKind::BoundComparison && spec.m <= 4) {
    throw DomainError("bound comparison needs M > 4");
  }
  if (spec.k_list.empty()) throw ParameterError("experiment: K list is empty");
  for (int k : spec.k_list) {
    if (k < 1 || k > spec.m) {
      throw DimensionError("experiment: K=" + std::to_string(k) + " outside [1, M=" + std::to_string(spec.m) + "]");
    }
  }
  if (spec.trials < 1) throw ParameterError("experiment: trials must be at least 1");
  if (spec.trials > std::int64_t{1} << 32) throw ParameterError("experiment: at most 2^32 trials per configuration");
  if (is_sir_kind(spec.kind)) {
    if (spec.n_list.empty()) throw ParameterError("experiment: N list is empty");
    for (int n : spec.n_list) {
      if (n < 1 || n > kMaxSirTerms) throw ParameterError("experiment: N must lie in 1..8");
    }
  }
  double work = 0.0;
  for (int k : spec.k_list) work += static_cast<double>(spec.trials) * spec.m * k;
  if (work > spec.work_budget) {
    throw BudgetError("experiment needs " + std::to_string(work) + " work units, budget is " +
                      std::to_string(spec.work_budget));
  }
}

ProbabilityRow run_probability_row(const ExperimentSpec& spec, int k) {
  const auto trials = static_cast<std::size_t>(spec.trials);
  std::vector<std::uint8_t> primary(trials), secondary(trials);
  std::vector<double> max_delta;
  const bool ddm = spec.kind == ExperimentKind::Ddm;
  if (ddm) max_delta.resize(trials);

  parallel_for(spec.trials, spec.workers, [&](std::int64_t t) {
    Stream stream = trial_stream(spec.base_seed, spec.m, k, t);
    const auto i = static_cast<std::size_t>(t);
    if (ddm) {
      const DdmOutcome out = ddm_trial(spec.m, k, stream);
      primary[i] = out.strict_ddm;
      secondary[i] = out.delta_ok;
      max_delta[i] = out.max_delta;
    } else {
      const ConvergenceOutcome out = convergence_trial(spec.m, k, stream);
      primary[i] = out.exact_ok;
      secondary[i] = out.approx_ok;
    }
  });

  std::int64_t ok_primary = 0, ok_secondary = 0, agree = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    ok_primary += primary[i];
    ok_secondary += secondary[i];
    agree += primary[i] == secondary[i];
  }
  ProbabilityRow row;
  row.m = spec.m;
  row.k = k;
  row.primary = ProbabilityEstimate::wilson(ok_primary, spec.trials);
  row.secondary = ProbabilityEstimate::wilson(ok_secondary, spec.trials);
  row.agreement = agree;
  if (ddm) {
    double sum = 0.0;
    for (double v : max_delta) sum += v;
    row.mean_max_delta = sum / static_cast<double>(trials);
  }
  return row;
}

std::vector<SirCurvePoint> run_sir_rows(const ExperimentSpec& spec, int k) {
  const int max_n = *std::max_element(spec.n_list.begin(), spec.n_list.end());
  const auto trials = static_cast<std::size_t>(spec.trials);
  // samples[t * max_n + (N - 1)] = ||Z^N||_F^2 of trial t
  std::vector<double> samples(trials * static_cast<std::size_t>(max_n));

  parallel_for(spec.trials, spec.workers, [&](std::int64_t t) {
    Stream stream = trial_stream(spec.base_seed, spec.m, k, t);
    const auto g = gram(sample_channel<double>(spec.m, k, stream));
    const auto powers = residual_powers(g, max_n);
    std::copy(powers.begin(), powers.end(), samples.begin() + static_cast<std::ptrdiff_t>(t) * max_n);
  });

  std::vector<SirCurvePoint> rows;
  for (int n : spec.n_list) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double v = samples[t * static_cast<std::size_t>(max_n) + static_cast<std::size_t>(n - 1)];
      sum += v;
      sum_sq += v * v;
    }
    const double count = static_cast<double>(trials);
    const double mean = sum / count;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)) : 0.0;

    SirCurvePoint p;
    p.m = spec.m;
    p.k = k;
    p.n = n;
    p.trials = spec.trials;
    p.epsilon_exact = mean;
    p.epsilon_exact_stderr = std::sqrt(var / count);
    p.sir_exact_db = analysis::sir_db_or_inf(k, mean);
    if (n <= 4 && spec.m >= 2) {
      p.epsilon_estimated = analysis::epsilon_closed_form(spec.m, k, n, analysis::EpsilonForm::Published);
      p.sir_estimated_db = analysis::sir_db_or_inf(k, *p.epsilon_estimated);
      p.epsilon_expansion = analysis::epsilon_closed_form(spec.m, k, n, analysis::EpsilonForm::WalkExpansion);
      p.sir_expansion_db = analysis::sir_db_or_inf(k, *p.epsilon_expansion);
    }
    if (auto bound = analysis::epsilon_upper_bound(spec.m, k, n)) {
      p.epsilon_bound = *bound;
      p.sir_lower_bound_db = analysis::sir_db_or_inf(k, *bound);
    }
    rows.push_back(p);
  }
  return rows;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Convergence:
      return "convergence";
    case ExperimentKind::Ddm:
      return "ddm";
    case ExperimentKind::Sir:
      return "sir";
    case ExperimentKind::BoundComparison:
      return "bound";
  }
  return "unknown";
}

ProbabilityEstimate ProbabilityEstimate::wilson(std::int64_t successes, std::int64_t trials) {
  if (trials < 1 || successes < 0 || successes > trials) throw ParameterError("wilson: invalid counts");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  ProbabilityEstimate out;
  out.successes = successes;
  out.trials = trials;
  out.p_hat = p;
  out.ci_low = std::min(p, std::max(0.0, centre - half));
  out.ci_high = std::max(p, std::min(1.0, centre + half));
  return out;
}

Stream trial_stream(std::uint64_t seed, int m, int k, std::int64_t trial) {
  const auto config = static_cast<std::uint32_t>(
      mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(m)) << 32) | static_cast<std::uint32_t>(k)));
  const std::uint64_t id = (std::uint64_t{config} << 32) | static_cast<std::uint32_t>(trial);
  return Stream(seed, id);
}

ConvergenceOutcome convergence_check(const GramMatrix<double>& g, int m) {
  const double rho = iteration_spectral_radius(g);
  const auto extremes = hermitian_eig_extremes(g);
  return {rho < 1.0, extremes.lambda_max < 2.0 * m};
}

DdmOutcome ddm_check(const GramMatrix<double>& g) {
  const Index k = g.dim();
  const auto& gm = g.matrix();
  const auto& d = g.diag();
  DdmOutcome out{true, true, 0.0};
  for (Index i = 0; i < k; ++i) {
    double off = 0.0;
    double delta = 0.0;
    for (Index j = 0; j < k; ++j) {
      if (j == i) continue;
      const double mag = std::abs(gm(i, j));
      off += mag;
      delta += mag / std::sqrt(d(i) * d(j));
    }
    out.strict_ddm = out.strict_ddm && d(i) > off;
    out.delta_ok = out.delta_ok && delta < 1.0;
    out.max_delta = std::max(out.max_delta, delta);
  }
  return out;
}

ConvergenceOutcome convergence_trial(int m, int k, Stream& stream) {
  return convergence_check(gram(sample_channel<double>(m, k, stream)), m);
}

DdmOutcome ddm_trial(int m, int k, Stream& stream) {
  return ddm_check(gram(sample_channel<double>(m, k, stream)));
}

double sir_trial(int m, int k, int n, Stream& stream) {
  if (n < 1) throw ParameterError("sir_trial: N must be positive");
  return residual_power(gram(sample_channel<double>(m, k, stream)), n);
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const ProgressFn& progress) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.spec = spec;
  for (int k : spec.k_list) {
    if (progress) {
      progress(std::string(to_string(spec.kind)) + ": M=" + std::to_string(spec.m) + " K=" + std::to_string(k) +
               " trials=" + std::to_string(spec.trials));
    }
    if (is_sir_kind(spec.kind)) {
      auto rows = run_sir_rows(spec, k);
      report.sir_rows.insert(report.sir_rows.end(), rows.begin(), rows.end());
    } else {
      report.probability_rows.push_back(run_probability_row(spec, k));
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<SirCurvePoint> bound_comparison(int m, const std::vector<int>& k_list, const std::vector<int>& n_list,
                                            std::int64_t trials, std::uint64_t seed, int workers) {
  ExperimentSpec spec;
  spec.m = m;
  spec.k_list = k_list;
  spec.n_list = n_list;
  spec.trials = trials;
  spec.base_seed = seed;
  spec.kind = ExperimentKind::BoundComparison;
  spec.workers = workers;
  return run_experiment(spec).sir_rows;
}

}  // namespace nsmia::mc
