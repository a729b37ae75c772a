#include "nsmia/analysis.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nsmia/errors.hpp"

namespace nsmia::analysis {
namespace {

constexpr double kLanczosShift = 5.24218750000000000;  // 671/128
constexpr double kLanczosBase = 0.999999999999997092;
constexpr std::array<double, 14> kLanczosCoeffs = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,     -0.491913816097620199,
    .339946499848118887e-4,  .465236289270485756e-4,  -.983744753048795646e-4, .158088703224912494e-3,
    -.210264441724104883e-3, .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

// Gamma(x) = sqrt(2 pi) * t^(x + 1/2) * e^(-t) * series(x) / x, t = x + shift.
double lanczos_series(double x) {
  double sum = kLanczosBase;
  double y = x;
  for (double c : kLanczosCoeffs) sum += c / ++y;
  return sum;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be a positive finite real");
}

void require_m(int m, int min_m, const char* who) {
  if (m < min_m) throw DomainError(std::string(who) + ": M must be at least " + std::to_string(min_m));
}

}  // namespace

double log_gamma(double a) {
  require_positive(a, "log_gamma argument");
  const double t = a + kLanczosShift;
  return (a + 0.5) * std::log(t) - t + std::log(std::sqrt(2.0 * std::numbers::pi) * lanczos_series(a) / a);
}

double beta(double a, double b) {
  require_positive(a, "beta argument a");
  require_positive(b, "beta argument b");
  const double c = a + b;
  const double tc = c + kLanczosShift;
  // t_a^(a+1/2) t_b^(b+1/2) / t_c^(c+1/2) = (t_a/t_c)^(a+1/2) (t_b/t_c)^(b+1/2) sqrt(t_c),
  // with t_a/t_c = 1 - b/t_c and t_b/t_c = 1 - a/t_c. log1p only while the
  // subtracted part is small; otherwise 1 - x/t_c cancels.
  auto log_ratio = [tc](double t, double other) {
    return other < 0.5 * tc ? std::log1p(-other / tc) : std::log(t / tc);
  };
  const double log_power =
      (a + 0.5) * log_ratio(a + kLanczosShift, b) + (b + 0.5) * log_ratio(b + kLanczosShift, a);
  const double series = lanczos_series(a) * lanczos_series(b) / lanczos_series(c);
  const double rational = c / (a * b);
  return std::sqrt(2.0 * std::numbers::pi) * series * rational * std::sqrt(tc) *
         std::exp(log_power - kLanczosShift);
}

double b_am(double a, int m) {
  require_m(m, 2, "b_am");
  return static_cast<double>(m - 1) * beta(a, static_cast<double>(m - 1));
}

MomentSet corr_moments(int m) {
  require_m(m, 2, "corr_moments");
  MomentSet out{};
  out.m = m;
  out.mean_x = b_am(1.5, m);
  out.second_moment = b_am(2.0, m);
  out.std_x = std::sqrt(out.second_moment - out.mean_x * out.mean_x);
  out.fourth_moment = b_am(3.0, m);
  return out;
}

EigenExtremes<double> mp_eigen_limits(int m, int k) {
  if (k < 1 || m < k) throw DimensionError("mp_eigen_limits needs M >= K >= 1");
  const double inv_sqrt_alpha = std::sqrt(static_cast<double>(k) / m);
  const double lo = 1.0 - inv_sqrt_alpha;
  const double hi = 1.0 + inv_sqrt_alpha;
  return {m * lo * lo, m * hi * hi};
}

double convergence_alpha_threshold() {
  const double d = std::numbers::sqrt2 - 1.0;
  return 1.0 / (d * d);
}

namespace {

// Largest K in [1, M] with M/K > threshold; 0 when none qualifies.
int max_users_above(int m, double threshold) {
  int k = static_cast<int>(std::floor(m / threshold));
  k = std::min(k + 1, m);
  while (k > 0 && !(static_cast<double>(m) / k > threshold)) --k;
  return k;
}

}  // namespace

int max_users_convergence(int m) {
  require_m(m, 6, "max_users_convergence");
  return max_users_above(m, convergence_alpha_threshold());
}

double ddm_alpha_threshold(int m) {
  const MomentSet mom = corr_moments(m);
  const double s = mom.mean_x + mom.std_x;
  return m * s / (s + 1.0);
}

int max_users_ddm(int m) {
  require_m(m, 2, "max_users_ddm");
  return max_users_above(m, ddm_alpha_threshold(m));
}

double epsilon_closed_form(int m, int k, int n, EpsilonForm form) {
  require_m(m, 2, "epsilon_estimate");
  if (k < 1) throw ParameterError("epsilon_estimate: K must be positive");
  if (n < 1 || n > 4) throw ParameterError("epsilon_estimate: N must be 1, 2, 3 or 4");
  const double kk = k;
  const double b2 = b_am(2.0, m);
  const double b3 = b_am(3.0, m);
  const double b4 = b_am(4.0, m);
  const double pairs = kk * (kk - 1.0);     // ordered pairs i != j
  const double triples = pairs * (kk - 2.0);  // ordered triples, all distinct
  switch (n) {
    case 1:
      return pairs * b2;
    case 2:
      return pairs * b3 + 2.0 * triples * b2 * b2;
    default:
      break;
  }
  if (form == EpsilonForm::Published) {
    if (n == 3) return triples * (5.0 * kk - 8.0) * b2 * b2 * b2 + (2.0 * kk - 3.0) * pairs * b3 * b2;
    return (2.0 * kk - 3.0) * pairs * b3 * b3 + (2.0 * kk - 3.0) * (2.0 * kk - 3.0) * (kk - 1.0) * pairs * b4 * b2 +
           (kk - 2.0) * (kk - 1.0) * kk * pairs * b2 * b2 * b2 * b2;
  }
  if (n == 3) return pairs * b4 + 6.0 * triples * b2 * b3 + triples * (5.0 * kk - 12.0) * b2 * b2 * b2;
  const double b5 = b_am(5.0, m);
  return pairs * b5 + 8.0 * triples * b2 * b4 + 6.0 * triples * b3 * b3 +
         4.0 * triples * (7.0 * kk - 16.0) * b2 * b2 * b3 +
         14.0 * triples * (kk - 2.0) * (kk - 3.0) * b2 * b2 * b2 * b2;
}

std::optional<double> epsilon_upper_bound(int m, int k, int n) {
  if (m <= 4) return std::nullopt;
  if (k < 1) throw ParameterError("epsilon_upper_bound: K must be positive");
  if (n < 1) throw ParameterError("epsilon_upper_bound: N must be positive");
  const double md = m;
  const double root = std::sqrt(2.0 * md * (md + 1.0) / ((md - 1.0) * (md - 2.0) * (md - 3.0) * (md - 4.0)));
  return std::pow((static_cast<double>(k) * k - k) * root, n);
}

ErrorEstimate epsilon_estimate(int m, int k, int n, EpsilonForm form) {
  ErrorEstimate out{};
  out.n = n;
  out.epsilon = epsilon_closed_form(m, k, n, form);
  out.sir_linear = out.epsilon > 0.0 ? k / out.epsilon : std::numeric_limits<double>::infinity();
  out.sir_db = sir_db_or_inf(k, out.epsilon);
  out.upper_bound = epsilon_upper_bound(m, k, n);
  return out;
}

double sir_db(int k, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("sir_db: epsilon must be positive");
  return 10.0 * std::log10(k / epsilon);
}

double sir_db_or_inf(int k, double epsilon) {
  if (epsilon == 0.0) return std::numeric_limits<double>::infinity();
  return sir_db(k, epsilon);
}

}  // namespace nsmia::analysis
