#ifndef NSMIA_ANALYSIS_HPP
#define NSMIA_ANALYSIS_HPP

#include <optional>

#include "nsmia/linalg.hpp"

namespace nsmia::analysis {

/// ln Gamma(a) for real a > 0 (Lanczos, g = 671/128, 14 terms).
/// Relative error below 1e-14 on [0.5, 1e6].
double log_gamma(double a);

/// B(a, b) for real a, b > 0. Evaluated from Lanczos sums with the large
/// power terms folded through log1p, so B(a, b) for large b keeps full
/// relative precision instead of cancelling two big log-gammas.
double beta(double a, double b);

/// B_{a,M} = (M - 1) B(a, M - 1). For x = |r_ij| this is E(x^{2(a-1)}).
double b_am(double a, int m);

/// Moments of x = |r_ij| under f(x) = 2(M-1) x (1-x^2)^{M-2}.
struct MomentSet {
  int m;
  double mean_x;         // E(x)
  double second_moment;  // E(x^2) = 1/M
  double std_x;          // sqrt(E(x^2) - E(x)^2)
  double fourth_moment;  // E(x^4)
};

MomentSet corr_moments(int m);

/// Marchenko-Pastur edges M (1 -+ 1/sqrt(alpha))^2 of H^H H, alpha = M/K.
EigenExtremes<double> mp_eigen_limits(int m, int k);

/// 1 / (sqrt 2 - 1)^2 = 3 + 2 sqrt 2: lambda_max edge equals 2M at this alpha.
double convergence_alpha_threshold();

/// Largest K with M/K strictly above convergence_alpha_threshold(). M >= 6.
int max_users_convergence(int m);

/// M (E(x) + std(x)) / (E(x) + std(x) + 1).
double ddm_alpha_threshold(int m);

/// Largest K <= M with M/K strictly above ddm_alpha_threshold(M), which is
/// the same as (K - 1)(E(x) + std(x)) < 1.
int max_users_ddm(int m);

/// Which closed form to use for the N = 3, 4 residual estimates. The two
/// coincide for N = 1, 2.
///
/// Published: the coefficients as originally printed for this analysis.
/// WalkExpansion: E tr(Z^{2N}) expanded over closed walks of length 2N on
///   the complete graph, keeping walks that cross every edge equally often in
///   both directions (the zero-mean argument used for N = 2) and mapping an
///   edge crossed 2m times to B_{m+1,M}. Agrees with Monte Carlo where the
///   published N = 3, 4 coefficients do not; see the README.
enum class EpsilonForm { Published, WalkExpansion };

struct ErrorEstimate {
  int n;
  double epsilon;
  double sir_linear;                   // K / epsilon, +inf when epsilon == 0
  double sir_db;                       // 10 log10(sir_linear)
  std::optional<double> upper_bound;   // loose bound, needs M > 4
};

/// Closed-form epsilon_N, N in {1, 2, 3, 4}.
double epsilon_closed_form(int m, int k, int n, EpsilonForm form = EpsilonForm::Published);

/// [(K^2 - K) sqrt(2M(M+1) / ((M-1)(M-2)(M-3)(M-4)))]^N, or nullopt for M <= 4.
std::optional<double> epsilon_upper_bound(int m, int k, int n);

ErrorEstimate epsilon_estimate(int m, int k, int n, EpsilonForm form = EpsilonForm::Published);

/// 10 log10(K / epsilon); epsilon must be positive.
double sir_db(int k, double epsilon);

/// Same conversion but maps epsilon == 0 to +inf.
double sir_db_or_inf(int k, double epsilon);

}  // namespace nsmia::analysis

#endif  // NSMIA_ANALYSIS_HPP
