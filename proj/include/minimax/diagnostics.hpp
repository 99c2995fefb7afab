#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "minimax/estimators.hpp"
#include "minimax/harness.hpp"
#include "minimax/target_function.hpp"

namespace minimax {

// executable checks of side results: each one reports its statistic,
// tolerance, replication count and seed, pass or fail
struct CheckReport {
  std::string name;
  bool pass = false;
  double statistic = 0.0;
  double tolerance = 0.0;
  long replications = 0;
  std::uint64_t seed = 0;
  std::string note;
  std::map<std::string, double> details;
};

std::string check_report_json(const CheckReport& report, int indent = 2);

// Monte Carlo estimate of the KL divergence between the (X, Y) joint laws
// under f and g, compared with ||f - g||^2 / (2 sigma^2); passes within
// 3 MC standard errors
CheckReport kl_identity_check(const TargetFunction& f, const TargetFunction& g,
                              double sigma, long mc_points, Rng& rng);

// Convexity of the risk of a Y-linear estimator: with X and the noise
// coupled across the three targets, per-replication risks satisfy
// R(h_t) <= t R(f) + (1-t) R(g) pointwise; the check verifies the averaged
// inequality within 3 combined standard errors at every t. A builder that
// fails the linearity certificate is refused unless exploratory is set.
CheckReport linear_convexity_check(
    const std::function<FittedEstimator(const Dataset&)>& builder,
    const TargetFunction& f0, const TargetFunction& g0,
    std::span<const double> t_grid, long n, int R, Rng& rng,
    bool exploratory = false);

// the constant from the bin-count concentration recipe:
// (2c - 1) ln 2 >= 2 + gamma max_{n >= 1} ln(n) / n^{1 - gamma}
double bin_tail_constant(double gamma);

// empirical frequency of {max bin count >= c n / m} for n uniform points in
// m equal bins (m a power of two with m <= n^gamma <= 2m), over R trials;
// passes when the frequency is at most max(2^{-n^{1-gamma}}, 5/R)
CheckReport bin_concentration_check(long n, double gamma, double c, int R,
                                    Rng& rng);

// greedy packing of the sign vertices of [-delta, delta]^k at pairwise
// distance > delta sqrt(k)/2; reports ln(count)/k, which must stay above a
// positive floor; for k <= 4 the greedy count is certified against an
// exhaustive search
CheckReport hypercube_packing_demo(int k, double delta);

// log of the quantized-coefficient covering count
// binom(ceil(k^{2 alpha / beta}), k) (2 C1 k^{1/2 + alpha} + 1)^k
double quantized_cover_size(long k, double C1, double alpha, double beta);

// same count with k ~ epsilon^{-1/alpha}, the substitution used to verify
// the entropy shape epsilon^{-1/alpha} (1 + log(1/epsilon))
double quantized_cover_size_at_epsilon(double epsilon, double C1, double alpha,
                                       double beta);

// sweeps k in [2, k_max] checking the count against C0 k (ln k + 1) with C0
// assembled from the proof's addends
CheckReport quantized_cover_check(long k_max, double C1, double alpha,
                                  double beta);

}  // namespace minimax
