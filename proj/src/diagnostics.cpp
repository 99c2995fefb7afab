#include "minimax/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace minimax {

using nlohmann::json;

std::string check_report_json(const CheckReport& report, int indent) {
  json details = json::object();
  for (const auto& [k, v] : report.details) details[k] = v;
  return json{{"check", report.name},
              {"pass", report.pass},
              {"statistic", report.statistic},
              {"tolerance", report.tolerance},
              {"replications", report.replications},
              {"seed", report.seed},
              {"note", report.note},
              {"details", details}}
      .dump(indent);
}

// ---------------------------------------------------------------------------
// KL identity
// ---------------------------------------------------------------------------

CheckReport kl_identity_check(const TargetFunction& f, const TargetFunction& g,
                              double sigma, long mc_points, Rng& rng) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("kl_identity_check: sigma must be > 0");
  CheckReport rep;
  rep.name = "kl_identity";
  rep.replications = mc_points;

  // target: ||f - g||^2 / (2 sigma^2) by exact quadrature (d = 1) or MC
  double dist_sq;
  if (f.dim() == 1 && f.piecewise() && g.piecewise()) {
    dist_sq = f.piecewise()->l2_dist_sq(*g.piecewise());
  } else {
    double acc = 0.0;
    std::vector<double> x(static_cast<std::size_t>(f.dim()));
    for (long i = 0; i < mc_points; ++i) {
      for (int c = 0; c < f.dim(); ++c)
        x[static_cast<std::size_t>(c)] = rng.uniform();
      const double d = f.eval(x) - g.eval(x);
      acc += d * d;
    }
    dist_sq = acc / static_cast<double>(mc_points);
  }
  const double target = dist_sq / (2.0 * sigma * sigma);

  // sample (X, Y) under f; average the closed-form log density ratio
  double acc = 0.0, acc2 = 0.0;
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  for (long i = 0; i < mc_points; ++i) {
    for (int c = 0; c < f.dim(); ++c)
      x[static_cast<std::size_t>(c)] = rng.uniform();
    const double fx = f.eval(x);
    const double y = fx + sigma * rng.normal();
    const double gy = y - g.eval(x);
    const double fy = y - fx;
    const double ratio = (gy * gy - fy * fy) / (2.0 * sigma * sigma);
    acc += ratio;
    acc2 += ratio * ratio;
  }
  const double mean = acc / static_cast<double>(mc_points);
  const double var = std::max(
      0.0, acc2 / static_cast<double>(mc_points) - mean * mean);
  const double se = std::sqrt(var / static_cast<double>(mc_points));

  rep.statistic = mean;
  rep.tolerance = 3.0 * se;
  rep.pass = std::abs(mean - target) <= rep.tolerance;
  rep.details["target"] = target;
  rep.details["mc_se"] = se;
  rep.note = "KL(f, g) estimate vs ||f-g||^2/(2 sigma^2)";
  return rep;
}

// ---------------------------------------------------------------------------
// Risk convexity for linear estimators
// ---------------------------------------------------------------------------

namespace {

bool linearity_certificate(
    const std::function<FittedEstimator(const Dataset&)>& builder, Rng& rng) {
  const int n = 24;
  Dataset d1, d2, d3;
  d1.xs.resize(n, 1);
  d1.ys.resize(n);
  d2 = d1;
  d3 = d1;
  const double a = 1.3, b = -0.7;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform();
    d1.xs(i, 0) = d2.xs(i, 0) = d3.xs(i, 0) = x;
    d1.ys(i) = rng.uniform(-1, 1);
    d2.ys(i) = rng.uniform(-1, 1);
    d3.ys(i) = a * d1.ys(i) + b * d2.ys(i);
  }
  const auto f1 = builder(d1), f2 = builder(d2), f3 = builder(d3);
  for (int i = 0; i < 25; ++i) {
    const double x = rng.uniform();
    if (std::abs(f3.predict1(x) -
                 (a * f1.predict1(x) + b * f2.predict1(x))) > 1e-9)
      return false;
  }
  return true;
}

}  // namespace

CheckReport linear_convexity_check(
    const std::function<FittedEstimator(const Dataset&)>& builder,
    const TargetFunction& f0, const TargetFunction& g0,
    std::span<const double> t_grid, long n, int R, Rng& rng,
    bool exploratory) {
  CheckReport rep;
  rep.name = "linear_convexity";
  rep.replications = R;
  if (!linearity_certificate(builder, rng)) {
    if (!exploratory)
      throw std::invalid_argument(
          "linear_convexity_check: estimator failed the linearity "
          "certificate; rerun in exploratory mode to inspect it anyway");
    rep.note = "exploratory: estimator is not linear in Y";
  }

  RiskMethodCfg risk_cfg;  // exact path for the piecewise targets
  // per-replication risks with X and noise coupled across the targets
  std::vector<std::vector<double>> delta(
      t_grid.size());  // per t: samples of R(h) - t R(f) - (1-t) R(g)
  for (int r = 0; r < R; ++r) {
    Dataset base;
    base.xs.resize(n, 1);
    base.ys.resize(n);
    std::vector<double> noise(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      base.xs(i, 0) = rng.uniform();
      noise[static_cast<std::size_t>(i)] = rng.normal();
    }
    const double sigma = 0.5;
    auto risk_for = [&](const TargetFunction& target) {
      Dataset d = base;
      for (long i = 0; i < n; ++i) {
        const double x = d.xs(i, 0);
        d.ys(i) = target.eval1(x) + sigma * noise[static_cast<std::size_t>(i)];
      }
      d.meta.sigma = sigma;
      const auto est = builder(d);
      return estimate_l2_risk(est, target, risk_cfg, 0).risk;
    };
    const double rf = risk_for(f0);
    const double rg = risk_for(g0);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      const double t = t_grid[ti];
      // h = t f + (1 - t) g as an exact piecewise target
      PiecewiseLinear hpl =
          f0.piecewise()->scaled(t).plus(g0.piecewise()->scaled(1.0 - t));
      const TargetFunction h = TargetFunction::custom(hpl, "convex_mix");
      const double rh = risk_for(h);
      delta[ti].push_back(rh - t * rf - (1.0 - t) * rg);
    }
  }

  double worst = -1e300, worst_tol = 0.0;
  bool pass = true;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    double mean = 0.0;
    for (double v : delta[ti]) mean += v;
    mean /= static_cast<double>(delta[ti].size());
    double var = 0.0;
    for (double v : delta[ti]) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(1, delta[ti].size() - 1);
    const double se = std::sqrt(var / static_cast<double>(delta[ti].size()));
    const double tol = 3.0 * se;
    rep.details["delta_t" + std::to_string(ti)] = mean;
    rep.details["se_t" + std::to_string(ti)] = se;
    if (mean > worst) {
      worst = mean;
      worst_tol = tol;
    }
    if (mean > tol) pass = false;
  }
  rep.statistic = worst;  // largest convexity violation across the t grid
  rep.tolerance = worst_tol;
  rep.pass = pass;
  if (rep.note.empty())
    rep.note = "R(h_t) - t R(f) - (1-t) R(g), coupled noise";
  return rep;
}

// ---------------------------------------------------------------------------
// Bin-count concentration
// ---------------------------------------------------------------------------

double bin_tail_constant(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("bin_tail_constant: gamma outside (0, 1)");
  // max over integers n >= 1 of ln(n) / n^{1 - gamma}; the maximizer sits
  // near exp(1 / (1 - gamma)), scan a safe neighborhood
  const long hi =
      static_cast<long>(std::ceil(std::exp(1.0 / (1.0 - gamma)))) + 4;
  double best = 0.0;
  for (long n = 1; n <= hi; ++n)
    best = std::max(best, std::log(static_cast<double>(n)) /
                              std::pow(static_cast<double>(n), 1.0 - gamma));
  const double rhs = 2.0 + gamma * best;
  return 0.5 * (rhs / std::log(2.0) + 1.0);
}

CheckReport bin_concentration_check(long n, double gamma, double c, int R,
                                    Rng& rng) {
  CheckReport rep;
  rep.name = "bin_concentration";
  rep.replications = R;
  const double ng = std::pow(static_cast<double>(n), gamma);
  long m = 1;
  while (2 * m <= static_cast<long>(ng)) m *= 2;
  if (!(m <= ng && ng <= 2 * m)) {
    rep.pass = false;
    rep.note = "no power-of-two m satisfies m <= n^gamma <= 2m";
    return rep;
  }
  const double threshold = c * static_cast<double>(n) / static_cast<double>(m);
  long exceed = 0;
  std::vector<long> bins(static_cast<std::size_t>(m));
  for (int r = 0; r < R; ++r) {
    std::fill(bins.begin(), bins.end(), 0L);
    for (long i = 0; i < n; ++i) {
      long b = static_cast<long>(rng.uniform() * static_cast<double>(m));
      if (b >= m) b = m - 1;
      ++bins[static_cast<std::size_t>(b)];
    }
    const long mx = *std::max_element(bins.begin(), bins.end());
    if (static_cast<double>(mx) >= threshold) ++exceed;
  }
  const double freq = static_cast<double>(exceed) / static_cast<double>(R);
  const double tail_bound =
      std::pow(2.0, -std::pow(static_cast<double>(n), 1.0 - gamma));
  rep.statistic = freq;
  rep.tolerance = std::max(tail_bound, 5.0 / static_cast<double>(R));
  rep.pass = freq <= rep.tolerance;
  rep.details["m"] = static_cast<double>(m);
  rep.details["c"] = c;
  rep.details["threshold"] = threshold;
  rep.details["tail_bound"] = tail_bound;
  rep.note = "P(max bin >= c n / m) vs 2^{-n^{1-gamma}} with statistical floor";
  return rep;
}

// ---------------------------------------------------------------------------
// Hypercube packing
// ---------------------------------------------------------------------------

namespace {

int popcount64(std::uint64_t v) {
  int c = 0;
  while (v) {
    v &= v - 1;
    ++c;
  }
  return c;
}

}  // namespace

CheckReport hypercube_packing_demo(int k, double delta) {
  if (k < 1 || k > 14)
    throw std::invalid_argument("hypercube_packing_demo: need 1 <= k <= 14");
  if (!(delta > 0.0))
    throw std::invalid_argument("hypercube_packing_demo: delta must be > 0");
  CheckReport rep;
  rep.name = "hypercube_packing";
  // vertices of {-delta, +delta}^k as bitmasks; squared distance between
  // u, v is 4 delta^2 H(u, v), and the packing condition
  // dist > delta sqrt(k)/2 becomes H > k/16
  const std::uint64_t count = 1ULL << k;
  const double min_hamming = static_cast<double>(k) / 16.0;
  std::vector<std::uint64_t> kept;
  for (std::uint64_t v = 0; v < count; ++v) {
    bool ok = true;
    for (std::uint64_t u : kept) {
      if (static_cast<double>(popcount64(u ^ v)) <= min_hamming) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(v);
  }
  const double rate = std::log(static_cast<double>(kept.size())) /
                      static_cast<double>(k);
  rep.statistic = rate;
  rep.tolerance = 0.05;  // positive floor; A itself is nonconstructive
  rep.pass = rate >= rep.tolerance;
  rep.replications = static_cast<long>(kept.size());
  rep.details["count"] = static_cast<double>(kept.size());
  rep.details["k"] = k;
  rep.details["delta"] = delta;

  if (k <= 4) {
    // exhaustive optimum over all subsets (at most 2^16 of them)
    const std::uint64_t subsets = 1ULL << count;
    int best = 0;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      std::vector<int> members;
      for (int v = 0; v < static_cast<int>(count); ++v)
        if (mask & (1ULL << v)) members.push_back(v);
      bool ok = true;
      for (std::size_t i = 0; i < members.size() && ok; ++i)
        for (std::size_t j = i + 1; j < members.size() && ok; ++j)
          if (popcount64(static_cast<std::uint64_t>(members[i] ^
                                                    members[j])) <=
              min_hamming)
            ok = false;
      if (ok) best = std::max(best, static_cast<int>(members.size()));
    }
    rep.details["exhaustive_optimum"] = best;
    if (static_cast<int>(kept.size()) < best) rep.pass = false;
  }
  rep.note = "greedy sign-vertex packing at radius delta sqrt(k)/2";
  return rep;
}

// ---------------------------------------------------------------------------
// Quantized-coefficient covering count
// ---------------------------------------------------------------------------

double quantized_cover_size(long k, double C1, double alpha, double beta) {
  if (k < 2) throw std::invalid_argument("quantized_cover_size: k must be >= 2");
  if (!(C1 > 0.0 && alpha > 0.0 && beta > 0.0))
    throw std::invalid_argument("quantized_cover_size: bad parameters");
  const double kd = static_cast<double>(k);
  const double M = std::ceil(std::pow(kd, 2.0 * alpha / beta));
  // log binom(M, k) via log-gamma
  const double log_binom = std::lgamma(M + 1.0) - std::lgamma(kd + 1.0) -
                           std::lgamma(M - kd + 1.0);
  const double per_coord =
      std::log(2.0 * C1 * std::pow(kd, 0.5 + alpha) + 1.0);
  return log_binom + kd * per_coord;
}

double quantized_cover_size_at_epsilon(double epsilon, double C1, double alpha,
                                       double beta) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("quantized_cover_size_at_epsilon: bad epsilon");
  const long k = std::max(
      2L, static_cast<long>(std::ceil(std::pow(epsilon, -1.0 / alpha))));
  return quantized_cover_size(k, C1, alpha, beta);
}

CheckReport quantized_cover_check(long k_max, double C1, double alpha,
                                  double beta) {
  CheckReport rep;
  rep.name = "quantized_cover";
  // C0 assembled from the proof's two displayed addends plus the ceiling
  // slack on the atom count
  const double C0 = 2.0 * alpha / beta + alpha + 0.5 +
                    std::log(2.0 * (2.0 * C1 + 1.0));
  double worst_ratio = 0.0;
  bool pass = true;
  double prev = -1e300;
  bool monotone = true;
  for (long k = 2; k <= k_max; ++k) {
    const double v = quantized_cover_size(k, C1, alpha, beta);
    const double bound =
        C0 * static_cast<double>(k) * (std::log(static_cast<double>(k)) + 1.0);
    worst_ratio = std::max(worst_ratio, v / bound);
    if (v > bound) pass = false;
    if (v < prev) monotone = false;
    prev = v;
  }
  rep.statistic = worst_ratio;
  rep.tolerance = 1.0;
  rep.pass = pass && monotone;
  rep.replications = k_max - 1;
  rep.details["C0"] = C0;
  rep.details["monotone_in_k"] = monotone ? 1.0 : 0.0;
  rep.note = "log cover count vs C0 k (ln k + 1), k in [2, k_max]";
  return rep;
}

}  // namespace minimax
