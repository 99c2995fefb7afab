#include "minimax/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace minimax {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config serialization
// ---------------------------------------------------------------------------

std::vector<long> default_n_grid() {
  return {128, 256, 512, 1024, 2048, 4096, 8192};
}

namespace {

json class_spec_to_json(const ClassSpec& s) {
  json out{{"kind", to_string(s.kind)}, {"dim", s.dim},
           {"max_level", s.max_level}, {"law", s.law}};
  switch (s.kind) {
    case TargetKind::Jk:
      out["k"] = s.params.k;
      out["C"] = s.params.C;
      break;
    case TargetKind::I0:
      out["n_s"] = s.params.n_s;
      out["C"] = s.params.C;
      break;
    case TargetKind::Kp:
      out["n_s"] = s.params.n_s;
      out["C3"] = s.params.C3;
      [[fallthrough]];
    case TargetKind::Jp:
      out["p"] = s.params.sparsity.p;
      out["C1"] = s.params.sparsity.C1;
      out["C2"] = s.params.sparsity.C2;
      out["beta"] = s.params.sparsity.beta;
      break;
    case TargetKind::Custom:
      break;
  }
  return out;
}

ClassSpec class_spec_from_json(const json& j) {
  ClassSpec s;
  s.kind = target_kind_from_string(j.at("kind").get<std::string>());
  s.dim = j.value("dim", 1);
  s.max_level = j.value("max_level", 6);
  s.law = j.value("law", std::string("default"));
  switch (s.kind) {
    case TargetKind::Jk:
      s.params.k = j.at("k").get<int>();
      s.params.C = j.at("C").get<double>();
      break;
    case TargetKind::I0:
      s.params.n_s = j.at("n_s").get<int>();
      s.params.C = j.at("C").get<double>();
      break;
    case TargetKind::Kp:
      s.params.n_s = j.at("n_s").get<int>();
      s.params.C3 = j.at("C3").get<double>();
      [[fallthrough]];
    case TargetKind::Jp:
      s.params.sparsity.p = j.at("p").get<double>();
      s.params.sparsity.C1 = j.at("C1").get<double>();
      s.params.sparsity.C2 = j.at("C2").get<double>();
      s.params.sparsity.beta = j.at("beta").get<double>();
      break;
    case TargetKind::Custom:
      break;
  }
  return s;
}

json estimator_spec_to_json(const EstimatorSpec& e) {
  json out{{"kind", e.kind}};
  if (e.kind == "krr") {
    out["kernel"] = e.kernel;
    out["bw_scale"] = e.bw_scale;
    out["bw_power"] = e.bw_power;
    if (e.lambda > 0.0) out["lambda"] = e.lambda;
    if (!e.lambda_grid.empty()) out["lambda_grid"] = e.lambda_grid;
  } else if (e.kind == "nw") {
    out["bw_scale"] = e.bw_scale;
    out["bw_power"] = e.bw_power;
  } else if (e.kind == "wavelet_threshold") {
    out["max_level"] = e.max_level;
  } else if (e.kind == "deep_constructive") {
    if (e.budget.n_atoms > 0) out["n_atoms"] = e.budget.n_atoms;
    if (e.budget.max_level >= 0) out["max_level"] = e.budget.max_level;
    if (e.budget.ramp_width > 0) out["ramp_width"] = e.budget.ramp_width;
  } else if (e.kind == "deep_gd") {
    out["epochs"] = e.epochs;
    out["step"] = e.step;
    out["L"] = e.gd_arch.L;
    out["S"] = e.gd_arch.S;
    out["D"] = e.gd_arch.D;
    out["B"] = e.gd_arch.B;
  }
  return out;
}

EstimatorSpec estimator_spec_from_json(const json& j) {
  EstimatorSpec e;
  e.kind = j.at("kind").get<std::string>();
  e.kernel = j.value("kernel", std::string("laplace"));
  e.bw_scale = j.value("bw_scale", 0.5);
  e.bw_power = j.value("bw_power", 1.0 / 3.0);
  e.lambda = j.value("lambda", 0.0);
  if (j.contains("lambda_grid"))
    e.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  e.max_level = j.value("max_level", -1);
  e.budget.n_atoms = j.value("n_atoms", 0);
  if (e.kind == "deep_constructive")
    e.budget.max_level = j.value("max_level", -1);
  e.budget.ramp_width = j.value("ramp_width", 0.0);
  e.epochs = j.value("epochs", 500);
  e.step = j.value("step", 0.1);
  e.gd_arch.L = j.value("L", 2);
  e.gd_arch.S = j.value("S", 64L);
  e.gd_arch.D = j.value("D", 8);
  e.gd_arch.B = j.value("B", 8.0);
  return e;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
  json ests = json::array();
  for (const auto& e : cfg.estimators) ests.push_back(estimator_spec_to_json(e));
  json out{{"class", class_spec_to_json(cfg.target)},
           {"estimators", ests},
           {"n_grid", cfg.n_grid},
           {"replications", cfg.replications},
           {"sigma", cfg.sigma},
           {"risk", {{"method", cfg.risk.method},
                     {"mc_points", cfg.risk.mc_points}}},
           {"fixed_target", cfg.fixed_target},
           {"master_seed", cfg.master_seed},
           {"threads", cfg.threads},
           {"timings", cfg.timings}};
  return out.dump(indent);
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  cfg.target = class_spec_from_json(j.at("class"));
  for (const auto& e : j.at("estimators"))
    cfg.estimators.push_back(estimator_spec_from_json(e));
  if (j.contains("n_grid"))
    cfg.n_grid = j.at("n_grid").get<std::vector<long>>();
  else
    cfg.n_grid = default_n_grid();
  cfg.replications = j.value("replications", 20);
  cfg.sigma = j.value("sigma", 0.5);
  if (j.contains("risk")) {
    cfg.risk.method = j.at("risk").value("method", std::string("auto"));
    cfg.risk.mc_points = j.at("risk").value("mc_points", 100000L);
  }
  cfg.fixed_target = j.value("fixed_target", true);
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});
  cfg.threads = j.value("threads", 1);
  cfg.timings = j.value("timings", false);
  if (cfg.n_grid.empty() || cfg.replications < 1 || !(cfg.sigma > 0.0))
    throw std::invalid_argument("config: need n grid, R >= 1 and sigma > 0");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw std::invalid_argument("config: n grid must be strictly increasing");
  return cfg;
}

TargetFunction sample_target(const ClassSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case TargetKind::Jk:
      return sample_jk(spec.params.k, spec.params.C, rng);
    case TargetKind::I0: {
      const auto phis = make_phi_set({haar_jump_base(spec.dim)});
      return sample_i0(spec.params.n_s, spec.params.C, phis, rng);
    }
    case TargetKind::Jp: {
      auto e = sample_jp(DyadicWavelet::haar(spec.dim),
                         spec.params.sparsity.p, spec.params.sparsity.C1,
                         spec.params.sparsity.C2, spec.params.sparsity.beta,
                         spec.max_level, rng);
      return TargetFunction::jp(std::move(e));
    }
    case TargetKind::Kp:
      return sample_kp({DyadicWavelet::haar(spec.dim)}, spec.params.n_s,
                       spec.params.sparsity.p, spec.params.sparsity.C1,
                       spec.params.sparsity.C2, spec.params.C3,
                       spec.params.sparsity.beta, spec.max_level, rng);
    case TargetKind::Custom:
      throw std::invalid_argument("sample_target: custom class has no sampler");
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Data generation
// ---------------------------------------------------------------------------

Dataset generate_data(const TargetFunction& f, long n, double sigma,
                      Rng& rng) {
  if (n < 1) throw std::invalid_argument("generate_data: n must be >= 1");
  if (!(sigma > 0.0))
    throw std::invalid_argument("generate_data: sigma must be > 0");
  Dataset d;
  d.xs.resize(n, f.dim());
  d.ys.resize(n);
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  for (long i = 0; i < n; ++i) {
    for (int c = 0; c < f.dim(); ++c) {
      x[static_cast<std::size_t>(c)] = rng.uniform();
      d.xs(i, c) = x[static_cast<std::size_t>(c)];
    }
    d.ys(i) = f.eval(x) + sigma * rng.normal();
  }
  d.meta.sigma = sigma;
  d.meta.target_id = to_string(f.kind());
  return d;
}

// ---------------------------------------------------------------------------
// Risk estimation
// ---------------------------------------------------------------------------

namespace {

RiskEstimate risk_mc(const FittedEstimator& est, const TargetFunction& f,
                     long points, std::uint64_t seed) {
  Rng rng(seed);
  double acc = 0.0, acc2 = 0.0;
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  for (long i = 0; i < points; ++i) {
    for (int c = 0; c < f.dim(); ++c)
      x[static_cast<std::size_t>(c)] = rng.uniform();
    const double d = est.predict(x) - f.eval(x);
    acc += d * d;
    acc2 += d * d * d * d;
  }
  const double mean = acc / static_cast<double>(points);
  const double var =
      std::max(0.0, acc2 / static_cast<double>(points) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(points)), "mc"};
}

}  // namespace

RiskEstimate estimate_l2_risk(const FittedEstimator& est,
                              const TargetFunction& f,
                              const RiskMethodCfg& cfg,
                              std::uint64_t mc_seed) {
  const bool want_exact = cfg.method == "auto" || cfg.method == "exact";
  if (want_exact && f.dim() == 1 && f.piecewise()) {
    if (est.piecewise) {
      const double risk = est.piecewise->l2_dist_sq(*f.piecewise());
      return {risk, 0.0, "exact"};
    }
    if (!est.quad_hints.empty() || cfg.method == "exact") {
      // breakpoint-aware adaptive quadrature for smooth predictors
      std::vector<double> cuts{0.0, 1.0};
      for (double t : est.quad_hints)
        if (t > 0.0 && t < 1.0) cuts.push_back(t);
      for (double t : f.piecewise()->nodes())
        if (t > 0.0 && t < 1.0) cuts.push_back(t);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      auto sq = [&](double x) {
        const double d = est.predict1(x) - f.eval1(x);
        return d * d;
      };
      double acc = 0.0;
      const double tol = 1e-11 / static_cast<double>(cuts.size());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += adaptive_simpson(sq, cuts[i], cuts[i + 1], tol);
      if (std::isfinite(acc)) return {acc, 0.0, "quadrature"};
      // quadrature failure falls back to Monte Carlo
    }
  }
  return risk_mc(est, f, cfg.mc_points, mc_seed);
}

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4)
    throw std::invalid_argument("fit_rate: need at least 4 points");
  std::vector<std::pair<double, double>> logs;
  int dropped = 0;
  for (const auto& [n, risk] : points) {
    if (!(risk > 0.0)) {
      ++dropped;  // nonpositive risk dropped with a warning in the report
      continue;
    }
    logs.push_back({std::log(n), std::log(risk)});
  }
  if (logs.size() < 2)
    throw std::invalid_argument("fit_rate: too few positive risks");
  const double m = static_cast<double>(logs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : logs) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double xbar = sx / m, ybar = sy / m;
  const double Sxx = sxx - m * xbar * xbar;
  const double Sxy = sxy - m * xbar * ybar;
  RateFit fit;
  fit.slope = Sxy / Sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double rss = 0.0;
  for (const auto& [x, y] : logs) {
    const double r = y - (fit.intercept + fit.slope * x);
    rss += r * r;
  }
  fit.slope_se =
      logs.size() > 2 ? std::sqrt(rss / (m - 2.0) / Sxx) : 0.0;
  fit.used_points = static_cast<int>(logs.size());
  fit.dropped_points = dropped;
  return fit;
}

std::vector<ReferenceCurve> reference_curves(const ClassSpec& spec,
                                             std::span<const long> n_grid) {
  std::vector<ReferenceCurve> out;
  auto add = [&](std::string label, double expo, double logpow) {
    ReferenceCurve c{std::move(label), expo, logpow, {}};
    for (long n : n_grid)
      c.values.push_back(std::pow(static_cast<double>(n), expo) *
                         std::pow(std::log(static_cast<double>(n)), logpow));
    out.push_back(std::move(c));
  };
  switch (spec.kind) {
    case TargetKind::Jk:
    case TargetKind::I0:
      add("minimax lower 1/n (shape only)", -1.0, 0.0);
      add("deep upper (log n)^3/n (shape only)", -1.0, 3.0);
      add("linear lower n^{-1/2} (shape only)", -0.5, 0.0);
      break;
    case TargetKind::Jp:
    case TargetKind::Kp: {
      const double p = spec.params.sparsity.p;
      const double beta = spec.params.sparsity.beta;
      const double alpha = 1.0 / p - 0.5;
      const double deep = -2.0 * alpha / (2.0 * alpha + 1.0);
      add("minimax lower (shape only)", deep,
          -4.0 * alpha * alpha / (2.0 * alpha + 1.0));
      add("deep upper (log n)^3 (shape only)", deep, 3.0);
      add("linear lower n^{-beta/(1+beta)} (shape only)",
          -beta / (1.0 + beta), 0.0);
      break;
    }
    case TargetKind::Custom:
      break;
  }
  return out;
}

double reference_exponent(const ClassSpec& spec, const std::string& kind) {
  const bool deep = kind == "deep_constructive" || kind == "deep_gd" ||
                    kind == "wavelet_threshold";
  switch (spec.kind) {
    case TargetKind::Jk:
    case TargetKind::I0:
      return deep ? -1.0 : -0.5;
    case TargetKind::Jp:
    case TargetKind::Kp: {
      const double alpha = 1.0 / spec.params.sparsity.p - 0.5;
      const double beta = spec.params.sparsity.beta;
      return deep ? -2.0 * alpha / (2.0 * alpha + 1.0)
                  : -beta / (1.0 + beta);
    }
    case TargetKind::Custom:
      return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

namespace {

FittedEstimator fit_one(const EstimatorSpec& spec, const Dataset& data,
                        const ClassSpec& cls, const TargetFunction& target,
                        double chosen_lambda, std::uint64_t seed) {
  const long n = data.n();
  const double h = spec.bw_scale *
                   std::pow(static_cast<double>(n), -spec.bw_power);
  if (spec.kind == "krr") {
    const Kernel kern = spec.kernel == "gaussian" ? Kernel::gaussian(h)
                                                  : Kernel::laplace(h);
    return kernel_ridge(data, kern, chosen_lambda);
  }
  if (spec.kind == "nw") return nadaraya_watson(data, h);
  if (spec.kind == "wavelet_threshold") {
    const int level =
        spec.max_level >= 0
            ? spec.max_level
            : std::max(1, static_cast<int>(std::log2(std::max(2L, n)) / 2));
    return wavelet_threshold(data, DyadicWavelet::haar(1), level);
  }
  if (spec.kind == "deep_constructive") {
    ClassHint hint{cls.kind, cls.params, target.sup_bound()};
    return erm_deep_constructive(data, hint, spec.budget);
  }
  if (spec.kind == "deep_gd")
    return erm_deep_gd(data, spec.gd_arch, spec.epochs, spec.step, seed);
  throw std::invalid_argument("unknown estimator kind '" + spec.kind + "'");
}

double choose_lambda(const EstimatorSpec& spec, const Dataset& data) {
  if (spec.kind != "krr") return 0.0;
  if (spec.lambda > 0.0) return spec.lambda;
  std::vector<double> grid = spec.lambda_grid;
  if (grid.empty())
    grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  const double h = spec.bw_scale *
                   std::pow(static_cast<double>(data.n()), -spec.bw_power);
  const Kernel kern = spec.kernel == "gaussian" ? Kernel::gaussian(h)
                                                : Kernel::laplace(h);
  return kernel_ridge_cv(data, kern, grid).lambda;
}

}  // namespace

RateReport run_sweep(const ExperimentConfig& cfg) {
  const int n_count = static_cast<int>(cfg.n_grid.size());
  const int e_count = static_cast<int>(cfg.estimators.size());
  const int cell_count = n_count * cfg.replications * e_count;

  // targets: one per run, or one per (n, rep) when resampling is configured
  const TargetFunction fixed_target = [&] {
    Rng rng(derive_seed(cfg.master_seed, "target"));
    return sample_target(cfg.target, rng);
  }();
  auto target_for = [&](int ni, int rep) -> TargetFunction {
    if (cfg.fixed_target) return fixed_target;
    Rng rng(derive_seed(cfg.master_seed, "target", static_cast<std::uint64_t>(ni),
                        static_cast<std::uint64_t>(rep)));
    return sample_target(cfg.target, rng);
  };

  // per-(estimator, n) lambda selection by cross-validation on the rep-0
  // dataset (same derived seed as the rep-0 cell, so nothing leaks)
  std::vector<double> lambdas(static_cast<std::size_t>(e_count) *
                                  static_cast<std::size_t>(n_count),
                              0.0);
  parallel_for(e_count * n_count, cfg.threads, [&](int idx) {
    const int ei = idx / n_count;
    const int ni = idx % n_count;
    if (cfg.estimators[static_cast<std::size_t>(ei)].kind != "krr") return;
    const TargetFunction f = target_for(ni, 0);
    Rng rng(derive_seed(cfg.master_seed, "data", static_cast<std::uint64_t>(ni), 0));
    const Dataset data =
        generate_data(f, cfg.n_grid[static_cast<std::size_t>(ni)], cfg.sigma,
                      rng);
    lambdas[static_cast<std::size_t>(idx)] =
        choose_lambda(cfg.estimators[static_cast<std::size_t>(ei)], data);
  });

  std::vector<SweepCell> cells(static_cast<std::size_t>(cell_count));
  parallel_for(cell_count, cfg.threads, [&](int idx) {
    const int ei = idx % e_count;
    const int rep = (idx / e_count) % cfg.replications;
    const int ni = idx / (e_count * cfg.replications);
    const auto& espec = cfg.estimators[static_cast<std::size_t>(ei)];
    SweepCell& cell = cells[static_cast<std::size_t>(idx)];
    cell.estimator = espec.kind;
    cell.n = cfg.n_grid[static_cast<std::size_t>(ni)];
    cell.rep = rep;
    try {
      const TargetFunction f = target_for(ni, rep);
      const std::uint64_t data_seed =
          derive_seed(cfg.master_seed, "data", static_cast<std::uint64_t>(ni),
                      static_cast<std::uint64_t>(rep));
      Rng rng(data_seed);
      Dataset data = generate_data(f, cell.n, cfg.sigma, rng);
      data.meta.seed = data_seed;
      const auto t0 = std::chrono::steady_clock::now();
      const FittedEstimator est =
          fit_one(espec, data, cfg.target, f,
                  lambdas[static_cast<std::size_t>(ei * n_count + ni)],
                  derive_seed(cfg.master_seed, "fit",
                              static_cast<std::uint64_t>(ni),
                              static_cast<std::uint64_t>(rep),
                              static_cast<std::uint64_t>(ei)));
      const auto t1 = std::chrono::steady_clock::now();
      const RiskEstimate risk = estimate_l2_risk(
          est, f, cfg.risk,
          derive_seed(cfg.master_seed, "risk", static_cast<std::uint64_t>(ni),
                      static_cast<std::uint64_t>(rep),
                      static_cast<std::uint64_t>(ei)));
      cell.risk = risk.risk;
      cell.risk_se = risk.se;
      if (cfg.timings)
        cell.fit_seconds =
            std::chrono::duration<double>(t1 - t0).count();
    } catch (const std::exception& ex) {
      cell.failed = true;
      cell.error = ex.what();
    }
  });

  RateReport report;
  report.cells = std::move(cells);
  // aggregate: mean risk per (estimator, n) over successful replications
  for (int ei = 0; ei < e_count; ++ei) {
    EstimatorRate rate;
    rate.estimator = cfg.estimators[static_cast<std::size_t>(ei)].kind;
    rate.reference_exponent = reference_exponent(cfg.target, rate.estimator);
    for (int ni = 0; ni < n_count; ++ni) {
      std::vector<double> risks;
      for (int rep = 0; rep < cfg.replications; ++rep) {
        const int idx = (ni * cfg.replications + rep) * e_count + ei;
        const auto& cell = report.cells[static_cast<std::size_t>(idx)];
        if (!cell.failed) risks.push_back(cell.risk);
      }
      if (risks.empty()) continue;
      MeanRisk mr;
      mr.n = cfg.n_grid[static_cast<std::size_t>(ni)];
      mr.replications = static_cast<int>(risks.size());
      for (double r : risks) mr.mean += r;
      mr.mean /= static_cast<double>(risks.size());
      if (risks.size() > 1) {
        double var = 0.0;
        for (double r : risks) var += (r - mr.mean) * (r - mr.mean);
        var /= static_cast<double>(risks.size() - 1);
        mr.se = std::sqrt(var / static_cast<double>(risks.size()));
      }
      rate.mean_risks.push_back(mr);
    }
    if (rate.mean_risks.size() >= 4) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& mr : rate.mean_risks)
        pts.push_back({static_cast<double>(mr.n), mr.mean});
      try {
        rate.fit = fit_rate(pts);
        rate.fit_valid = true;
      } catch (const std::exception&) {
        rate.fit_valid = false;
      }
    }
    report.rates.push_back(std::move(rate));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string sweep_csv(const RateReport& report) {
  std::ostringstream out;
  out << "estimator,n,rep,risk,risk_se,fit_seconds\n";
  // stable order by (estimator, n, rep)
  std::vector<const SweepCell*> sorted;
  for (const auto& c : report.cells) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SweepCell* a, const SweepCell* b) {
                     if (a->estimator != b->estimator)
                       return a->estimator < b->estimator;
                     if (a->n != b->n) return a->n < b->n;
                     return a->rep < b->rep;
                   });
  for (const SweepCell* c : sorted) {
    if (c->failed) continue;  // failed cells are reported in the JSON only
    out << c->estimator << ',' << c->n << ',' << c->rep << ','
        << fmt_double(c->risk) << ',' << fmt_double(c->risk_se) << ','
        << fmt_double(c->fit_seconds) << '\n';
  }
  return out.str();
}

std::string rate_report_json(const RateReport& report,
                             const ExperimentConfig& cfg, int indent) {
  json out = json::array();
  for (const auto& rate : report.rates) {
    json cells = json::array();
    for (const auto& c : report.cells) {
      if (c.estimator != rate.estimator) continue;
      json cell{{"n", c.n}, {"rep", c.rep}};
      if (c.failed)
        cell["error"] = c.error;
      else {
        cell["risk"] = c.risk;
        cell["risk_se"] = c.risk_se;
      }
      cells.push_back(std::move(cell));
    }
    json means = json::array();
    for (const auto& mr : rate.mean_risks)
      means.push_back({{"n", mr.n},
                       {"mean_risk", mr.mean},
                       {"se", mr.se},
                       {"replications", mr.replications}});
    json entry{{"estimator", rate.estimator},
               {"reference_exponent", rate.reference_exponent},
               {"means", std::move(means)},
               {"cells", std::move(cells)}};
    if (rate.fit_valid) {
      entry["slope"] = rate.fit.slope;
      entry["slope_se"] = rate.fit.slope_se;
      entry["intercept"] = rate.fit.intercept;
      entry["points_used"] = rate.fit.used_points;
      if (rate.fit.dropped_points > 0)
        entry["warning"] = std::to_string(rate.fit.dropped_points) +
                           " nonpositive risks dropped";
    }
    out.push_back(std::move(entry));
  }
  json wrapped{{"class", json::parse(config_to_json(cfg))["class"]},
               {"master_seed", cfg.master_seed},
               {"report", std::move(out)}};
  if (cfg.target.kind == TargetKind::Jp || cfg.target.kind == TargetKind::Kp) {
    // derived reference quantities for the sparse wavelet classes
    const double p = cfg.target.params.sparsity.p;
    const double beta = cfg.target.params.sparsity.beta;
    wrapped["alpha"] = 1.0 / p - 0.5;
    wrapped["gamma"] = 1.0 / (1.0 + beta);
  }
  wrapped["slope_semantics"] =
      "average-case over the sampler law, not worst-case over the class";
  return wrapped.dump(indent);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace minimax
