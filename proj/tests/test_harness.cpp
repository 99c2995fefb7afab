#include <cmath>
#include <vector>

#include "doctest.h"
#include "minimax/harness.hpp"
#include "minimax/svg_plot.hpp"

using namespace minimax;

TEST_SUITE_BEGIN("harness");

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.target.kind = TargetKind::Jk;
  cfg.target.params.k = 2;
  cfg.target.params.C = 2.0;
  EstimatorSpec deep;
  deep.kind = "deep_constructive";
  EstimatorSpec krr;
  krr.kind = "krr";
  krr.lambda = 1.0;  // fixed lambda keeps the unit test quick
  cfg.estimators = {deep, krr};
  cfg.n_grid = {32, 64, 128, 256};
  cfg.replications = 3;
  cfg.sigma = 0.4;
  cfg.master_seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("generate_data: degenerate noise, moments, determinism") {
  Rng rng(12001);
  auto f = sample_jk(2, 1.5, rng);

  // near-zero noise reproduces the target values
  Rng r1(5);
  auto d = generate_data(f, 200, 1e-12, r1);
  for (int i = 0; i < d.n(); ++i)
    CHECK(std::abs(d.ys(i) - f.eval1(d.xs(i, 0))) <= 1e-9);

  // CLT check on the noise mean at n = 10^6
  Rng r2(6);
  const long big = 1000000;
  auto dn = generate_data(f, big, 1.0, r2);
  double acc = 0.0;
  for (long i = 0; i < big; ++i) acc += dn.ys(i) - f.eval1(dn.xs(i, 0));
  const double mean = acc / static_cast<double>(big);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(big)));

  // identical seeds give bit-identical datasets
  Rng ra(7), rb(7);
  auto da = generate_data(f, 50, 0.3, ra);
  auto db = generate_data(f, 50, 0.3, rb);
  for (int i = 0; i < 50; ++i) {
    CHECK(da.xs(i, 0) == db.xs(i, 0));
    CHECK(da.ys(i) == db.ys(i));
  }
}

TEST_CASE("estimate_l2_risk: exact cases") {
  Rng rng(12002);
  auto f = sample_jk(3, 2.0, rng);
  RiskMethodCfg cfg;

  // the target itself has zero risk
  FittedEstimator self;
  self.kind = "truth";
  self.piecewise = *f.piecewise();
  self.predict = [&](std::span<const double> x) { return f.eval(x); };
  CHECK(estimate_l2_risk(self, f, cfg, 1).risk == doctest::Approx(0.0));

  // zero predictor vs sqrt(2) 1_{[1/2,1]}: integral of 2 over [1/2,1] is 1
  auto step = TargetFunction::jk(
      PiecewiseConstantFn::make(0.0, {{0.5, std::sqrt(2.0)}}), 1, 2.0);
  FittedEstimator zero;
  zero.kind = "zero";
  zero.piecewise = PiecewiseLinear();
  zero.predict = [](std::span<const double>) { return 0.0; };
  const auto est = estimate_l2_risk(zero, step, cfg, 1);
  CHECK(est.method == "exact");
  CHECK(est.risk == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate_l2_risk: MC agrees with exact within 3 SE") {
  Rng rng(12003);
  RiskMethodCfg exact_cfg;
  RiskMethodCfg mc_cfg;
  mc_cfg.method = "mc";
  mc_cfg.mc_points = 20000;
  int within = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    auto f = sample_jk(3, 2.0, rng);
    auto g = sample_jk(3, 2.0, rng);
    FittedEstimator gp;
    gp.piecewise = *g.piecewise();
    gp.predict = [&](std::span<const double> x) { return g.eval(x); };
    const double exact = estimate_l2_risk(gp, f, exact_cfg, 0).risk;
    const auto mc = estimate_l2_risk(gp, f, mc_cfg, 1000 + trial);
    if (std::abs(mc.risk - exact) <= 3.0 * mc.se + 1e-12) ++within;
  }
  CHECK(within >= trials - 2);  // 3 SE misses are rare but possible
}

TEST_CASE("fit_rate recovers exact and perturbed slopes") {
  std::vector<std::pair<double, double>> pts;
  for (long n : {100, 200, 400, 800, 1600})
    pts.push_back({double(n), 3.0 / double(n)});
  auto fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));

  pts.clear();
  for (long n : {100, 200, 400, 800})
    pts.push_back({double(n), 5.0 * std::pow(double(n), -0.5)});
  fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));

  // scale invariance: rescaling risks shifts only the intercept
  std::vector<std::pair<double, double>> scaled = pts;
  for (auto& [n, r] : scaled) r *= 7.3;
  auto fit2 = fit_rate(scaled);
  CHECK(fit2.slope == doctest::Approx(fit.slope).epsilon(1e-12));
  CHECK(fit2.intercept ==
        doctest::Approx(fit.intercept + std::log(7.3)).epsilon(1e-10));

  // synthetic noisy slopes are recovered within the reported standard error
  Rng rng(12004);
  int covered = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const double slope = rng.uniform(-1.2, -0.3);
    std::vector<std::pair<double, double>> noisy;
    for (long n : {128, 256, 512, 1024, 2048, 4096}) {
      const double lr = slope * std::log(double(n)) + rng.normal() * 0.05;
      noisy.push_back({double(n), std::exp(lr)});
    }
    auto f = fit_rate(noisy);
    if (std::abs(f.slope - slope) <= 3.0 * f.slope_se) ++covered;
  }
  CHECK(covered >= 90);  // ~99% coverage expected at 3 SE

  CHECK_THROWS(fit_rate(std::vector<std::pair<double, double>>{
      {10.0, 1.0}, {20.0, 0.5}, {40.0, 0.2}}));
}

TEST_CASE("reference curves carry the right exponents") {
  ClassSpec jk;
  jk.kind = TargetKind::Jk;
  jk.params.k = 3;
  jk.params.C = 2.0;
  const auto grid = default_n_grid();
  auto curves = reference_curves(jk, grid);
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].exponent == doctest::Approx(-1.0));
  CHECK(curves[1].exponent == doctest::Approx(-1.0));
  CHECK(curves[1].log_power == doctest::Approx(3.0));
  CHECK(curves[2].exponent == doctest::Approx(-0.5));

  ClassSpec jp;
  jp.kind = TargetKind::Jp;
  jp.params.sparsity = {2.0 / 3.0, 1.0, 1.0, 1.0};
  auto jpc = reference_curves(jp, grid);
  // alpha = 1, deep exponent -2/3; beta = 1, linear floor -1/2
  CHECK(jpc[1].exponent == doctest::Approx(-2.0 / 3.0));
  CHECK(jpc[2].exponent == doctest::Approx(-0.5));

  // deep beats linear exactly when p < 1
  for (double p : {0.5, 0.8, 0.99, 1.01, 1.5}) {
    ClassSpec s;
    s.kind = TargetKind::Jp;
    s.params.sparsity = {p, 1.0, 1.0, 1.0};
    const double deep = reference_exponent(s, "deep_constructive");
    const double lin = reference_exponent(s, "krr");
    if (p < 1.0)
      CHECK(deep < lin);
    else
      CHECK(deep >= lin - 1e-12);
  }
}

TEST_CASE("run_sweep: determinism across runs and thread counts") {
  auto cfg = small_config();
  cfg.threads = 1;
  auto rep1 = run_sweep(cfg);
  auto rep2 = run_sweep(cfg);
  cfg.threads = 8;
  auto rep8 = run_sweep(cfg);
  const std::string csv1 = sweep_csv(rep1);
  CHECK(csv1 == sweep_csv(rep2));
  CHECK(csv1 == sweep_csv(rep8));
  CHECK(rate_report_json(rep1, cfg) == rate_report_json(rep8, cfg));
  // risks are nonnegative
  for (const auto& cell : rep1.cells) {
    CHECK_FALSE(cell.failed);
    CHECK(cell.risk >= 0.0);
  }
}

TEST_CASE("run_sweep: near-noiseless in-dictionary target has tiny risk") {
  ExperimentConfig cfg;
  cfg.target.kind = TargetKind::Jk;
  cfg.target.params.k = 1;
  cfg.target.params.C = 2.0;
  EstimatorSpec deep;
  deep.kind = "deep_constructive";
  cfg.estimators = {deep};
  cfg.n_grid = {512};
  cfg.replications = 1;
  cfg.sigma = 1e-9;
  cfg.master_seed = 3;
  auto rep = run_sweep(cfg);
  REQUIRE(rep.cells.size() == 1);
  CHECK_FALSE(rep.cells[0].failed);
  // the dominant error is the jump-location displacement to the nearest
  // data midpoint, of order C^2 / n; the seed is fixed so this is stable
  CHECK(rep.cells[0].risk <= 20.0 * 4.0 / 512.0);

  // with the jump exactly on a data midpoint the risk collapses to the
  // ramp mass: fit directly on grid-placed data
  {
    const int n = 512;
    Dataset d;
    d.xs.resize(n, 1);
    d.ys.resize(n);
    const double jump = (255 + 0.75) / 512.0;  // midpoint between data points
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.25) / n;
      d.xs(i, 0) = x;
      d.ys(i) = x >= jump ? 1.5 : 0.0;
    }
    ClassHint hint{TargetKind::Jk, {}, 2.0};
    hint.params.k = 1;
    hint.params.C = 2.0;
    auto est = erm_deep_constructive(d, hint, {});
    auto truth = TargetFunction::jk(
        PiecewiseConstantFn::make(0.0, {{jump, 1.5}}), 1, 2.0);
    RiskMethodCfg rcfg;
    const double risk = estimate_l2_risk(est, truth, rcfg, 0).risk;
    // ramp width is min(0.25/n, 0.45 gap); error <= h^2 w / 3
    const double w = 0.25 / n;
    CHECK(risk <= 1.5 * 1.5 * w / 3.0 + 1e-12);
  }
}

TEST_CASE("run_sweep: replication scaling of the standard error") {
  auto base = small_config();
  base.n_grid = {256};
  base.estimators.resize(1);  // deep only, keep it fast
  base.replications = 12;
  auto rep1 = run_sweep(base);
  base.replications = 24;
  base.master_seed = 100;  // independent draw
  auto rep2 = run_sweep(base);
  auto se2_of = [](const RateReport& r, int expect) {
    double mean = 0.0;
    int cnt = 0;
    for (const auto& c : r.cells) {
      mean += c.risk;
      ++cnt;
    }
    mean /= cnt;
    double var = 0.0;
    for (const auto& c : r.cells) var += (c.risk - mean) * (c.risk - mean);
    var /= (cnt - 1);
    CHECK(cnt == expect);
    return var / cnt;
  };
  const double a = se2_of(rep1, 12);
  const double b = se2_of(rep2, 24);
  // doubling R should halve the squared SE within a generous factor
  CHECK(b <= a * 2.0);
  CHECK(b >= a / 8.0);
}

TEST_CASE("per-cell failures are recorded and excluded, run continues") {
  auto cfg = small_config();
  cfg.n_grid = {32, 64, 96, 128};
  cfg.replications = 2;
  EstimatorSpec bogus;
  bogus.kind = "not_an_estimator";
  cfg.estimators.push_back(bogus);
  auto rep = run_sweep(cfg);
  int failed = 0, ok = 0;
  for (const auto& cell : rep.cells) {
    if (cell.failed) {
      ++failed;
      CHECK(cell.estimator == "not_an_estimator");
      CHECK(cell.error.find("unknown estimator") != std::string::npos);
    } else {
      ++ok;
    }
  }
  CHECK(failed == 8);  // every bogus cell
  CHECK(ok == 16);     // both real estimators unaffected
  // failed cells never reach the CSV but appear in the JSON with the error
  const std::string csv = sweep_csv(rep);
  CHECK(csv.find("not_an_estimator") == std::string::npos);
  const std::string js = rate_report_json(rep, cfg);
  CHECK(js.find("unknown estimator") != std::string::npos);
  // the healthy estimators still get slope fits
  for (const auto& rate : rep.rates) {
    if (rate.estimator == "not_an_estimator")
      CHECK_FALSE(rate.fit_valid);
    else
      CHECK(rate.fit_valid);
  }
}

TEST_CASE("sweep smoke: gradient-descent estimator and the I0 class") {
  ExperimentConfig cfg;
  cfg.target.kind = TargetKind::I0;
  cfg.target.params.n_s = 2;
  cfg.target.params.C = 2.0;
  EstimatorSpec deep;
  deep.kind = "deep_constructive";
  EstimatorSpec gd;
  gd.kind = "deep_gd";
  gd.epochs = 15;
  gd.step = 0.1;
  gd.gd_arch = {1, 64, 4, 4.0, std::nullopt};
  cfg.estimators = {deep, gd};
  cfg.n_grid = {32, 48, 64, 96};
  cfg.replications = 1;
  cfg.sigma = 0.4;
  cfg.master_seed = 21;
  auto rep = run_sweep(cfg);
  for (const auto& cell : rep.cells) {
    CHECK_FALSE(cell.failed);
    CHECK(cell.risk >= 0.0);
    CHECK(std::isfinite(cell.risk));
  }
}

TEST_CASE("sweep smoke in d = 2: MC risk path and dense KRR") {
  ExperimentConfig cfg;
  cfg.target.kind = TargetKind::I0;
  cfg.target.dim = 2;
  cfg.target.params.n_s = 1;
  cfg.target.params.C = 2.0;
  EstimatorSpec krr;
  krr.kind = "krr";
  krr.kernel = "gaussian";
  krr.lambda = 1.0;
  EstimatorSpec nw;
  nw.kind = "nw";
  nw.bw_scale = 0.4;
  nw.bw_power = 0.25;
  cfg.estimators = {krr, nw};
  cfg.n_grid = {32, 48, 64, 80};
  cfg.replications = 1;
  cfg.sigma = 0.4;
  cfg.risk.mc_points = 2000;
  cfg.master_seed = 22;
  auto rep = run_sweep(cfg);
  for (const auto& cell : rep.cells) {
    CHECK_FALSE(cell.failed);
    CHECK(cell.risk >= 0.0);
    CHECK(cell.risk_se > 0.0);  // the d = 2 path is Monte Carlo
  }
}

TEST_CASE("infeasible sampler bounds are reported") {
  Rng rng(12010);
  // |a| <= C and |a|^{-1} <= C cannot both hold when C < 1
  const auto phis = make_phi_set({haar_jump_base(1)});
  CHECK_THROWS(sample_i0(1, 0.5, phis, rng, 50));
}

TEST_CASE("CSV schema and JSON report fields") {
  auto cfg = small_config();
  cfg.n_grid = {32, 64, 96, 128};
  cfg.replications = 2;
  auto rep = run_sweep(cfg);
  const std::string csv = sweep_csv(rep);
  CHECK(csv.rfind("estimator,n,rep,risk,risk_se,fit_seconds\n", 0) == 0);
  // timings are off by default, so the column is exactly zero
  CHECK(csv.find(",0\n") != std::string::npos);
  const std::string js = rate_report_json(rep, cfg);
  CHECK(js.find("\"estimator\"") != std::string::npos);
  CHECK(js.find("\"slope\"") != std::string::npos);
  CHECK(js.find("\"slope_se\"") != std::string::npos);
  CHECK(js.find("\"reference_exponent\"") != std::string::npos);
  CHECK(js.find("\"cells\"") != std::string::npos);
  // per-(estimator, n) means with standard errors across replications
  CHECK(js.find("\"means\"") != std::string::npos);
  CHECK(js.find("\"mean_risk\"") != std::string::npos);
  CHECK(js.find("\"se\"") != std::string::npos);

  // the wavelet classes also report the derived alpha and gamma
  ExperimentConfig jp = cfg;
  jp.target.kind = TargetKind::Jp;
  jp.target.params.sparsity = {2.0 / 3.0, 1.0, 1.0, 1.0};
  jp.estimators.resize(1);
  auto repjp = run_sweep(jp);
  const std::string jsjp = rate_report_json(repjp, jp);
  CHECK(jsjp.find("\"alpha\": 1.0") != std::string::npos);
  CHECK(jsjp.find("\"gamma\": 0.5") != std::string::npos);
}

TEST_CASE("config JSON round trip") {
  auto cfg = small_config();
  auto text = config_to_json(cfg);
  auto back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK_THROWS(config_from_json(R"({"class":{"kind":"jk","k":1,"C":1.0},
    "estimators":[{"kind":"krr"}], "n_grid":[64, 32], "sigma":0.5})"));
}

TEST_CASE("svg plot renders a self-contained chart") {
  PlotSeries s;
  s.label = "deep";
  s.points = {{128, 0.1}, {256, 0.05}, {512, 0.024}};
  s.has_fit = true;
  s.slope = -1.0;
  s.intercept = std::log(0.1 * 128);
  PlotCurve c;
  c.label = "reference";
  c.points = {{128, 0.08}, {512, 0.02}};
  const std::string svg = render_loglog_svg("test", {s}, {c});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("circle") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_SUITE_END();
