// sparse-minimax: nonparametric-regression rate benchmarking CLI
//
// subcommands:
//   gen      sample a target function and a dataset from a config
//   run      full sweep: fit estimators over the n grid, emit CSV/JSON/SVG
//   rates    refit log-log slopes from an existing results CSV
//   verify   run the diagnostic checks, exit 0 iff all pass
//   entropy  evaluate the covering-entropy calculators
//   plot     render a log-log SVG chart from a results CSV

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "minimax/diagnostics.hpp"
#include "minimax/harness.hpp"
#include "minimax/relu_net.hpp"
#include "minimax/svg_plot.hpp"

using namespace minimax;
using nlohmann::json;

namespace {

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

ExperimentConfig load_config(const std::string& path,
                             std::uint64_t seed_override, int threads_override,
                             const std::string& out_dir) {
  auto cfg = config_from_json(read_text_file(path));
  if (seed_override != 0) cfg.master_seed = seed_override;
  if (threads_override > 0) cfg.threads = threads_override;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cfg;
}

struct SeriesData {
  std::map<std::string, std::map<long, std::pair<double, int>>> sums;
  void add(const std::string& est, long n, double risk) {
    auto& cell = sums[est][n];
    cell.first += risk;
    cell.second += 1;
  }
};

SeriesData parse_csv(const std::string& text) {
  SeriesData out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string est, n_s, rep_s, risk_s;
    std::getline(row, est, ',');
    std::getline(row, n_s, ',');
    std::getline(row, rep_s, ',');
    std::getline(row, risk_s, ',');
    out.add(est, std::stol(n_s), std::stod(risk_s));
  }
  return out;
}

int cmd_run(const ExperimentConfig& cfg) {
  const auto dir = ensure_dir(cfg.out_dir);
  const auto report = run_sweep(cfg);
  write_text_file((dir / "results.csv").string(), sweep_csv(report));
  write_text_file((dir / "rate_report.json").string(),
                  rate_report_json(report, cfg));
  // plot with reference curves
  std::vector<PlotSeries> series;
  for (const auto& rate : report.rates) {
    PlotSeries s;
    s.label = rate.estimator;
    for (const auto& mr : rate.mean_risks)
      s.points.push_back({static_cast<double>(mr.n), mr.mean});
    if (rate.fit_valid) {
      s.has_fit = true;
      s.slope = rate.fit.slope;
      s.intercept = rate.fit.intercept;
    }
    series.push_back(std::move(s));
  }
  std::vector<PlotCurve> curves;
  for (const auto& ref : reference_curves(cfg.target, cfg.n_grid)) {
    PlotCurve c;
    c.label = ref.label;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i)
      c.points.push_back(
          {static_cast<double>(cfg.n_grid[i]), ref.values[i]});
    curves.push_back(std::move(c));
  }
  write_text_file((dir / "plot.svg").string(),
                  render_loglog_svg("L2 risk vs n", series, curves));
  for (const auto& rate : report.rates) {
    std::cout << rate.estimator << ": ";
    if (rate.fit_valid)
      std::cout << "slope " << rate.fit.slope << " +- " << rate.fit.slope_se
                << " (reference exponent " << rate.reference_exponent << ")";
    else
      std::cout << "slope unavailable";
    std::cout << '\n';
  }
  std::cout << "wrote " << (dir / "results.csv").string() << ", "
            << (dir / "rate_report.json").string() << ", "
            << (dir / "plot.svg").string() << '\n';
  return 0;
}

int cmd_gen(const ExperimentConfig& cfg, long n) {
  const auto dir = ensure_dir(cfg.out_dir);
  Rng trng(derive_seed(cfg.master_seed, "target"));
  const auto target = sample_target(cfg.target, trng);
  Rng drng(derive_seed(cfg.master_seed, "data", 0, 0));
  const auto data = generate_data(target, n, cfg.sigma, drng);
  write_text_file((dir / "target.json").string(),
                  target_to_json(target, 2));
  std::ostringstream csv;
  csv << "y";
  for (int c = 0; c < data.dim(); ++c) csv << ",x" << c;
  csv << '\n';
  char buf[40];
  for (int i = 0; i < data.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", data.ys(i));
    csv << buf;
    for (int c = 0; c < data.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.xs(i, c));
      csv << ',' << buf;
    }
    csv << '\n';
  }
  write_text_file((dir / "data.csv").string(), csv.str());
  std::cout << "wrote " << (dir / "target.json").string() << " and "
            << (dir / "data.csv").string() << " (n = " << n << ")\n";
  return 0;
}

int cmd_rates(const std::string& csv_path, const ExperimentConfig* cfg) {
  const auto data = parse_csv(read_text_file(csv_path));
  json out = json::array();
  for (const auto& [est, by_n] : data.sums) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, cell] : by_n)
      pts.push_back({static_cast<double>(n), cell.first / cell.second});
    json entry{{"estimator", est}};
    try {
      const auto fit = fit_rate(pts);
      entry["slope"] = fit.slope;
      entry["slope_se"] = fit.slope_se;
      entry["intercept"] = fit.intercept;
    } catch (const std::exception& ex) {
      entry["error"] = ex.what();
    }
    if (cfg)
      entry["reference_exponent"] = reference_exponent(cfg->target, est);
    out.push_back(std::move(entry));
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_verify(const std::string& which, std::uint64_t seed,
               const std::string& out_dir, const ExperimentConfig* cfg) {
  const auto dir = ensure_dir(out_dir.empty() ? "." : out_dir);
  bool all_pass = true;
  auto emit = [&](const CheckReport& rep) {
    all_pass = all_pass && rep.pass;
    const std::string path = (dir / (rep.name + ".json")).string();
    write_text_file(path, check_report_json(rep));
    std::cout << (rep.pass ? "PASS " : "FAIL ") << rep.name
              << "  statistic=" << rep.statistic
              << "  tolerance=" << rep.tolerance << '\n';
  };
  const bool all = which.empty() || which == "all";
  // target pairs come from the configured class when a config is given
  auto draw_pair = [&](Rng& rng, int default_k, double default_C) {
    if (cfg) {
      return std::make_pair(sample_target(cfg->target, rng),
                            sample_target(cfg->target, rng));
    }
    return std::make_pair(sample_jk(default_k, default_C, rng),
                          sample_jk(default_k, default_C, rng));
  };
  const double sigma = cfg ? cfg->sigma : 1.0;

  if (all || which == "kl") {
    Rng rng(derive_seed(seed, "verify_kl"));
    auto [f, g] = draw_pair(rng, 2, 1.5);
    auto rep = kl_identity_check(f, g, sigma, 200000, rng);
    rep.seed = seed;
    emit(rep);
  }
  if (all || which == "convexity") {
    Rng rng(derive_seed(seed, "verify_convexity"));
    auto [f, g] = draw_pair(rng, 1, 1.0);
    auto builder = [](const Dataset& d) {
      return kernel_ridge(d, Kernel::laplace(0.15), 0.5);
    };
    const std::vector<double> ts{0.25, 0.5, 0.75};
    auto rep = linear_convexity_check(builder, f, g, ts, 512, 200, rng);
    rep.seed = seed;
    emit(rep);
  }
  if (all || which == "bins") {
    Rng rng(derive_seed(seed, "verify_bins"));
    auto rep = bin_concentration_check(4096, 0.5, bin_tail_constant(0.5), 10000,
                                       rng);
    rep.seed = seed;
    emit(rep);
  }
  if (all || which == "packing") {
    for (int k : {6, 8, 10, 12, 14}) {
      auto rep = hypercube_packing_demo(k, 0.5);
      rep.seed = seed;
      rep.name = "hypercube_packing_k" + std::to_string(k);
      emit(rep);
    }
  }
  if (all || which == "cover") {
    auto rep = quantized_cover_check(10000, 1.0, 1.0, 1.0);
    rep.seed = seed;
    emit(rep);
  }
  return all_pass ? 0 : 1;
}

int cmd_entropy(long S, int L, int D, double B, double delta, int N, int d) {
  NetworkArch arch{L, S, D, B, std::nullopt};
  json out{{"covering_entropy", covering_entropy_bound(arch, delta)},
           {"S", S},
           {"L", L},
           {"D", D},
           {"B", B},
           {"delta", delta}};
  if (N > 0) {
    out["N"] = N;
    out["d"] = d;
    out["shared_entropy"] = shared_entropy_bound(arch, N, d, delta);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path,
             const ExperimentConfig* cfg) {
  const auto data = parse_csv(read_text_file(csv_path));
  std::vector<PlotSeries> series;
  for (const auto& [est, by_n] : data.sums) {
    PlotSeries s;
    s.label = est;
    for (const auto& [n, cell] : by_n)
      s.points.push_back({static_cast<double>(n), cell.first / cell.second});
    if (s.points.size() >= 4) {
      try {
        const auto fit = fit_rate(s.points);
        s.has_fit = true;
        s.slope = fit.slope;
        s.intercept = fit.intercept;
      } catch (const std::exception&) {
      }
    }
    series.push_back(std::move(s));
  }
  std::vector<PlotCurve> curves;
  if (cfg) {
    for (const auto& ref : reference_curves(cfg->target, cfg->n_grid)) {
      PlotCurve c;
      c.label = ref.label;
      for (std::size_t i = 0; i < cfg->n_grid.size(); ++i)
        c.points.push_back(
            {static_cast<double>(cfg->n_grid[i]), ref.values[i]});
      curves.push_back(std::move(c));
    }
  }
  write_text_file(out_path, render_loglog_svg("L2 risk vs n", series, curves));
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-minimax: rate benchmarking for sparse target classes"};
  app.require_subcommand(1);

  std::string config_path, out_dir, csv_path, out_path, check_name;
  std::uint64_t seed = 0;
  int threads = 0;
  long gen_n = 256;

  auto* gen = app.add_subcommand("gen", "sample a target and a dataset");
  gen->add_option("--config", config_path)->required();
  gen->add_option("--seed", seed);
  gen->add_option("--out-dir", out_dir);
  gen->add_option("--n", gen_n);

  auto* run = app.add_subcommand("run", "run the full sweep");
  run->add_option("--config", config_path)->required();
  run->add_option("--seed", seed);
  run->add_option("--out-dir", out_dir);
  run->add_option("--threads", threads);

  auto* rates = app.add_subcommand("rates", "refit slopes from a results CSV");
  rates->add_option("--csv", csv_path)->required();
  rates->add_option("--config", config_path);

  auto* verify = app.add_subcommand("verify", "run the diagnostic checks");
  verify->add_option("--check", check_name,
                     "kl | convexity | bins | packing | cover | all");
  verify->add_option("--config", config_path);
  verify->add_option("--seed", seed);
  verify->add_option("--out-dir", out_dir);

  long e_S = 10;
  int e_L = 2, e_D = 4, e_N = 0, e_d = 1;
  double e_B = 1.0, e_delta = 0.1;
  auto* entropy = app.add_subcommand("entropy", "entropy-bound calculators");
  entropy->add_option("--S", e_S);
  entropy->add_option("--L", e_L);
  entropy->add_option("--D", e_D);
  entropy->add_option("--B", e_B);
  entropy->add_option("--delta", e_delta);
  entropy->add_option("--N", e_N, "N-sharing size (0 = covering bound only)");
  entropy->add_option("--d", e_d);

  auto* plot = app.add_subcommand("plot", "render an SVG from a results CSV");
  plot->add_option("--csv", csv_path)->required();
  plot->add_option("--out", out_path)->required();
  plot->add_option("--config", config_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen(load_config(config_path, seed, 0, out_dir), gen_n);
    if (run->parsed())
      return cmd_run(load_config(config_path, seed, threads, out_dir));
    if (rates->parsed()) {
      ExperimentConfig cfg;
      const bool have_cfg = !config_path.empty();
      if (have_cfg) cfg = load_config(config_path, 0, 0, "");
      return cmd_rates(csv_path, have_cfg ? &cfg : nullptr);
    }
    if (verify->parsed()) {
      ExperimentConfig cfg;
      const bool have_cfg = !config_path.empty();
      if (have_cfg) cfg = load_config(config_path, 0, 0, "");
      return cmd_verify(check_name, seed == 0 ? 1 : seed, out_dir,
                        have_cfg ? &cfg : nullptr);
    }
    if (entropy->parsed())
      return cmd_entropy(e_S, e_L, e_D, e_B, e_delta, e_N, e_d);
    if (plot->parsed()) {
      ExperimentConfig cfg;
      const bool have_cfg = !config_path.empty();
      if (have_cfg) cfg = load_config(config_path, 0, 0, "");
      return cmd_plot(csv_path, out_path, have_cfg ? &cfg : nullptr);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
