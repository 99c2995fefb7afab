#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "minimax/estimators.hpp"
#include "minimax/target_function.hpp"

namespace minimax {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ClassSpec {
  TargetKind kind = TargetKind::Jk;
  ClassParams params;     // k/C for Jk, n_s/C for I0, sparsity (+C3) for Jp/Kp
  int dim = 1;
  int max_level = 6;      // sampler level cap for the wavelet classes
  std::string law = "default";  // sampler law name, recorded in outputs
};

struct EstimatorSpec {
  std::string kind;  // krr | nw | wavelet_threshold | deep_constructive | deep_gd
  // bandwidth policy h = bw_scale * n^{-bw_power} (krr, nw)
  std::string kernel = "laplace";
  double bw_scale = 0.5;
  double bw_power = 1.0 / 3.0;
  // krr regularization: fixed lambda > 0, or cross-validated over the grid
  double lambda = 0.0;
  std::vector<double> lambda_grid;  // empty -> default log grid
  int max_level = -1;               // wavelet_threshold level cap
  ConstructiveBudget budget;        // deep_constructive overrides
  // deep_gd settings
  int epochs = 500;
  double step = 0.1;
  NetworkArch gd_arch{2, 64, 8, 8.0, std::nullopt};
};

struct RiskMethodCfg {
  std::string method = "auto";  // auto | exact | mc
  long mc_points = 100000;
};

struct ExperimentConfig {
  ClassSpec target;
  std::vector<EstimatorSpec> estimators;
  std::vector<long> n_grid;  // strictly increasing
  int replications = 20;
  double sigma = 0.5;
  RiskMethodCfg risk;
  bool fixed_target = true;  // one f° per run vs a fresh f° per replication
  std::uint64_t master_seed = 1;
  std::string out_dir = ".";
  int threads = 1;
  bool timings = false;  // off by default so outputs are byte-reproducible
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

// default n grid {128, 256, ..., 8192}
std::vector<long> default_n_grid();

// draws a target from the configured class
TargetFunction sample_target(const ClassSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Data generation and risk estimation
// ---------------------------------------------------------------------------

// X_i iid uniform on [0,1]^d, xi_i iid N(0, sigma^2), Y = f(X) + xi
Dataset generate_data(const TargetFunction& f, long n, double sigma, Rng& rng);

struct RiskEstimate {
  double risk = 0.0;
  double se = 0.0;          // 0 for the exact path
  std::string method;       // exact | quadrature | mc
};

// ||est - f||_{L2}^2. Exact breakpoint-aware quadrature when both sides have
// piecewise views (d = 1); hinted adaptive quadrature for smooth predictors;
// Monte Carlo otherwise (and as the configured or fallback method).
RiskEstimate estimate_l2_risk(const FittedEstimator& est,
                              const TargetFunction& f,
                              const RiskMethodCfg& cfg,
                              std::uint64_t mc_seed);

// ---------------------------------------------------------------------------
// Rate fitting and reference curves
// ---------------------------------------------------------------------------

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  int used_points = 0;
  int dropped_points = 0;  // nonpositive risks dropped with a warning
};

// ordinary least squares of ln(risk) on ln(n); needs >= 4 usable points
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct ReferenceCurve {
  std::string label;      // includes "shape only": constants are unit
  double exponent;        // n^exponent
  double log_power;       // times (ln n)^log_power
  std::vector<double> values;
};

std::vector<ReferenceCurve> reference_curves(const ClassSpec& spec,
                                             std::span<const long> n_grid);

// reference exponent an estimator kind is compared against on this class
double reference_exponent(const ClassSpec& spec, const std::string& kind);

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepCell {
  std::string estimator;
  long n = 0;
  int rep = 0;
  double risk = 0.0;
  double risk_se = 0.0;
  double fit_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct MeanRisk {
  long n = 0;
  double mean = 0.0;
  double se = 0.0;  // standard error across replications
  int replications = 0;
};

struct EstimatorRate {
  std::string estimator;
  RateFit fit;
  double reference_exponent = 0.0;
  bool fit_valid = false;
  std::vector<MeanRisk> mean_risks;
};

struct RateReport {
  std::vector<SweepCell> cells;
  std::vector<EstimatorRate> rates;
};

// Runs the full (n, replication, estimator) grid. Cells are independent
// tasks keyed by their indices; per-cell seeds derive from the master seed
// and the key only, so results are identical for any thread count. Per-cell
// failures are recorded and excluded from the slope fits.
RateReport run_sweep(const ExperimentConfig& cfg);

// CSV with the fixed column order estimator,n,rep,risk,risk_se,fit_seconds
std::string sweep_csv(const RateReport& report);

// one JSON object per estimator with slope, slope_se, reference exponent
// and the per-cell table
std::string rate_report_json(const RateReport& report,
                             const ExperimentConfig& cfg, int indent = 2);

// deterministic helper: runs fn(0..count-1) on `threads` workers
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace minimax
