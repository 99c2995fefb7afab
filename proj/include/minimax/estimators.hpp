#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minimax/relu_net.hpp"
#include "minimax/target_function.hpp"

namespace minimax {

struct DatasetMeta {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string target_id;
};

// n input-output pairs with X in [0,1]^d
struct Dataset {
  Eigen::MatrixXd xs;  // n x d
  Eigen::VectorXd ys;  // n
  DatasetMeta meta;

  int n() const { return static_cast<int>(xs.rows()); }
  int dim() const { return static_cast<int>(xs.cols()); }
  std::vector<double> row(int i) const;
};

// positive semidefinite kernel on [0,1]^d
struct Kernel {
  std::string name;
  std::function<double(std::span<const double>, std::span<const double>)> k;
  double bandwidth = 1.0;

  // exp(-||x - x'||^2 / (2 h^2))
  static Kernel gaussian(double h);
  // exp(-||x - x'||_2 / h); in d = 1 this is the Ornstein-Uhlenbeck kernel,
  // whose Gram inverse is tridiagonal, giving an exact O(n) ridge solve
  static Kernel laplace(double h);
  // k == 1 (constant kernel)
  static Kernel constant();
  static Kernel custom(
      std::string name,
      std::function<double(std::span<const double>, std::span<const double>)>
          k);
};

// Fitted estimator: kind tag, evaluatable predictor, diagnostics. For linear
// kinds the dual coefficients and training inputs are retained, which both
// exposes the weight-functional identity and serializes the predictor.
struct FittedEstimator {
  std::string kind;
  std::function<double(std::span<const double>)> predict;
  std::optional<PiecewiseLinear> piecewise;  // exact d = 1 view if available
  std::vector<double> quad_hints;  // sorted breakpoints for smooth predictors
  bool linear_in_y = false;
  double training_risk = 0.0;
  std::map<std::string, double> info;  // hyperparameters and diagnostics
  std::vector<double> dual;            // alpha for kernel estimators
  std::vector<double> train_x;         // d = 1 training inputs (sorted)

  double predict1(double x) const {
    return predict(std::span<const double>(&x, 1));
  }
};

std::string estimator_to_json(const FittedEstimator& est, int indent = -1);

// f_hat(x) = k(x, X)(K + lambda I)^{-1} Y, solved exactly. The laplace
// kernel in d = 1 uses the tridiagonal precision route; everything else
// uses a dense symmetric solve. Reports a condition estimate.
FittedEstimator kernel_ridge(const Dataset& data, const Kernel& kernel,
                             double lambda);

struct KrrCv {
  double lambda = 0.0;
  std::vector<std::pair<double, double>> table;  // (lambda, cv mse)
};

// k-fold cross-validation over a lambda grid (strided fold assignment,
// deterministic); ties resolve to the larger lambda
KrrCv kernel_ridge_cv(const Dataset& data, const Kernel& kernel,
                      std::span<const double> lambda_grid, int folds = 5);

// locally weighted average with a box window; empty windows fall back to
// the global mean, keeping the estimator total and linear in Y
FittedEstimator nadaraya_watson(const Dataset& data, double bandwidth);

// empirical coefficients (1/n) sum Y_i psi_{k,l}(X_i) for levels <= max_level
// hard-thresholded at tau (default sigma sqrt(2 ln n / n)), plus the
// empirical mean as an unthresholded scaling term; d = 1
FittedEstimator wavelet_threshold(const Dataset& data,
                                  const DyadicWavelet& wavelet, int max_level,
                                  std::optional<double> tau = std::nullopt);

// restricted empirical risk minimization over a constructed ramp dictionary:
// atom selection + exact least squares on the outer coefficients, clipped
// at the class sup bound
struct ClassHint {
  TargetKind kind = TargetKind::Jk;
  ClassParams params;
  double sup_bound = 1.0;  // F used for clipping
};

struct ConstructiveBudget {
  int n_atoms = 0;        // jump budget (Jk/I0) or kept-coefficient count N
  int max_level = -1;     // dictionary level cap m (Jp/Kp); -1 = auto
  double ramp_width = 0;  // w; 0 = auto
};

FittedEstimator erm_deep_constructive(const Dataset& data,
                                      const ClassHint& hint,
                                      const ConstructiveBudget& budget = {});

// full-parameter gradient descent on the squared loss with magnitude
// clipping to B after every step and magnitude pruning to S at the end;
// comparison baseline only, not guaranteed to reach the ERM
FittedEstimator erm_deep_gd(const Dataset& data, const NetworkArch& arch,
                            int epochs, double step, std::uint64_t seed);

// loss and analytic gradient of the mean squared error at the current
// parameters (exposed for the finite-difference check)
struct GdGradient {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> dv;
};
GdGradient gd_gradient(const ReluNetwork& net, const Dataset& data);

// (1/n) sum (est(X_i) - Y_i)^2
double empirical_risk(const FittedEstimator& est, const Dataset& data);

}  // namespace minimax
