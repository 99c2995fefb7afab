#include "minimax/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "minimax/rng.hpp"

namespace minimax {

using nlohmann::json;

std::vector<double> Dataset::row(int i) const {
  std::vector<double> out(static_cast<std::size_t>(dim()));
  for (int c = 0; c < dim(); ++c)
    out[static_cast<std::size_t>(c)] = xs(i, c);
  return out;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

namespace {
double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}
}  // namespace

Kernel Kernel::gaussian(double h) {
  Kernel out;
  out.name = "gaussian";
  out.bandwidth = h;
  out.k = [h](std::span<const double> a, std::span<const double> b) {
    return std::exp(-sq_dist(a, b) / (2.0 * h * h));
  };
  return out;
}

Kernel Kernel::laplace(double h) {
  Kernel out;
  out.name = "laplace";
  out.bandwidth = h;
  out.k = [h](std::span<const double> a, std::span<const double> b) {
    return std::exp(-std::sqrt(sq_dist(a, b)) / h);
  };
  return out;
}

Kernel Kernel::constant() {
  Kernel out;
  out.name = "constant";
  out.k = [](std::span<const double>, std::span<const double>) { return 1.0; };
  return out;
}

Kernel Kernel::custom(
    std::string name,
    std::function<double(std::span<const double>, std::span<const double>)>
        k) {
  Kernel out;
  out.name = std::move(name);
  out.k = std::move(k);
  return out;
}

// ---------------------------------------------------------------------------
// Kernel ridge regression
// ---------------------------------------------------------------------------

namespace {

FittedEstimator krr_dense(const Dataset& data, const Kernel& kernel,
                          double lambda) {
  const int n = data.n();
  Eigen::MatrixXd K(n, n);
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rows.push_back(data.row(i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) K(i, j) = K(j, i) = kernel.k(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd M = K;
  M.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("kernel_ridge: decomposition failed");
  Eigen::VectorXd alpha = solver.solve(data.ys);
  const double rcond = solver.rcond();

  FittedEstimator est;
  est.kind = "krr";
  est.linear_in_y = true;
  est.info["lambda"] = lambda;
  est.info["bandwidth"] = kernel.bandwidth;
  est.info["rcond"] = rcond;
  if (rcond < 1e-12) est.info["ill_conditioned"] = 1.0;
  est.dual.assign(alpha.data(), alpha.data() + n);
  auto shared_rows =
      std::make_shared<std::vector<std::vector<double>>>(std::move(rows));
  auto shared_alpha = std::make_shared<Eigen::VectorXd>(std::move(alpha));
  auto kfun = kernel.k;
  est.predict = [shared_rows, shared_alpha,
                 kfun](std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < shared_rows->size(); ++i)
      acc += (*shared_alpha)(static_cast<Eigen::Index>(i)) *
             kfun(x, (*shared_rows)[i]);
    return acc;
  };
  if (data.dim() == 1) {
    est.train_x.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) est.train_x.push_back(data.xs(i, 0));
    std::sort(est.train_x.begin(), est.train_x.end());
    est.quad_hints = est.train_x;
  }
  return est;
}

// Exact O(n) ridge solve for the 1-d Ornstein-Uhlenbeck (laplace) kernel.
// With points sorted and rho_i = exp(-(x_{i+1}-x_i)/h), the Gram inverse T
// is tridiagonal, so (K + lambda I) alpha = y becomes the tridiagonal SPD
// system (I + lambda T) alpha = T y.
FittedEstimator krr_laplace_1d(const Dataset& data, double lambda, double h) {
  const int n = data.n();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return data.xs(a, 0) < data.xs(b, 0); });
  std::vector<double> x(static_cast<std::size_t>(n)),
      y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = data.xs(order[static_cast<std::size_t>(i)], 0);
    y[static_cast<std::size_t>(i)] = data.ys(order[static_cast<std::size_t>(i)]);
  }
  // coincident points would make the chain degenerate; nudge by one ulp
  for (int i = 1; i < n; ++i)
    if (x[static_cast<std::size_t>(i)] <= x[static_cast<std::size_t>(i - 1)])
      x[static_cast<std::size_t>(i)] =
          std::nextafter(x[static_cast<std::size_t>(i - 1)], 2.0);

  // T tridiagonal: Td (diagonal), Te (superdiagonal)
  // T_11 = 1 + rho_1^2/q_1, T_ii = 1/q_{i-1} + rho_i^2/q_i,
  // T_nn = 1/q_{n-1}, T_{i,i+1} = -rho_i/q_i with q_i = 1 - rho_i^2
  std::vector<double> Td(static_cast<std::size_t>(n), 0.0),
      Te(static_cast<std::size_t>(n > 0 ? n - 1 : 0), 0.0);
  Td[0] = 1.0;
  for (int i = 0; i < n - 1; ++i) {
    const double d = x[static_cast<std::size_t>(i + 1)] -
                     x[static_cast<std::size_t>(i)];
    const double rho = std::exp(-d / h);
    const double q = -std::expm1(-2.0 * d / h);  // 1 - rho^2, no cancellation
    Te[static_cast<std::size_t>(i)] = -rho / q;
    Td[static_cast<std::size_t>(i)] += rho * rho / q;
    Td[static_cast<std::size_t>(i + 1)] += 1.0 / q;
  }

  // assemble r = T y
  std::vector<double> r(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = Td[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    if (i > 0) acc += Te[static_cast<std::size_t>(i - 1)] * y[static_cast<std::size_t>(i - 1)];
    if (i < n - 1) acc += Te[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i + 1)];
    r[static_cast<std::size_t>(i)] = acc;
  }
  // solve (I + lambda T) alpha = r, tridiagonal Thomas
  std::vector<double> diag(static_cast<std::size_t>(n)),
      upper(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (int i = 0; i < n; ++i)
    diag[static_cast<std::size_t>(i)] = 1.0 + lambda * Td[static_cast<std::size_t>(i)];
  for (int i = 0; i + 1 < n; ++i)
    upper[static_cast<std::size_t>(i)] = lambda * Te[static_cast<std::size_t>(i)];
  std::vector<double> c(static_cast<std::size_t>(n), 0.0),
      dd(static_cast<std::size_t>(n), 0.0);
  c[0] = (n > 1) ? upper[0] / diag[0] : 0.0;
  dd[0] = r[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[static_cast<std::size_t>(i)] -
                     (i > 0 ? upper[static_cast<std::size_t>(i - 1)] *
                                  c[static_cast<std::size_t>(i - 1)]
                            : 0.0);
    if (i + 1 < n) c[static_cast<std::size_t>(i)] = upper[static_cast<std::size_t>(i)] / m;
    dd[static_cast<std::size_t>(i)] =
        (r[static_cast<std::size_t>(i)] -
         upper[static_cast<std::size_t>(i - 1)] * dd[static_cast<std::size_t>(i - 1)]) /
        m;
  }
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  alpha[static_cast<std::size_t>(n - 1)] = dd[static_cast<std::size_t>(n - 1)];
  for (int i = n - 2; i >= 0; --i)
    alpha[static_cast<std::size_t>(i)] =
        dd[static_cast<std::size_t>(i)] -
        c[static_cast<std::size_t>(i)] * alpha[static_cast<std::size_t>(i + 1)];

  // stable two-sided prefix recurrences for prediction
  auto L = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
  auto R = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
  (*L)[0] = alpha[0];
  for (int i = 1; i < n; ++i)
    (*L)[static_cast<std::size_t>(i)] =
        (*L)[static_cast<std::size_t>(i - 1)] *
            std::exp(-(x[static_cast<std::size_t>(i)] -
                       x[static_cast<std::size_t>(i - 1)]) /
                     h) +
        alpha[static_cast<std::size_t>(i)];
  (*R)[static_cast<std::size_t>(n - 1)] = alpha[static_cast<std::size_t>(n - 1)];
  for (int i = n - 2; i >= 0; --i)
    (*R)[static_cast<std::size_t>(i)] =
        (*R)[static_cast<std::size_t>(i + 1)] *
            std::exp(-(x[static_cast<std::size_t>(i + 1)] -
                       x[static_cast<std::size_t>(i)]) /
                     h) +
        alpha[static_cast<std::size_t>(i)];

  FittedEstimator est;
  est.kind = "krr";
  est.linear_in_y = true;
  est.info["lambda"] = lambda;
  est.info["bandwidth"] = h;
  est.info["fast_path"] = 1.0;
  est.dual = alpha;
  est.train_x = x;
  est.quad_hints = x;
  auto xs = std::make_shared<std::vector<double>>(std::move(x));
  est.predict = [xs, L, R, h](std::span<const double> q) {
    const double t = q[0];
    const auto& px = *xs;
    const auto it = std::upper_bound(px.begin(), px.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - px.begin());
    double acc = 0.0;
    if (j > 0) acc += (*L)[j - 1] * std::exp(-(t - px[j - 1]) / h);
    if (j < px.size()) acc += (*R)[j] * std::exp(-(px[j] - t) / h);
    return acc;
  };
  return est;
}

}  // namespace

FittedEstimator kernel_ridge(const Dataset& data, const Kernel& kernel,
                             double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("kernel_ridge: lambda must be positive");
  if (data.n() < 1) throw std::invalid_argument("kernel_ridge: empty dataset");
  FittedEstimator est;
  if (kernel.name == "laplace" && data.dim() == 1)
    est = krr_laplace_1d(data, lambda, kernel.bandwidth);
  else
    est = krr_dense(data, kernel, lambda);
  est.training_risk = empirical_risk(est, data);
  return est;
}

KrrCv kernel_ridge_cv(const Dataset& data, const Kernel& kernel,
                      std::span<const double> lambda_grid, int folds) {
  if (lambda_grid.empty())
    throw std::invalid_argument("kernel_ridge_cv: empty grid");
  folds = std::min(folds, data.n());
  KrrCv out;
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    double sse = 0.0;
    long count = 0;
    for (int fold = 0; fold < folds; ++fold) {
      std::vector<int> train, test;
      for (int i = 0; i < data.n(); ++i)
        (i % folds == fold ? test : train).push_back(i);
      if (train.empty() || test.empty()) continue;
      Dataset sub;
      sub.xs.resize(static_cast<Eigen::Index>(train.size()), data.dim());
      sub.ys.resize(static_cast<Eigen::Index>(train.size()));
      for (std::size_t i = 0; i < train.size(); ++i) {
        sub.xs.row(static_cast<Eigen::Index>(i)) =
            data.xs.row(train[i]);
        sub.ys(static_cast<Eigen::Index>(i)) = data.ys(train[i]);
      }
      sub.meta = data.meta;
      const auto fit = kernel_ridge(sub, kernel, lambda);
      for (int i : test) {
        const auto xi = data.row(i);
        const double e = fit.predict(xi) - data.ys(i);
        sse += e * e;
        ++count;
      }
    }
    const double mse = sse / static_cast<double>(count);
    out.table.push_back({lambda, mse});
    // ties resolve toward stronger regularization
    if (mse < best - 1e-15 * std::abs(best) ||
        (mse <= best && lambda > out.lambda)) {
      best = mse;
      out.lambda = lambda;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nadaraya-Watson (box window)
// ---------------------------------------------------------------------------

FittedEstimator nadaraya_watson(const Dataset& data, double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("nadaraya_watson: bandwidth must be positive");
  const int n = data.n();
  const double mean = data.ys.mean();
  FittedEstimator est;
  est.kind = "nw";
  est.linear_in_y = true;
  est.info["bandwidth"] = bandwidth;
  if (data.dim() == 1) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return data.xs(a, 0) < data.xs(b, 0); });
    auto xs = std::make_shared<std::vector<double>>();
    auto prefix = std::make_shared<std::vector<double>>();
    prefix->push_back(0.0);
    for (int i = 0; i < n; ++i) {
      xs->push_back(data.xs(order[static_cast<std::size_t>(i)], 0));
      prefix->push_back(prefix->back() +
                        data.ys(order[static_cast<std::size_t>(i)]));
    }
    const double h = bandwidth;
    est.predict = [xs, prefix, mean, h](std::span<const double> q) {
      const double t = q[0];
      const auto lo = std::lower_bound(xs->begin(), xs->end(), t - h);
      const auto hi = std::upper_bound(xs->begin(), xs->end(), t + h);
      const std::size_t a = static_cast<std::size_t>(lo - xs->begin());
      const std::size_t b = static_cast<std::size_t>(hi - xs->begin());
      if (b <= a) return mean;  // empty window
      return ((*prefix)[b] - (*prefix)[a]) / static_cast<double>(b - a);
    };
    // piecewise-constant view: the active window changes only at X_i +- h
    std::vector<double> cuts{0.0, 1.0};
    for (double xi : *xs) {
      for (double c : {xi - h, xi + h})
        if (c > 0.0 && c < 1.0) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<PiecewiseLinear::Segment> segs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      const double v = est.predict1(mid);
      segs.push_back({v, v});
    }
    est.piecewise = PiecewiseLinear(std::move(cuts), std::move(segs));
    est.train_x = *xs;
  } else {
    Eigen::MatrixXd xcopy = data.xs;
    Eigen::VectorXd ycopy = data.ys;
    auto xs = std::make_shared<Eigen::MatrixXd>(std::move(xcopy));
    auto ys = std::make_shared<Eigen::VectorXd>(std::move(ycopy));
    const double h = bandwidth;
    est.predict = [xs, ys, mean, h](std::span<const double> q) {
      double acc = 0.0;
      long count = 0;
      for (Eigen::Index i = 0; i < xs->rows(); ++i) {
        bool in = true;
        for (Eigen::Index c = 0; c < xs->cols(); ++c)
          if (std::abs((*xs)(i, c) - q[static_cast<std::size_t>(c)]) > h)
            in = false;
        if (in) {
          acc += (*ys)(i);
          ++count;
        }
      }
      return count > 0 ? acc / static_cast<double>(count) : mean;
    };
  }
  est.training_risk = empirical_risk(est, data);
  return est;
}

// ---------------------------------------------------------------------------
// Wavelet thresholding
// ---------------------------------------------------------------------------

FittedEstimator wavelet_threshold(const Dataset& data,
                                  const DyadicWavelet& wavelet, int max_level,
                                  std::optional<double> tau_opt) {
  if (data.dim() != 1)
    throw std::invalid_argument("wavelet_threshold: requires d = 1");
  const int n = data.n();
  const double tau =
      tau_opt ? *tau_opt
              : data.meta.sigma * std::sqrt(2.0 * std::log(std::max(2, n)) /
                                            static_cast<double>(n));
  WaveletCoeffs kept;
  for (const auto& idx : enumerate_indices(1, max_level)) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = data.xs(i, 0);
      acc += data.ys(i) * wavelet.eval(idx, std::span<const double>(&xi, 1));
    }
    const double a = acc / static_cast<double>(n);
    if (std::abs(a) > tau) kept.set(idx, a);
  }
  const double mean = data.ys.mean();  // unthresholded scaling term
  WaveletExpansion e{wavelet, kept, {}};
  PiecewiseLinear pl =
      e.synthesize_pl().plus(PiecewiseLinear::constant(mean));

  FittedEstimator est;
  est.kind = "wavelet_threshold";
  est.linear_in_y = false;  // hard thresholding selects support from Y
  est.info["tau"] = tau;
  est.info["max_level"] = max_level;
  est.info["kept"] = static_cast<double>(kept.support_size());
  auto shared = std::make_shared<PiecewiseLinear>(std::move(pl));
  est.piecewise = *shared;
  est.predict = [shared](std::span<const double> x) {
    return shared->eval(x[0]);
  };
  est.training_risk = empirical_risk(est, data);
  return est;
}

// ---------------------------------------------------------------------------
// Constructive deep ERM (ramp dictionary + exact outer least squares)
// ---------------------------------------------------------------------------

namespace {

struct LsFit {
  Eigen::VectorXd coefs;
  bool ridge_fallback = false;
};

LsFit solve_ls(const Eigen::MatrixXd& G, const Eigen::VectorXd& rhs) {
  LsFit out;
  Eigen::LDLT<Eigen::MatrixXd> solver(G);
  // rcond() is unreliable when a pivot is exactly zero; inspect D directly
  const auto& D = solver.vectorD();
  const double dmax = D.cwiseAbs().maxCoeff();
  const bool regular = solver.info() == Eigen::Success && dmax > 0.0 &&
                       D.minCoeff() > 1e-12 * dmax;
  if (regular) {
    out.coefs = solver.solve(rhs);
    return out;
  }
  Eigen::MatrixXd Gr = G;
  Gr.diagonal().array() += 1e-8;
  out.coefs = Eigen::LDLT<Eigen::MatrixXd>(Gr).solve(rhs);
  out.ridge_fallback = true;
  return out;
}

FittedEstimator finish_dictionary_fit(const Dataset& data,
                                      std::vector<ReluNetwork> atoms,
                                      bool with_intercept, double F,
                                      const std::string& kind) {
  const int n = data.n();
  const int p = static_cast<int>(atoms.size()) + (with_intercept ? 1 : 0);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) {
    int col = 0;
    if (with_intercept) X(i, col++) = 1.0;
    for (const auto& atom : atoms)
      X(i, col++) = atom.forward1(data.xs(i, 0));
  }
  const Eigen::MatrixXd G = X.transpose() * X;
  const Eigen::VectorXd rhs = X.transpose() * data.ys;
  LsFit fit = solve_ls(G, rhs);

  std::vector<PiecewiseLinear> pls;
  std::vector<double> coefs;
  int col = 0;
  if (with_intercept) {
    pls.push_back(PiecewiseLinear::constant(1.0));
    coefs.push_back(fit.coefs(col++));
  }
  for (const auto& atom : atoms) {
    pls.push_back(atom.piecewise_1d());
    coefs.push_back(fit.coefs(col++));
  }
  PiecewiseLinear pl =
      (pls.empty() ? PiecewiseLinear()
                   : PiecewiseLinear::combine(pls, coefs))
          .clipped(F);

  FittedEstimator est;
  est.kind = kind;
  est.linear_in_y = false;  // atom selection depends on Y
  est.info["n_atoms"] = static_cast<double>(atoms.size());
  est.info["F"] = F;
  if (fit.ridge_fallback) est.info["ridge_fallback"] = 1.0;
  auto shared = std::make_shared<PiecewiseLinear>(std::move(pl));
  est.piecewise = *shared;
  est.predict = [shared](std::span<const double> x) {
    return shared->eval(x[0]);
  };
  est.training_risk = empirical_risk(est, data);
  return est;
}

// jump-atom path: candidate jumps at midpoints between consecutive sorted
// data points, scored by suffix-sum correlations (orthogonal matching
// pursuit over the indicator dictionary, least-squares refit each round)
FittedEstimator erm_jump_dictionary(const Dataset& data, const ClassHint& hint,
                                    const ConstructiveBudget& budget) {
  const int n = data.n();
  const int k_budget = budget.n_atoms > 0
                           ? budget.n_atoms
                           : std::max(hint.params.k, hint.params.n_s);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return data.xs(a, 0) < data.xs(b, 0); });
  std::vector<double> xs, ys;
  for (int i : order) {
    xs.push_back(data.xs(i, 0));
    ys.push_back(data.ys(i));
  }
  // candidate jump locations and the suffix index they activate
  std::vector<double> cand_t;
  std::vector<int> cand_first;  // first sorted index with x >= t
  std::vector<double> cand_w;
  for (int i = 0; i + 1 < n; ++i) {
    if (xs[static_cast<std::size_t>(i + 1)] <= xs[static_cast<std::size_t>(i)])
      continue;
    const double t = 0.5 * (xs[static_cast<std::size_t>(i)] +
                            xs[static_cast<std::size_t>(i + 1)]);
    if (!(t > 0.0 && t < 1.0)) continue;
    const double gap = xs[static_cast<std::size_t>(i + 1)] -
                       xs[static_cast<std::size_t>(i)];
    const double w_auto =
        budget.ramp_width > 0.0 ? budget.ramp_width : 0.25 / n;
    const double w =
        std::min({w_auto, 0.45 * gap, 0.9 * t, 0.9 * (1.0 - t)});
    if (!(w > 0.0)) continue;
    cand_t.push_back(t);
    cand_first.push_back(i + 1);
    cand_w.push_back(w);
  }

  Eigen::VectorXd yv(n);
  for (int i = 0; i < n; ++i) yv(i) = ys[static_cast<std::size_t>(i)];

  std::vector<std::size_t> chosen;
  // least squares on intercept + the chosen steps; returns the residual
  auto refit = [&](Eigen::VectorXd& residual) {
    const int p = static_cast<int>(chosen.size()) + 1;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, p);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      for (std::size_t a = 0; a < chosen.size(); ++a)
        if (i >= cand_first[chosen[a]])
          X(i, 1 + static_cast<Eigen::Index>(a)) = 1.0;
    }
    LsFit fit = solve_ls(X.transpose() * X, X.transpose() * yv);
    residual = yv - X * fit.coefs;
  };
  // best candidate by the least-squares improvement of adding one step to a
  // model that already contains the intercept: |<r, g>|^2 / (c (1 - c/n))
  auto best_candidate = [&](const Eigen::VectorXd& residual) {
    std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = n - 1; i >= 0; --i)
      suffix[static_cast<std::size_t>(i)] =
          suffix[static_cast<std::size_t>(i) + 1] + residual(i);
    double best_score = 0.0;
    std::size_t best = SIZE_MAX;
    for (std::size_t j = 0; j < cand_t.size(); ++j) {
      if (std::find(chosen.begin(), chosen.end(), j) != chosen.end())
        continue;
      const int count = n - cand_first[j];
      if (count <= 0 || count >= n) continue;  // collinear with intercept
      const double denom =
          static_cast<double>(count) *
          (1.0 - static_cast<double>(count) / static_cast<double>(n));
      const double corr = suffix[static_cast<std::size_t>(cand_first[j])];
      const double score = corr * corr / denom;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  };

  if (k_budget <= 6 && n <= 16384 && !cand_t.empty()) {
    // exact restricted ERM: the model (intercept + k steps) is the set of
    // piecewise-constant fits with k+1 level segments over the sorted data,
    // so optimal segmentation by dynamic programming gives the global
    // least-squares minimizer over the candidate dictionary
    std::vector<double> S(static_cast<std::size_t>(n) + 1, 0.0),
        S2(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i) {
      S[static_cast<std::size_t>(i) + 1] =
          S[static_cast<std::size_t>(i)] + ys[static_cast<std::size_t>(i)];
      S2[static_cast<std::size_t>(i) + 1] =
          S2[static_cast<std::size_t>(i)] +
          ys[static_cast<std::size_t>(i)] * ys[static_cast<std::size_t>(i)];
    }
    auto sse = [&](int a, int b) {  // SSE of the mean fit on [a, b)
      const double s = S[static_cast<std::size_t>(b)] -
                       S[static_cast<std::size_t>(a)];
      const double s2 = S2[static_cast<std::size_t>(b)] -
                        S2[static_cast<std::size_t>(a)];
      return s2 - s * s / static_cast<double>(b - a);
    };
    const int J = k_budget + 1;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> D(
        static_cast<std::size_t>(J) + 1,
        std::vector<double>(static_cast<std::size_t>(n) + 1, inf));
    std::vector<std::vector<int>> arg(
        static_cast<std::size_t>(J) + 1,
        std::vector<int>(static_cast<std::size_t>(n) + 1, 0));
    for (int i = 1; i <= n; ++i) D[1][static_cast<std::size_t>(i)] = sse(0, i);
    for (int j = 2; j <= J; ++j) {
      for (int i = j; i <= n; ++i) {
        double best = inf;
        int best_m = j - 1;
        for (int m = j - 1; m < i; ++m) {
          const double v = D[static_cast<std::size_t>(j - 1)]
                            [static_cast<std::size_t>(m)] +
                           sse(m, i);
          if (v < best) {
            best = v;
            best_m = m;
          }
        }
        D[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = best;
        arg[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = best_m;
      }
    }
    // backtrack segment boundaries; a boundary before sorted index i maps
    // to the candidate midpoint with cand_first == i
    std::vector<int> first_to_cand(static_cast<std::size_t>(n) + 1, -1);
    for (std::size_t j = 0; j < cand_first.size(); ++j)
      first_to_cand[static_cast<std::size_t>(cand_first[j])] =
          static_cast<int>(j);
    int i = n;
    for (int j = J; j >= 2; --j) {
      const int m = arg[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (m > 0 && m < n && first_to_cand[static_cast<std::size_t>(m)] >= 0)
        chosen.push_back(
            static_cast<std::size_t>(first_to_cand[static_cast<std::size_t>(m)]));
      i = m;
    }
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  } else {
    Eigen::VectorXd residual = yv;
    for (int round = 0; round < k_budget && !cand_t.empty(); ++round) {
      const std::size_t best = best_candidate(residual);
      if (best == SIZE_MAX) break;
      chosen.push_back(best);
      refit(residual);
    }
    // backfitting sweeps: re-place each jump against the others until stable
    for (int sweep = 0; sweep < 8 && chosen.size() > 1; ++sweep) {
      bool changed = false;
      for (std::size_t a = 0; a < chosen.size(); ++a) {
        const std::size_t current = chosen[a];
        chosen.erase(chosen.begin() + static_cast<std::ptrdiff_t>(a));
        Eigen::VectorXd partial;
        refit(partial);
        const std::size_t replacement = best_candidate(partial);
        chosen.insert(chosen.begin() + static_cast<std::ptrdiff_t>(a),
                      replacement == SIZE_MAX ? current : replacement);
        if (chosen[a] != current) changed = true;
      }
      if (!changed) break;
    }
  }

  std::vector<ReluNetwork> atoms;
  for (std::size_t j : chosen)
    atoms.push_back(build_jump_approx(cand_t[j], 1.0, cand_w[j]));
  return finish_dictionary_fit(data, std::move(atoms), /*with_intercept=*/true,
                               hint.sup_bound, "deep_constructive");
}

// wavelet path: dyadic Haar ramp atoms below level m, ranked by empirical
// coefficient magnitude, top N kept, outer coefficients by least squares
FittedEstimator erm_wavelet_dictionary(const Dataset& data,
                                       const ClassHint& hint,
                                       const ConstructiveBudget& budget) {
  const int n = data.n();
  const double p = hint.params.sparsity.p;
  const double beta = hint.params.sparsity.beta;
  const double alpha = 1.0 / p - 0.5;
  int m = budget.max_level;
  if (m < 0)
    m = static_cast<int>(std::ceil(2.0 * alpha / (beta * (2.0 * alpha + 1.0)) *
                                   std::log2(std::max(2, n))));
  m = std::clamp(m, 1, 12);
  int N = budget.n_atoms;
  if (N <= 0)
    N = static_cast<int>(
        std::ceil(std::pow(double(n), 1.0 / (2.0 * alpha + 1.0))));

  // empirical coefficients (1/n) sum Y_i psi_{k,l}(X_i), exact Haar values
  struct Scored {
    int k, l;
    double a;
  };
  std::vector<Scored> scored;
  for (int k = 0; k < m; ++k) {
    std::vector<double> acc(static_cast<std::size_t>(1) << k, 0.0);
    const double amp = std::sqrt(std::ldexp(1.0, k));
    for (int i = 0; i < n; ++i) {
      const double xi = data.xs(i, 0);
      double t = std::ldexp(xi, k);
      int l = static_cast<int>(t);
      if (l >= (1 << k)) l = (1 << k) - 1;
      const double frac = t - l;
      acc[static_cast<std::size_t>(l)] +=
          data.ys(i) * (frac < 0.5 ? amp : -amp);
    }
    for (int l = 0; l < (1 << k); ++l)
      scored.push_back({k, l, acc[static_cast<std::size_t>(l)] / n});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    const double ma = std::abs(a.a), mb = std::abs(b.a);
    if (ma != mb) return ma > mb;
    if (a.k != b.k) return a.k < b.k;
    return a.l < b.l;
  });
  const double w_auto = budget.ramp_width > 0.0 ? budget.ramp_width : 0.25 / n;
  std::vector<ReluNetwork> atoms;
  for (int i = 0; i < N && i < static_cast<int>(scored.size()); ++i)
    atoms.push_back(build_haar_atom(scored[static_cast<std::size_t>(i)].k,
                                    scored[static_cast<std::size_t>(i)].l,
                                    w_auto));
  auto est = finish_dictionary_fit(data, std::move(atoms),
                                   /*with_intercept=*/false, hint.sup_bound,
                                   "deep_constructive");
  est.info["m"] = m;
  est.info["N"] = N;
  return est;
}

}  // namespace

FittedEstimator erm_deep_constructive(const Dataset& data,
                                      const ClassHint& hint,
                                      const ConstructiveBudget& budget) {
  if (data.dim() != 1)
    throw std::invalid_argument("erm_deep_constructive: requires d = 1");
  switch (hint.kind) {
    case TargetKind::Jk:
    case TargetKind::I0:
      return erm_jump_dictionary(data, hint, budget);
    case TargetKind::Jp:
    case TargetKind::Kp:
      return erm_wavelet_dictionary(data, hint, budget);
    case TargetKind::Custom:
      return erm_jump_dictionary(data, hint, budget);
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Gradient-descent baseline
// ---------------------------------------------------------------------------

GdGradient gd_gradient(const ReluNetwork& net, const Dataset& data) {
  const int n = data.n();
  const int L = net.arch().L;
  GdGradient g;
  g.dW.reserve(net.weights().size());
  for (const auto& W : net.weights())
    g.dW.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
  for (const auto& v : net.biases())
    g.dv.push_back(Eigen::VectorXd::Zero(v.size()));

  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd h(data.dim());
    for (int c = 0; c < data.dim(); ++c) h(c) = data.xs(i, c);
    std::vector<Eigen::VectorXd> acts;  // post-activation per layer
    std::vector<Eigen::VectorXd> pre;   // pre-activation per layer
    acts.push_back(h);
    for (int layer = 0; layer < L; ++layer) {
      Eigen::VectorXd z =
          net.weights()[static_cast<std::size_t>(layer)] * acts.back() -
          net.biases()[static_cast<std::size_t>(layer)];
      pre.push_back(z);
      acts.push_back(z.cwiseMax(0.0));
    }
    const double out = (net.weights().back() * acts.back())(0);
    const double err = 2.0 * (out - data.ys(i)) / static_cast<double>(n);
    g.loss += (out - data.ys(i)) * (out - data.ys(i)) / n;

    g.dW.back() += err * acts.back().transpose();
    Eigen::VectorXd delta =
        err * net.weights().back().transpose().col(0);
    for (int layer = L - 1; layer >= 0; --layer) {
      for (Eigen::Index r = 0; r < delta.size(); ++r)
        if (pre[static_cast<std::size_t>(layer)](r) <= 0.0) delta(r) = 0.0;
      g.dW[static_cast<std::size_t>(layer)] +=
          delta * acts[static_cast<std::size_t>(layer)].transpose();
      g.dv[static_cast<std::size_t>(layer)] -= delta;
      if (layer > 0)
        delta = net.weights()[static_cast<std::size_t>(layer)].transpose() *
                delta;
    }
  }
  return g;
}

FittedEstimator erm_deep_gd(const Dataset& data, const NetworkArch& arch,
                            int epochs, double step, std::uint64_t seed) {
  Rng rng(seed);
  const int d = data.dim();
  const double init = 0.5 * std::min(1.0, arch.B);
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> v;
  auto fill = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        M(r, c) = rng.uniform(-init, init);
    return M;
  };
  W.push_back(fill(arch.D, d));
  for (int i = 1; i < arch.L; ++i) W.push_back(fill(arch.D, arch.D));
  W.push_back(fill(1, arch.D));
  for (int i = 0; i < arch.L; ++i) {
    // nonpositive biases keep every unit active at the origin, avoiding a
    // fully dead start
    Eigen::VectorXd vi(arch.D);
    for (int r = 0; r < arch.D; ++r) vi(r) = -rng.uniform(0.0, init);
    v.push_back(vi);
  }
  ReluNetwork net(W, v, arch);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    GdGradient g = gd_gradient(net, data);
    if (!std::isfinite(g.loss))
      throw std::runtime_error("erm_deep_gd: loss diverged at epoch " +
                               std::to_string(epoch));
    auto Wn = net.weights();
    auto vn = net.biases();
    for (std::size_t i = 0; i < Wn.size(); ++i) {
      Wn[i] -= step * g.dW[i];
      Wn[i] = Wn[i].cwiseMax(-arch.B).cwiseMin(arch.B);
    }
    for (std::size_t i = 0; i < vn.size(); ++i) {
      vn[i] -= step * g.dv[i];
      vn[i] = vn[i].cwiseMax(-arch.B).cwiseMin(arch.B);
    }
    net = ReluNetwork(std::move(Wn), std::move(vn), arch);
  }

  // magnitude pruning down to the sparsity budget
  long nnz = net.nonzero_count();
  if (nnz > arch.S) {
    std::vector<double> mags;
    for (const auto& Wm : net.weights())
      for (Eigen::Index r = 0; r < Wm.rows(); ++r)
        for (Eigen::Index c = 0; c < Wm.cols(); ++c)
          if (Wm(r, c) != 0.0) mags.push_back(std::abs(Wm(r, c)));
    for (const auto& vv : net.biases())
      for (Eigen::Index r = 0; r < vv.size(); ++r)
        if (vv(r) != 0.0) mags.push_back(std::abs(vv(r)));
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    const double cut = mags[static_cast<std::size_t>(arch.S - 1)];
    auto Wn = net.weights();
    auto vn = net.biases();
    for (auto& Wm : Wn)
      Wm = (Wm.cwiseAbs().array() >= cut).select(Wm, 0.0);
    for (auto& vv : vn)
      vv = (vv.cwiseAbs().array() >= cut).select(vv, 0.0);
    net = ReluNetwork(std::move(Wn), std::move(vn), arch);
  }

  FittedEstimator est;
  est.kind = "deep_gd";
  est.linear_in_y = false;
  est.info["epochs"] = epochs;
  est.info["step"] = step;
  auto shared = std::make_shared<ReluNetwork>(std::move(net));
  est.predict = [shared](std::span<const double> x) {
    return shared->forward(x);
  };
  if (d == 1) est.piecewise = shared->piecewise_1d();
  est.training_risk = empirical_risk(est, data);
  est.info["final_empirical_risk"] = est.training_risk;
  return est;
}

double empirical_risk(const FittedEstimator& est, const Dataset& data) {
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const auto xi = data.row(i);
    const double e = est.predict(xi) - data.ys(i);
    acc += e * e;
  }
  return acc / static_cast<double>(data.n());
}

std::string estimator_to_json(const FittedEstimator& est, int indent) {
  json info = json::object();
  for (const auto& [k, vv] : est.info) info[k] = vv;
  json out{{"kind", est.kind},
           {"linear_in_y", est.linear_in_y},
           {"training_risk", est.training_risk},
           {"info", info}};
  if (!est.dual.empty()) out["dual"] = est.dual;
  if (!est.train_x.empty()) out["train_x"] = est.train_x;
  return out.dump(indent);
}

}  // namespace minimax
