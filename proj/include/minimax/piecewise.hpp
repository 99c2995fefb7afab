#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace minimax {

// Piecewise-linear function on [0, 1] with jump discontinuities allowed at
// the nodes. Segment i covers [node_i, node_{i+1}] and interpolates linearly
// between a left value and a right value, so piecewise-constant functions
// (steps, Haar wavelets) and ramp networks are both represented exactly.
//
// All integrals are computed cell-exactly: the product of two segments is a
// quadratic, which the per-cell Simpson rule integrates without error. This
// is the quadrature backbone used by oracles, risk evaluation and coefficient
// analysis in d = 1.
class PiecewiseLinear {
 public:
  struct Segment {
    double yl;  // value at the left node (limit from the right)
    double yr;  // value at the right node (limit from the left)
  };

  // zero function
  PiecewiseLinear();

  // nodes.front() == 0, nodes.back() == 1, strictly increasing;
  // segs.size() == nodes.size() - 1
  PiecewiseLinear(std::vector<double> nodes, std::vector<Segment> segs);

  static PiecewiseLinear constant(double c);

  // height * 1_{[t, 1]} for t in (0, 1]; t == 1 is the a.e.-null jump at the
  // right endpoint and yields the zero function
  static PiecewiseLinear step(double t, double height);

  // 0 on [0, t0], linear from 0 to height on [t0, t1], height on [t1, 1]
  static PiecewiseLinear ramp(double t0, double t1, double height);

  // value convention at interior nodes: limit from the right
  double eval(double x) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<Segment>& segments() const { return segs_; }

  PiecewiseLinear scaled(double c) const;

  // exact linear combination sum_i coefs[i] * fs[i]
  static PiecewiseLinear combine(std::span<const PiecewiseLinear> fs,
                                 std::span<const double> coefs);

  PiecewiseLinear plus(const PiecewiseLinear& g, double coef = 1.0) const;

  double integral() const;

  // exact \int_0^1 f g
  double inner(const PiecewiseLinear& g) const;

  double l2_norm_sq() const { return inner(*this); }

  // exact \int_0^1 (f - g)^2
  double l2_dist_sq(const PiecewiseLinear& g) const;

  // sgn(f) min(|f|, F); segments are split at the crossing points so the
  // result is exact
  PiecewiseLinear clipped(double F) const;

  // max(f, 0), exact (segments split at zero crossings)
  PiecewiseLinear relu() const;

  // sup over [0, 1] of |f| (attained at a node by piecewise linearity)
  double max_abs() const;

  // x -> this(a x - b) restricted to [0, 1], with this() treated as 0
  // outside [0, 1]; requires a != 0
  PiecewiseLinear pullback_affine(double a, double b) const;

  bool is_constant_zero() const;

 private:
  std::vector<double> nodes_;
  std::vector<Segment> segs_;
};

// Sorted union of two strictly increasing node lists (exact comparison).
std::vector<double> merge_nodes(const std::vector<double>& a,
                                const std::vector<double>& b);

// Adaptive Simpson on [a, b] for smooth integrands; used where the exact
// piecewise path does not apply (e.g. kernel predictors).
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 40);

}  // namespace minimax
