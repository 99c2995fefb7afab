#include "minimax/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minimax {

PiecewiseLinear::PiecewiseLinear() : nodes_{0.0, 1.0}, segs_{{0.0, 0.0}} {}

PiecewiseLinear::PiecewiseLinear(std::vector<double> nodes,
                                 std::vector<Segment> segs)
    : nodes_(std::move(nodes)), segs_(std::move(segs)) {
  if (nodes_.size() < 2 || segs_.size() != nodes_.size() - 1)
    throw std::invalid_argument("PiecewiseLinear: inconsistent sizes");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw std::invalid_argument("PiecewiseLinear: domain must be [0, 1]");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (!(nodes_[i] < nodes_[i + 1]))
      throw std::invalid_argument("PiecewiseLinear: nodes not increasing");
}

PiecewiseLinear PiecewiseLinear::constant(double c) {
  return PiecewiseLinear({0.0, 1.0}, {{c, c}});
}

PiecewiseLinear PiecewiseLinear::step(double t, double height) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::invalid_argument("step: t must lie in (0, 1]");
  if (t == 1.0) return constant(0.0);
  return PiecewiseLinear({0.0, t, 1.0}, {{0.0, 0.0}, {height, height}});
}

PiecewiseLinear PiecewiseLinear::ramp(double t0, double t1, double height) {
  if (!(0.0 <= t0 && t0 < t1 && t1 <= 1.0))
    throw std::invalid_argument("ramp: need 0 <= t0 < t1 <= 1");
  std::vector<double> nodes;
  std::vector<Segment> segs;
  nodes.push_back(0.0);
  if (t0 > 0.0) {
    nodes.push_back(t0);
    segs.push_back({0.0, 0.0});
  }
  nodes.push_back(t1);
  segs.push_back({0.0, height});
  if (t1 < 1.0) {
    nodes.push_back(1.0);
    segs.push_back({height, height});
  }
  return PiecewiseLinear(std::move(nodes), std::move(segs));
}

double PiecewiseLinear::eval(double x) const {
  if (x <= nodes_.front()) x = nodes_.front();
  if (x >= nodes_.back()) {
    const Segment& s = segs_.back();
    return s.yr;
  }
  // index of segment containing x, right-continuous at interior nodes
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double x0 = nodes_[i], x1 = nodes_[i + 1];
  const Segment& s = segs_[i];
  const double t = (x - x0) / (x1 - x0);
  return s.yl + t * (s.yr - s.yl);
}

PiecewiseLinear PiecewiseLinear::scaled(double c) const {
  std::vector<Segment> segs = segs_;
  for (auto& s : segs) {
    s.yl *= c;
    s.yr *= c;
  }
  return PiecewiseLinear(nodes_, std::move(segs));
}

std::vector<double> merge_nodes(const std::vector<double>& a,
                                const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// value at x taken from segment i of f, as a pure linear extension (no
// right-continuity dance needed because callers pass x inside the segment)
double seg_value(const PiecewiseLinear& f, std::size_t i, double x) {
  const double x0 = f.nodes()[i], x1 = f.nodes()[i + 1];
  const auto& s = f.segments()[i];
  const double t = (x - x0) / (x1 - x0);
  return s.yl + t * (s.yr - s.yl);
}

// segment of f covering (x0, x1), assuming the interval does not straddle a
// node of f
std::size_t seg_index(const PiecewiseLinear& f, double x0, double x1) {
  const double mid = 0.5 * (x0 + x1);
  auto it = std::upper_bound(f.nodes().begin(), f.nodes().end(), mid);
  std::size_t i = static_cast<std::size_t>(it - f.nodes().begin());
  if (i == 0) return 0;
  if (i >= f.nodes().size()) return f.segments().size() - 1;
  return i - 1;
}

}  // namespace

PiecewiseLinear PiecewiseLinear::combine(std::span<const PiecewiseLinear> fs,
                                         std::span<const double> coefs) {
  if (fs.size() != coefs.size())
    throw std::invalid_argument("combine: size mismatch");
  if (fs.empty()) return PiecewiseLinear();
  std::vector<double> nodes = fs[0].nodes();
  for (std::size_t k = 1; k < fs.size(); ++k)
    nodes = merge_nodes(nodes, fs[k].nodes());
  std::vector<Segment> segs(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double yl = 0.0, yr = 0.0;
    for (std::size_t k = 0; k < fs.size(); ++k) {
      std::size_t j = seg_index(fs[k], nodes[i], nodes[i + 1]);
      yl += coefs[k] * seg_value(fs[k], j, nodes[i]);
      yr += coefs[k] * seg_value(fs[k], j, nodes[i + 1]);
    }
    segs[i] = {yl, yr};
  }
  return PiecewiseLinear(std::move(nodes), std::move(segs));
}

PiecewiseLinear PiecewiseLinear::plus(const PiecewiseLinear& g,
                                      double coef) const {
  const PiecewiseLinear fs[2] = {*this, g};
  const double cs[2] = {1.0, coef};
  return combine(fs, cs);
}

double PiecewiseLinear::integral() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < segs_.size(); ++i)
    acc += 0.5 * (segs_[i].yl + segs_[i].yr) * (nodes_[i + 1] - nodes_[i]);
  return acc;
}

double PiecewiseLinear::inner(const PiecewiseLinear& g) const {
  const std::vector<double> nodes = merge_nodes(nodes_, g.nodes());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double x0 = nodes[i], x1 = nodes[i + 1];
    const std::size_t a = seg_index(*this, x0, x1);
    const std::size_t b = seg_index(g, x0, x1);
    const double xm = 0.5 * (x0 + x1);
    const double p0 = seg_value(*this, a, x0) * seg_value(g, b, x0);
    const double pm = seg_value(*this, a, xm) * seg_value(g, b, xm);
    const double p1 = seg_value(*this, a, x1) * seg_value(g, b, x1);
    // Simpson, exact for the quadratic product of two linear pieces
    acc += (x1 - x0) / 6.0 * (p0 + 4.0 * pm + p1);
  }
  return acc;
}

double PiecewiseLinear::l2_dist_sq(const PiecewiseLinear& g) const {
  PiecewiseLinear diff = plus(g, -1.0);
  return diff.inner(diff);
}

PiecewiseLinear PiecewiseLinear::clipped(double F) const {
  if (!(F > 0.0)) throw std::invalid_argument("clipped: F must be positive");
  // split every segment at the points where it crosses +-F
  std::vector<double> nodes{0.0};
  std::vector<Segment> segs;
  auto clip = [F](double y) { return std::clamp(y, -F, F); };
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const double x0 = nodes_[i], x1 = nodes_[i + 1];
    const Segment& s = segs_[i];
    std::vector<double> cuts;
    for (double level : {F, -F}) {
      if ((s.yl - level) * (s.yr - level) < 0.0) {
        const double t = (level - s.yl) / (s.yr - s.yl);
        const double xc = x0 + t * (x1 - x0);
        if (xc > x0 && xc < x1) cuts.push_back(xc);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(x1);
    double xa = x0;
    double ya = s.yl;
    for (double xb : cuts) {
      if (xb <= xa) continue;
      const double t = (xb - x0) / (x1 - x0);
      const double yb = s.yl + t * (s.yr - s.yl);
      nodes.push_back(xb);
      segs.push_back({clip(ya), clip(yb)});
      xa = xb;
      ya = yb;
    }
  }
  return PiecewiseLinear(std::move(nodes), std::move(segs));
}

PiecewiseLinear PiecewiseLinear::relu() const {
  std::vector<double> nodes{0.0};
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const double x0 = nodes_[i], x1 = nodes_[i + 1];
    const Segment& s = segs_[i];
    double xc = x1;
    if ((s.yl < 0.0) != (s.yr < 0.0)) {
      const double t = (0.0 - s.yl) / (s.yr - s.yl);
      const double cut = x0 + t * (x1 - x0);
      if (cut > x0 && cut < x1) xc = cut;
    }
    auto push = [&](double xa, double xb, double ya, double yb) {
      if (xb <= xa) return;
      nodes.push_back(xb);
      segs.push_back({std::max(ya, 0.0), std::max(yb, 0.0)});
    };
    if (xc < x1) {
      const double t = (xc - x0) / (x1 - x0);
      const double yc = s.yl + t * (s.yr - s.yl);
      push(x0, xc, s.yl, yc);
      push(xc, x1, yc, s.yr);
    } else {
      push(x0, x1, s.yl, s.yr);
    }
  }
  return PiecewiseLinear(std::move(nodes), std::move(segs));
}

double PiecewiseLinear::max_abs() const {
  double m = 0.0;
  for (const auto& s : segs_)
    m = std::max({m, std::abs(s.yl), std::abs(s.yr)});
  return m;
}

PiecewiseLinear PiecewiseLinear::pullback_affine(double a, double b) const {
  if (a == 0.0)
    throw std::invalid_argument("pullback_affine: a must be nonzero");
  // t = a x - b; this(t) is zero outside t in [0, 1]
  auto to_x = [&](double t) { return (t + b) / a; };
  std::vector<double> xs;
  xs.push_back(0.0);
  xs.push_back(1.0);
  for (double t : nodes_) {
    const double x = to_x(t);
    if (x > 0.0 && x < 1.0) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Segment> segs;
  segs.reserve(xs.size() - 1);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i], x1 = xs[i + 1];
    const double tm = a * (0.5 * (x0 + x1)) - b;
    if (tm < 0.0 || tm > 1.0) {
      segs.push_back({0.0, 0.0});
      continue;
    }
    // the whole cell maps into one source segment; locate it from the
    // midpoint so edge values land on the correct side of source jumps
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), tm);
    std::size_t j = static_cast<std::size_t>(it - nodes_.begin());
    j = (j == 0) ? 0 : j - 1;
    if (j >= segs_.size()) j = segs_.size() - 1;
    const double lo = nodes_[j], hi = nodes_[j + 1];
    auto interp = [&](double t) {
      const double u = (std::clamp(t, lo, hi) - lo) / (hi - lo);
      return segs_[j].yl + u * (segs_[j].yr - segs_[j].yl);
    };
    segs.push_back({interp(a * x0 - b), interp(a * x1 - b)});
  }
  return PiecewiseLinear(std::move(xs), std::move(segs));
}

bool PiecewiseLinear::is_constant_zero() const {
  for (const auto& s : segs_)
    if (s.yl != 0.0 || s.yr != 0.0) return false;
  return true;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (a >= b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace minimax
