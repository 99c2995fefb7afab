#include "minimax/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minimax {

int WaveletIndex::level() const {
  int m = 0;
  for (int ki : k) m = std::max(m, ki);
  return m;
}

bool WaveletIndex::valid() const {
  if (k.empty() || k.size() != l.size()) return false;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < 0 || k[i] > 62) return false;
    if (l[i] < 0 || static_cast<std::int64_t>(l[i]) >= (1LL << k[i]))
      return false;
  }
  return true;
}

bool WaveletIndex::operator<(const WaveletIndex& o) const {
  const int la = level(), lb = o.level();
  if (la != lb) return la < lb;
  if (k != o.k) return k < o.k;
  return l < o.l;
}

std::vector<WaveletIndex> enumerate_indices(int dim, int max_level) {
  if (dim < 1 || max_level < 0)
    throw std::invalid_argument("enumerate_indices: bad arguments");
  std::vector<WaveletIndex> out;
  std::vector<int> k(dim, 0);
  // enumerate all k vectors with entries in [0, max_level]
  for (;;) {
    std::vector<int> l(dim, 0);
    for (;;) {
      out.push_back({k, l});
      int c = dim - 1;
      while (c >= 0 && ++l[c] >= (1 << k[c])) l[c--] = 0;
      if (c < 0) break;
    }
    int c = dim - 1;
    while (c >= 0 && ++k[c] > max_level) k[c--] = 0;
    if (c < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

PiecewiseLinear haar_mother() {
  return PiecewiseLinear({0.0, 0.5, 1.0}, {{1.0, 1.0}, {-1.0, -1.0}});
}

}  // namespace

DyadicWavelet DyadicWavelet::haar(int dim) {
  std::vector<PiecewiseLinear> mothers(static_cast<std::size_t>(dim),
                                       haar_mother());
  return DyadicWavelet("haar", std::move(mothers), /*verify_level=*/3);
}

DyadicWavelet::DyadicWavelet(std::string name,
                             std::vector<PiecewiseLinear> mothers,
                             int verify_level, double tol)
    : name_(std::move(name)), mothers_(std::move(mothers)) {
  if (mothers_.empty())
    throw std::invalid_argument("DyadicWavelet: no mothers");
  for (const auto& m : mothers_) {
    const double norm2 = m.l2_norm_sq();
    if (std::abs(norm2 - 1.0) > tol)
      throw std::invalid_argument("DyadicWavelet: mother is not unit-norm");
  }
  if (verify_level >= 0) {
    // orthogonality across dyadic shifts/scales of each 1-d mother
    for (int c = 0; c < dim(); ++c) {
      const auto idx = enumerate_indices(1, verify_level);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const PiecewiseLinear a = pl_factor(c, idx[i].k[0], idx[i].l[0]);
        for (std::size_t j = i; j < idx.size(); ++j) {
          const PiecewiseLinear b = pl_factor(c, idx[j].k[0], idx[j].l[0]);
          const double want = (i == j) ? 1.0 : 0.0;
          if (std::abs(a.inner(b) - want) > tol)
            throw std::invalid_argument(
                "DyadicWavelet: mother fails the orthonormality check");
        }
      }
    }
  }
}

double DyadicWavelet::eval(const WaveletIndex& idx,
                           std::span<const double> x) const {
  if (!idx.valid() || idx.dim() != dim())
    throw std::invalid_argument("eval: invalid wavelet index");
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("eval: dimension mismatch");
  double prod = 1.0;
  for (int c = 0; c < dim(); ++c) {
    const double scale = std::ldexp(1.0, idx.k[c]);  // 2^k
    const double t = scale * x[c] - idx.l[c];
    if (t < 0.0 || t > 1.0) return 0.0;
    prod *= std::sqrt(scale) * mothers_[c].eval(t);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

PiecewiseLinear DyadicWavelet::pl_factor(int coord, int k, int l) const {
  const double scale = std::ldexp(1.0, k);
  return mothers_[coord]
      .pullback_affine(scale, static_cast<double>(l))
      .scaled(std::sqrt(scale));
}

PiecewiseLinear DyadicWavelet::pl(const WaveletIndex& idx) const {
  if (dim() != 1)
    throw std::logic_error("pl: only available for 1-d wavelets");
  if (!idx.valid()) throw std::invalid_argument("pl: invalid index");
  return pl_factor(0, idx.k[0], idx.l[0]);
}

double DyadicWavelet::gram_entry(const WaveletIndex& a,
                                 const WaveletIndex& b) const {
  if (!a.valid() || !b.valid() || a.dim() != dim() || b.dim() != dim())
    throw std::invalid_argument("gram_entry: invalid indices");
  double prod = 1.0;
  for (int c = 0; c < dim(); ++c) {
    const PiecewiseLinear fa = pl_factor(c, a.k[c], a.l[c]);
    const PiecewiseLinear fb = pl_factor(c, b.k[c], b.l[c]);
    prod *= fa.inner(fb);
  }
  return prod;
}

double DyadicWavelet::max_gram_deviation(int max_level) const {
  const auto idx = enumerate_indices(dim(), max_level);
  double worst = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i; j < idx.size(); ++j) {
      const double want = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(gram_entry(idx[i], idx[j]) - want));
    }
  }
  return worst;
}

double eval_dyadic(const DyadicWavelet& w, const WaveletIndex& idx,
                   std::span<const double> x) {
  return w.eval(idx, x);
}

void WaveletCoeffs::set(const WaveletIndex& idx, double value) {
  if (!idx.valid()) throw std::invalid_argument("WaveletCoeffs: bad index");
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), idx,
      [](const auto& e, const WaveletIndex& i) { return e.first < i; });
  if (it != entries_.end() && it->first == idx) {
    if (value == 0.0)
      entries_.erase(it);
    else
      it->second = value;
  } else if (value != 0.0) {
    entries_.insert(it, {idx, value});
  }
}

double WaveletCoeffs::at(const WaveletIndex& idx) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), idx,
      [](const auto& e, const WaveletIndex& i) { return e.first < i; });
  if (it != entries_.end() && it->first == idx) return it->second;
  return 0.0;
}

int WaveletCoeffs::max_level() const {
  int m = -1;
  for (const auto& [idx, a] : entries_) m = std::max(m, idx.level());
  return m;
}

std::vector<double> WaveletCoeffs::abs_values_desc() const {
  std::vector<double> v;
  v.reserve(entries_.size());
  for (const auto& [idx, a] : entries_) v.push_back(std::abs(a));
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

double WaveletCoeffs::energy() const {
  double acc = 0.0;
  for (const auto& [idx, a] : entries_) acc += a * a;
  return acc;
}

TailCheck tail_compactness_check(const WaveletCoeffs& a, double C2,
                                 double beta) {
  if (!(C2 > 0.0)) throw std::invalid_argument("tail check: C2 must be > 0");
  if (!(beta > 0.0))
    throw std::invalid_argument("tail check: beta must be > 0");
  TailCheck res;
  if (a.empty()) return res;
  const int top = a.max_level();
  std::vector<double> per_level(static_cast<std::size_t>(top) + 1, 0.0);
  for (const auto& [idx, v] : a.entries())
    per_level[static_cast<std::size_t>(idx.level())] += v * v;
  double tail = 0.0;
  std::vector<double> tails(per_level.size() + 1, 0.0);
  for (int m = top; m >= 0; --m) {
    tail += per_level[static_cast<std::size_t>(m)];
    tails[static_cast<std::size_t>(m)] = tail;
  }
  for (int m = 0; m <= top; ++m) {
    const double lhs = tails[static_cast<std::size_t>(m)];
    const double rhs = C2 * std::pow(2.0, -beta * m);
    if (lhs > rhs) {
      res.ok = false;
      res.first_violation_m = static_cast<std::size_t>(m);
      res.tail_at_violation = lhs;
      res.bound_at_violation = rhs;
      return res;
    }
  }
  return res;
}

double weak_lp_norm(const WaveletCoeffs& a, double p) {
  const auto v = a.abs_values_desc();
  return weak_lp_norm(std::span<const double>(v), p);
}

PiecewiseLinear WaveletExpansion::synthesize_pl() const {
  if (wavelet.dim() != 1)
    throw std::logic_error("synthesize_pl: only for d = 1");
  std::vector<PiecewiseLinear> fs;
  std::vector<double> cs;
  fs.reserve(coeffs.support_size());
  cs.reserve(coeffs.support_size());
  for (const auto& [idx, a] : coeffs.entries()) {
    fs.push_back(wavelet.pl(idx));
    cs.push_back(a);
  }
  if (fs.empty()) return PiecewiseLinear();
  return PiecewiseLinear::combine(fs, cs);
}

double WaveletExpansion::eval(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& [idx, a] : coeffs.entries()) acc += a * wavelet.eval(idx, x);
  return acc;
}

WaveletCoeffs analyze(const DyadicWavelet& w, const PiecewiseLinear& f,
                      int max_level) {
  if (w.dim() != 1)
    throw std::logic_error("analyze: piecewise path requires d = 1");
  WaveletCoeffs out;
  for (const auto& idx : enumerate_indices(1, max_level)) {
    const double a = w.pl(idx).inner(f);
    if (a != 0.0) out.set(idx, a);
  }
  return out;
}

WaveletCoeffs analyze(const DyadicWavelet& w,
                      const std::function<double(double)>& f, int max_level,
                      double tol) {
  if (w.dim() != 1)
    throw std::logic_error("analyze: quadrature path requires d = 1");
  WaveletCoeffs out;
  for (const auto& idx : enumerate_indices(1, max_level)) {
    const PiecewiseLinear psi = w.pl(idx);
    auto integrand = [&](double x) { return f(x) * psi.eval(x); };
    // integrate cell by cell between the wavelet's own breakpoints
    double coarse = 0.0, fine = 0.0;
    const auto& nodes = psi.nodes();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      coarse += adaptive_simpson(integrand, nodes[i], nodes[i + 1], tol);
      fine += adaptive_simpson(integrand, nodes[i], nodes[i + 1], tol * 0.1);
    }
    if (std::abs(coarse - fine) > 10.0 * tol * (nodes.size() - 1))
      throw std::runtime_error("analyze: quadrature failed to converge at "
                               "index (k=" +
                               std::to_string(idx.k[0]) +
                               ", l=" + std::to_string(idx.l[0]) + ")");
    if (fine != 0.0) out.set(idx, fine);
  }
  return out;
}

WaveletExpansion sample_jp(const DyadicWavelet& w, double p, double C1,
                           double C2, double beta, int max_level, Rng& rng,
                           int max_attempts) {
  if (!(p > 0.0 && p < 2.0))
    throw std::invalid_argument("sample_jp: p must lie in (0, 2)");
  if (!(C1 > 0.0 && C2 > 0.0 && beta > 0.0))
    throw std::invalid_argument("sample_jp: bounds must be positive");
  const auto indices = enumerate_indices(w.dim(), max_level);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<double> mags(indices.size());
    for (std::size_t i = 0; i < mags.size(); ++i)
      mags[i] = C1 * std::pow(static_cast<double>(i + 1), -1.0 / p) *
                rng.uniform(0.5, 1.0);
    // i-th largest magnitude goes to the i-th index in coarse-to-fine order
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    WaveletCoeffs coeffs;
    for (std::size_t i = 0; i < indices.size(); ++i)
      coeffs.set(indices[i], rng.sign() * mags[i]);
    if (tail_compactness_check(coeffs, C2, beta).ok) {
      WaveletExpansion e{w, std::move(coeffs), {p, C1, C2, beta}};
      return e;
    }
  }
  throw std::runtime_error(
      "sample_jp: rejection budget exhausted; the (C1, C2, beta, p) "
      "combination appears infeasible");
}

Truncation top_n_truncate(const WaveletExpansion& e, int N, int m) {
  if (N < 1) throw std::invalid_argument("top_n_truncate: N must be >= 1");
  if (m < 0) throw std::invalid_argument("top_n_truncate: m must be >= 0");
  // candidates below level m, ranked by |a| with the total order as the tie
  // break so the result is deterministic
  std::vector<std::pair<WaveletIndex, double>> kept_pool;
  double discarded = 0.0;
  for (const auto& [idx, a] : e.coeffs.entries()) {
    if (idx.level() < m)
      kept_pool.push_back({idx, a});
    else
      discarded += a * a;
  }
  std::sort(kept_pool.begin(), kept_pool.end(),
            [](const auto& x, const auto& y) {
              const double ax = std::abs(x.second), ay = std::abs(y.second);
              if (ax != ay) return ax > ay;
              return x.first < y.first;
            });
  WaveletCoeffs kept;
  for (std::size_t i = 0; i < kept_pool.size(); ++i) {
    if (static_cast<int>(i) < N)
      kept.set(kept_pool[i].first, kept_pool[i].second);
    else
      discarded += kept_pool[i].second * kept_pool[i].second;
  }
  return {{e.wavelet, std::move(kept), e.bounds}, discarded};
}

}  // namespace minimax
