#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "minimax/coeff_seq.hpp"
#include "minimax/piecewise.hpp"
#include "minimax/rng.hpp"

namespace minimax {

// Dyadic index (k, l) with per-coordinate scales k_i >= 0 and shifts
// 0 <= l_i < 2^{k_i}. The level of an index is max_i k_i; the total order
// used for coefficient assignment is (level, k, l) with lexicographic
// tie-breaks, which refines the coarse-to-fine partial order.
struct WaveletIndex {
  std::vector<int> k;
  std::vector<int> l;

  static WaveletIndex d1(int k, int l) { return {{k}, {l}}; }

  int dim() const { return static_cast<int>(k.size()); }
  int level() const;
  bool valid() const;

  bool operator==(const WaveletIndex& o) const { return k == o.k && l == o.l; }
  bool operator<(const WaveletIndex& o) const;
};

// all valid indices with level <= max_level, in total order
std::vector<WaveletIndex> enumerate_indices(int dim, int max_level);

// Orthogonal wavelet system psi_{k,l}(x) = 2^{k/2} psi(2^k x - l); in d > 1
// dimensions the tensor product of per-coordinate mothers. Mothers are
// piecewise-linear functions on [0, 1] with unit L2 norm; orthonormality up
// to a working level is verified by exact integration at construction.
class DyadicWavelet {
 public:
  // mother Haar: 1_{[0, 1/2)} - 1_{[1/2, 1)}, replicated across coordinates
  static DyadicWavelet haar(int dim = 1);

  DyadicWavelet(std::string name, std::vector<PiecewiseLinear> mothers,
                int verify_level = 4, double tol = 1e-10);

  int dim() const { return static_cast<int>(mothers_.size()); }
  const std::string& name() const { return name_; }
  const PiecewiseLinear& mother(int coord) const { return mothers_[coord]; }

  // exact formula evaluation with zero extension outside [0, 1] per
  // coordinate; throws on an invalid index or dimension mismatch
  double eval(const WaveletIndex& idx, std::span<const double> x) const;

  // one-coordinate factor 2^{k/2} psi(2^k . - l) as an exact piecewise view
  PiecewiseLinear pl_factor(int coord, int k, int l) const;

  // d == 1 convenience: the full psi_{k,l}
  PiecewiseLinear pl(const WaveletIndex& idx) const;

  // exact <psi_idx, psi_jdx> by iterated per-axis integration
  double gram_entry(const WaveletIndex& a, const WaveletIndex& b) const;

  // max |Gram - I| over all index pairs with level <= max_level
  double max_gram_deviation(int max_level) const;

 private:
  std::string name_;
  std::vector<PiecewiseLinear> mothers_;
};

// free-function form of the evaluation operation
double eval_dyadic(const DyadicWavelet& w, const WaveletIndex& idx,
                   std::span<const double> x);

// sparse coefficient map keyed by wavelet index, kept in total order
class WaveletCoeffs {
 public:
  void set(const WaveletIndex& idx, double value);  // 0 erases
  double at(const WaveletIndex& idx) const;
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int max_level() const;

  const std::vector<std::pair<WaveletIndex, double>>& entries() const {
    return entries_;
  }
  std::vector<double> abs_values_desc() const;
  double energy() const;  // sum of squares

 private:
  std::vector<std::pair<WaveletIndex, double>> entries_;
};

// dyadic-level tail compactness: sum over indices with level >= m of a^2
// bounded by C2 2^{-beta m} for every m >= 0 up to the support's extent
TailCheck tail_compactness_check(const WaveletCoeffs& a, double C2,
                                 double beta);

double weak_lp_norm(const WaveletCoeffs& a, double p);

struct WaveletExpansion {
  DyadicWavelet wavelet;
  WaveletCoeffs coeffs;
  SparsityBounds bounds;

  // exact piecewise view of the synthesized function (d == 1 only)
  PiecewiseLinear synthesize_pl() const;

  // term-by-term evaluation in any dimension
  double eval(std::span<const double> x) const;
};

// coefficients <f, psi_{k,l}> up to max_level, exact for piecewise f (d = 1)
WaveletCoeffs analyze(const DyadicWavelet& w, const PiecewiseLinear& f,
                      int max_level);

// adaptive-quadrature path for a general integrand; a coefficient whose
// refinement disagrees by more than 10x the tolerance reports the offending
// index
WaveletCoeffs analyze(const DyadicWavelet& w,
                      const std::function<double(double)>& f, int max_level,
                      double tol = 1e-9);

// draws |a|_(i) = C1 i^{-1/p} u_i with u_i uniform on [1/2, 1] and random
// signs, assigns the i-th largest magnitude to the i-th index in the total
// order, and rejection-resamples until the dyadic tail check passes
WaveletExpansion sample_jp(const DyadicWavelet& w, double p, double C1,
                           double C2, double beta, int max_level, Rng& rng,
                           int max_attempts = 200);

struct Truncation {
  WaveletExpansion kept;
  double discarded_energy;  // sum of squares of dropped coefficients
};

// keeps the N absolutely largest coefficients among indices with
// level < m, drops everything else, and reports the dropped energy exactly
Truncation top_n_truncate(const WaveletExpansion& e, int N, int m);

}  // namespace minimax
