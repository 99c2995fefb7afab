#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace minimax {

// class-membership bounds carried alongside a coefficient sequence
struct SparsityBounds {
  double p = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double beta = 0.0;
};

// Sparse real sequence indexed by ordinals 1, 2, ... Stored entries are
// nonzero; absent indices mean zero. Finite support throughout (samplers
// never produce infinite sequences).
class CoeffSeq {
 public:
  CoeffSeq() = default;

  // dense[i] becomes the coefficient at ordinal index i + 1
  static CoeffSeq from_dense(std::span<const double> dense);

  void set(std::size_t index, double value);  // index >= 1; 0 erases
  double at(std::size_t index) const;

  std::size_t support_size() const { return entries_.size(); }
  std::size_t max_index() const;
  bool empty() const { return entries_.empty(); }

  // sorted by index, ascending
  const std::vector<std::pair<std::size_t, double>>& entries() const {
    return entries_;
  }

  std::vector<double> abs_values_desc() const;

  std::optional<SparsityBounds> bounds;

 private:
  std::vector<std::pair<std::size_t, double>> entries_;
};

// sup_i i^{1/p} |a|_(i) over the decreasing rearrangement; 0 for the empty
// sequence; rejects p outside (0, 2)
double weak_lp_norm(const CoeffSeq& a, double p);
double weak_lp_norm(std::span<const double> values, double p);

// (sum |a_i|^p)^{1/p}, p > 0
double lp_norm(const CoeffSeq& a, double p);

// number of nonzero entries
std::size_t l0_norm(const CoeffSeq& a);

struct TailCheck {
  bool ok = true;
  std::size_t first_violation_m = 0;
  double tail_at_violation = 0.0;
  double bound_at_violation = 0.0;
};

// beta-minimal tail compactness in the ordinal ordering:
// sum_{i > m} a_i^2 <= C2 m^{-beta} for every m >= 1 up to the support's
// extent. Rejects C2 <= 0 or beta <= 0.
TailCheck tail_compactness_check(const CoeffSeq& a, double C2, double beta);

}  // namespace minimax
