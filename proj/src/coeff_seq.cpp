#include "minimax/coeff_seq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minimax {

CoeffSeq CoeffSeq::from_dense(std::span<const double> dense) {
  CoeffSeq out;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) out.entries_.emplace_back(i + 1, dense[i]);
  return out;
}

void CoeffSeq::set(std::size_t index, double value) {
  if (index == 0) throw std::invalid_argument("CoeffSeq: indices start at 1");
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const auto& e, std::size_t i) { return e.first < i; });
  if (it != entries_.end() && it->first == index) {
    if (value == 0.0)
      entries_.erase(it);
    else
      it->second = value;
  } else if (value != 0.0) {
    entries_.insert(it, {index, value});
  }
}

double CoeffSeq::at(std::size_t index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const auto& e, std::size_t i) { return e.first < i; });
  if (it != entries_.end() && it->first == index) return it->second;
  return 0.0;
}

std::size_t CoeffSeq::max_index() const {
  return entries_.empty() ? 0 : entries_.back().first;
}

std::vector<double> CoeffSeq::abs_values_desc() const {
  std::vector<double> v;
  v.reserve(entries_.size());
  for (const auto& [i, a] : entries_) v.push_back(std::abs(a));
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

double weak_lp_norm(std::span<const double> values, double p) {
  if (!(p > 0.0 && p < 2.0))
    throw std::invalid_argument("weak_lp_norm: p must lie in (0, 2)");
  std::vector<double> v(values.begin(), values.end());
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end(), std::greater<double>());
  double sup = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) break;  // remaining terms contribute zero
    sup = std::max(sup, std::pow(static_cast<double>(i + 1), 1.0 / p) * v[i]);
  }
  return sup;
}

double weak_lp_norm(const CoeffSeq& a, double p) {
  const auto v = a.abs_values_desc();
  return weak_lp_norm(std::span<const double>(v), p);
}

double lp_norm(const CoeffSeq& a, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm: p must be positive");
  double acc = 0.0;
  for (const auto& [i, v] : a.entries()) acc += std::pow(std::abs(v), p);
  return std::pow(acc, 1.0 / p);
}

std::size_t l0_norm(const CoeffSeq& a) { return a.support_size(); }

TailCheck tail_compactness_check(const CoeffSeq& a, double C2, double beta) {
  if (!(C2 > 0.0)) throw std::invalid_argument("tail check: C2 must be > 0");
  if (!(beta > 0.0))
    throw std::invalid_argument("tail check: beta must be > 0");
  TailCheck res;
  const std::size_t extent = a.max_index();
  if (extent == 0) return res;
  // suffix sums of squares on the dense range [1, extent]
  std::vector<double> tail(extent + 2, 0.0);
  for (auto it = a.entries().rbegin(); it != a.entries().rend(); ++it) {
    // fill handled below; record squares at their index
    tail[it->first] += it->second * it->second;
  }
  for (std::size_t i = extent; i >= 1; --i) tail[i] += tail[i + 1];
  // tail[m + 1] = sum_{i > m} a_i^2; beyond the extent the tail vanishes
  for (std::size_t m = 1; m <= extent; ++m) {
    const double lhs = tail[m + 1];
    const double rhs = C2 * std::pow(static_cast<double>(m), -beta);
    if (lhs > rhs) {
      res.ok = false;
      res.first_violation_m = m;
      res.tail_at_violation = lhs;
      res.bound_at_violation = rhs;
      return res;
    }
  }
  return res;
}

}  // namespace minimax
