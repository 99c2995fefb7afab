#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minimax/piecewise.hpp"
#include "minimax/target_function.hpp"

namespace minimax {

// architecture descriptor: L hidden layers, sparsity budget S, width D,
// magnitude bound B >= 1, optional output clip F
struct NetworkArch {
  int L = 1;
  long S = 1;
  int D = 1;
  double B = 1.0;
  std::optional<double> F;
};

// Layered ReLU network W_{L+1} o rho(W_L . - v_L) o ... o rho(W_1 . - v_1)
// with scalar output. Matrices are stored dense at the full declared shapes
// (W_1: D x d, middle: D x D, last: 1 x D); sparsity is whatever is zero.
// Immutable after construction.
class ReluNetwork {
 public:
  ReluNetwork(std::vector<Eigen::MatrixXd> weights,
              std::vector<Eigen::VectorXd> biases, NetworkArch arch);

  static ReluNetwork zero(int input_dim, NetworkArch arch);

  const NetworkArch& arch() const { return arch_; }
  int input_dim() const { return input_dim_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  // exact forward pass; output clipped to [-F, F] when F is set
  double forward(std::span<const double> x) const;
  double forward1(double x) const {
    return forward(std::span<const double>(&x, 1));
  }
  double forward_unclipped(std::span<const double> x) const;

  long nonzero_count() const;

  // exact piecewise view of the network on [0, 1] for d = 1, built by
  // propagating piecewise-linear neuron values layer by layer (clip applied)
  PiecewiseLinear piecewise_1d() const;

  // metadata set by the constructive builders:
  // +1 / -1 when the unclipped output never changes sign, 0 when unknown
  int output_sign = 0;
  // true when the network output is 0 whenever any input coordinate is <= 0,
  // which makes an input-side ReLU clip harmless
  bool vanishes_on_nonpositive = false;

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  NetworkArch arch_;
  int input_dim_ = 1;
};

struct ArchReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// checks the magnitude, sparsity and shape constraints of the declared
// architecture; reports every violation
ArchReport validate_arch(const ReluNetwork& net);

// covering entropy bound 2 S (L+1) ln(B (L+1)(D+1) / delta), natural log
double covering_entropy_bound(const NetworkArch& arch, double delta);

// N-sharing entropy bound
// (N (d+1)^2 + 2 S (L+1)) (L+3) ln(N B (L+1)(D+1) / delta), natural log;
// requires L >= 2 and N >= 1
double shared_entropy_bound(const NetworkArch& arch, int N, int d,
                            double delta);

// One-hidden-layer ramp: 0 on [0, jump - w], linear on [jump - w, jump],
// height from jump on. Exact L2 error against height 1_{[jump, 1]} is
// |height| sqrt(w / 3). Requires 0 < w < min(jump, 1 - jump).
ReluNetwork build_jump_approx(double jump, double height, double w);

// the closed-form certificate for the ramp above
double jump_ramp_l2_error(double height, double w);

// Ramp approximation of the dyadic Haar wavelet psi_{k,l}, with transition
// width `delta` at each of its three jumps (clamped to a quarter cell).
// One hidden layer; output sign is not definite, so the atom is meant for
// dictionaries, not for compose_atoms.
ReluNetwork build_haar_atom(int k, int l, double delta);

// architecture produced by compose_atoms:
// (L+2, n_s (S + 2 D d + d^2 + d + 1), n_s D, max(B, C))
NetworkArch compose_arch(const NetworkArch& sub, int n_s, int d, double C);

// Builds a network computing sum_i c_i sub(A_i x - b_i) inside
// compose_arch(...). The affine maps feed a first ReLU layer, so `sub` must
// certify vanishes_on_nonpositive and a definite output_sign (the library
// ramp builders do). Atoms must satisfy the affine-class bounds for C.
ReluNetwork compose_atoms(const ReluNetwork& sub,
                          const std::vector<AffineAtom>& atoms, double C);

// N-sharing family: x -> sum_i c_i base(A_i x - b_i)
struct SharedFamily {
  ReluNetwork base;
  struct Atom {
    double c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
  };
  std::vector<Atom> atoms;
};

// validates the |c|, ||A||_inf, ||b||_inf <= B bounds, then evaluates
double eval_shared(const SharedFamily& fam, std::span<const double> x);

// JSON serialization (dense rows + explicit sparsity mask + version field)
std::string network_to_json(const ReluNetwork& net, int indent = -1);
ReluNetwork network_from_json(const std::string& text);

}  // namespace minimax
