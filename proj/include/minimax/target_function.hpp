#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "minimax/piecewise.hpp"
#include "minimax/rng.hpp"
#include "minimax/wavelets.hpp"

namespace minimax {

// ---------------------------------------------------------------------------
// Piecewise-constant functions a0 + sum_i a_i 1_{[t_i, 1]}
// ---------------------------------------------------------------------------

struct PiecewiseConstantFn {
  struct Jump {
    double t;  // location in (0, 1]
    double a;  // jump size
  };

  double a0 = 0.0;
  std::vector<Jump> jumps;  // normalized: t strictly increasing, a nonzero

  // normalizes: sorts by location, merges duplicate locations by summing
  // their coefficients, and drops zero jumps
  static PiecewiseConstantFn make(double a0, std::vector<Jump> jumps);

  double eval(double x) const;
  PiecewiseLinear to_piecewise() const;  // a.e. view (a jump at t = 1 is null)
};

// sum_i |a_i|, the exact total variation of this representation
double total_variation(const PiecewiseConstantFn& f);

// ---------------------------------------------------------------------------
// Base functions and affine atoms for the l0-bounded affine class
// ---------------------------------------------------------------------------

// tensor product of 1-d piecewise-linear factors, zero outside [0,1]^d,
// with unit L2 norm validated at registration
struct BaseFunction {
  std::string id;
  std::vector<PiecewiseLinear> factors;

  int dim() const { return static_cast<int>(factors.size()); }
  double eval(std::span<const double> t) const;
  double sup_norm() const;
  double l2_norm_sq() const;
};

// the canonical jump function sqrt(2) * 1_{[1/2, 1]}
BaseFunction haar_jump_base(int dim = 1);
// the Haar mother as a base function
BaseFunction haar_mother_base(int dim = 1);

// validates unit L2 norm of every entry (quadrature at registration)
std::vector<BaseFunction> make_phi_set(std::vector<BaseFunction> fns,
                                       double tol = 1e-9);

struct AffineAtom {
  double c = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::string phi_id;
};

// ---------------------------------------------------------------------------
// TargetFunction
// ---------------------------------------------------------------------------

enum class TargetKind { Jk, I0, Jp, Kp, Custom };

std::string to_string(TargetKind k);
TargetKind target_kind_from_string(const std::string& s);

struct I0Payload {
  std::vector<AffineAtom> atoms;
  std::vector<BaseFunction> basis;  // resolves phi_id
  const BaseFunction& phi(const AffineAtom& atom) const;
};

struct KpPart {
  WaveletExpansion expansion;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct KpPayload {
  std::vector<KpPart> parts;
};

struct CustomPayload {
  PiecewiseLinear fn;
  std::string label;
};

// class-membership parameters carried alongside the representation
struct ClassParams {
  int k = 0;                 // Jk: jump budget
  int n_s = 0;               // I0/Kp: atom count
  double C = 0.0;            // Jk/I0 bound
  double C3 = 0.0;           // Kp affine bound
  SparsityBounds sparsity;   // Jp/Kp coefficient bounds
};

// Evaluatable true regression function carrying class-membership metadata.
// Immutable after construction; evaluation is pure.
class TargetFunction {
 public:
  static TargetFunction jk(PiecewiseConstantFn f, int k, double C);
  static TargetFunction i0(std::vector<AffineAtom> atoms,
                           std::vector<BaseFunction> basis, int n_s, double C);
  static TargetFunction jp(WaveletExpansion e);
  static TargetFunction kp(std::vector<KpPart> parts, int n_s, double C3,
                           SparsityBounds bounds);
  static TargetFunction custom(PiecewiseLinear f, std::string label);
  static TargetFunction zero() {
    return custom(PiecewiseLinear(), "zero");
  }

  TargetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double sup_bound() const { return sup_bound_; }
  const ClassParams& params() const { return params_; }

  double eval(std::span<const double> x) const;  // throws outside [0,1]^d
  double eval1(double x) const {
    return eval(std::span<const double>(&x, 1));
  }

  // exact piecewise view, available for every d = 1 kind
  const std::optional<PiecewiseLinear>& piecewise() const { return pl_; }

  const PiecewiseConstantFn& as_jk() const;
  const I0Payload& as_i0() const;
  const WaveletExpansion& as_jp() const;
  const KpPayload& as_kp() const;
  const CustomPayload& as_custom() const;

 private:
  TargetFunction() = default;

  TargetKind kind_ = TargetKind::Custom;
  int dim_ = 1;
  double sup_bound_ = 0.0;
  ClassParams params_;
  std::variant<PiecewiseConstantFn, I0Payload, WaveletExpansion, KpPayload,
               CustomPayload>
      payload_;
  std::optional<PiecewiseLinear> pl_;
};

double eval_target(const TargetFunction& f, std::span<const double> x);

// ---------------------------------------------------------------------------
// Samplers (explicit laws; see the membership validators below)
// ---------------------------------------------------------------------------

// a0 uniform on [-C, C]; locations uniform on (0, 1]; magnitudes a random
// simplex point scaled to sum exactly C, with random signs
TargetFunction sample_jk(int k, double C, Rng& rng);

// diagonal-dominant A with |det A|^{-1}, ||A||_inf <= C by rejection;
// b placed so that the atom support meets the unit cube; |c| <= C uniform
TargetFunction sample_i0(int n_s, double C,
                         const std::vector<BaseFunction>& phi_set, Rng& rng,
                         int max_attempts = 1000);

// n_s independent J^p draws composed with affine maps drawn with bound C3
TargetFunction sample_kp(const std::vector<DyadicWavelet>& psi_set, int n_s,
                         double p, double C1, double C2, double C3,
                         double beta, int max_level, Rng& rng);

// wraps an expansion as a TargetFunction of kind Jp
TargetFunction synthesize(const WaveletExpansion& e);

// ---------------------------------------------------------------------------
// Membership validators; empty result means the function is in the class
// ---------------------------------------------------------------------------

std::vector<std::string> validate_jk(const TargetFunction& f, int k, double C);
std::vector<std::string> validate_i0(const TargetFunction& f, double C);
std::vector<std::string> validate_jp(const WaveletExpansion& e);
std::vector<std::string> validate_kp(const TargetFunction& f);

// ---------------------------------------------------------------------------
// JSON serialization; round trip is bit-identical on all numeric fields
// ---------------------------------------------------------------------------

std::string target_to_json(const TargetFunction& f, int indent = -1);
TargetFunction target_from_json(const std::string& text);

}  // namespace minimax
