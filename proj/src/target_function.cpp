#include "minimax/target_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace minimax {

using nlohmann::json;

// ---------------------------------------------------------------------------
// PiecewiseConstantFn
// ---------------------------------------------------------------------------

PiecewiseConstantFn PiecewiseConstantFn::make(double a0,
                                              std::vector<Jump> jumps) {
  for (const auto& j : jumps)
    if (!(j.t > 0.0 && j.t <= 1.0))
      throw std::invalid_argument("PiecewiseConstantFn: t must be in (0, 1]");
  std::sort(jumps.begin(), jumps.end(),
            [](const Jump& x, const Jump& y) { return x.t < y.t; });
  PiecewiseConstantFn out;
  out.a0 = a0;
  for (const auto& j : jumps) {
    if (!out.jumps.empty() && out.jumps.back().t == j.t)
      out.jumps.back().a += j.a;  // duplicate locations merge by summation
    else
      out.jumps.push_back(j);
  }
  std::erase_if(out.jumps, [](const Jump& j) { return j.a == 0.0; });
  return out;
}

double PiecewiseConstantFn::eval(double x) const {
  double acc = a0;
  for (const auto& j : jumps) {
    if (j.t > x) break;
    acc += j.a;
  }
  return acc;
}

PiecewiseLinear PiecewiseConstantFn::to_piecewise() const {
  PiecewiseLinear out = PiecewiseLinear::constant(a0);
  for (const auto& j : jumps) {
    if (j.t == 1.0) continue;  // null jump at the right endpoint
    out = out.plus(PiecewiseLinear::step(j.t, j.a));
  }
  return out;
}

double total_variation(const PiecewiseConstantFn& f) {
  double acc = 0.0;
  for (const auto& j : f.jumps) acc += std::abs(j.a);
  return acc;
}

// ---------------------------------------------------------------------------
// BaseFunction
// ---------------------------------------------------------------------------

double BaseFunction::eval(std::span<const double> t) const {
  if (t.size() != factors.size())
    throw std::invalid_argument("BaseFunction: dimension mismatch");
  double prod = 1.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (t[i] < 0.0 || t[i] > 1.0) return 0.0;  // zero extension
    prod *= factors[i].eval(t[i]);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

double BaseFunction::sup_norm() const {
  double prod = 1.0;
  for (const auto& f : factors) prod *= f.max_abs();
  return prod;
}

double BaseFunction::l2_norm_sq() const {
  double prod = 1.0;
  for (const auto& f : factors) prod *= f.l2_norm_sq();
  return prod;
}

BaseFunction haar_jump_base(int dim) {
  BaseFunction out;
  out.id = "haar_jump";
  const double root2 = std::sqrt(2.0);
  for (int i = 0; i < dim; ++i)
    out.factors.push_back(PiecewiseLinear::step(0.5, root2));
  return out;
}

BaseFunction haar_mother_base(int dim) {
  BaseFunction out;
  out.id = "haar_mother";
  for (int i = 0; i < dim; ++i)
    out.factors.push_back(PiecewiseLinear(
        {0.0, 0.5, 1.0}, {{1.0, 1.0}, {-1.0, -1.0}}));
  return out;
}

std::vector<BaseFunction> make_phi_set(std::vector<BaseFunction> fns,
                                       double tol) {
  if (fns.empty()) throw std::invalid_argument("make_phi_set: empty set");
  const int d = fns.front().dim();
  for (const auto& f : fns) {
    if (f.dim() != d)
      throw std::invalid_argument("make_phi_set: mixed dimensions");
    if (std::abs(std::sqrt(f.l2_norm_sq()) - 1.0) > tol)
      throw std::invalid_argument("make_phi_set: '" + f.id +
                                  "' is not unit L2 norm");
  }
  return fns;
}

const BaseFunction& I0Payload::phi(const AffineAtom& atom) const {
  for (const auto& f : basis)
    if (f.id == atom.phi_id) return f;
  throw std::invalid_argument("I0Payload: unknown phi_id '" + atom.phi_id +
                              "'");
}

// ---------------------------------------------------------------------------
// TargetFunction
// ---------------------------------------------------------------------------

std::string to_string(TargetKind k) {
  switch (k) {
    case TargetKind::Jk: return "jk";
    case TargetKind::I0: return "i0";
    case TargetKind::Jp: return "jp";
    case TargetKind::Kp: return "kp";
    case TargetKind::Custom: return "custom";
  }
  return "custom";
}

TargetKind target_kind_from_string(const std::string& s) {
  if (s == "jk") return TargetKind::Jk;
  if (s == "i0") return TargetKind::I0;
  if (s == "jp") return TargetKind::Jp;
  if (s == "kp") return TargetKind::Kp;
  if (s == "custom") return TargetKind::Custom;
  throw std::invalid_argument("unknown target kind '" + s + "'");
}

namespace {

// sup of a d-dimensional evaluatable on a lattice of roughly 2^14 points
template <typename F>
double grid_sup(const F& f, int dim, int points_total = 1 << 14) {
  const int per_axis =
      std::max(2, static_cast<int>(std::round(
                      std::pow(static_cast<double>(points_total),
                               1.0 / static_cast<double>(dim)))));
  std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
  std::vector<int> ix(static_cast<std::size_t>(dim), 0);
  double sup = 0.0;
  for (;;) {
    for (int c = 0; c < dim; ++c)
      x[static_cast<std::size_t>(c)] =
          (ix[static_cast<std::size_t>(c)] + 0.5) / per_axis;
    sup = std::max(sup, std::abs(f(x)));
    int c = dim - 1;
    while (c >= 0 && ++ix[static_cast<std::size_t>(c)] >= per_axis)
      ix[static_cast<std::size_t>(c--)] = 0;
    if (c < 0) break;
  }
  return sup;
}

PiecewiseLinear atom_pl_1d(const AffineAtom& atom, const BaseFunction& phi) {
  return phi.factors[0]
      .pullback_affine(atom.A(0, 0), atom.b(0))
      .scaled(atom.c);
}

}  // namespace

TargetFunction TargetFunction::jk(PiecewiseConstantFn f, int k, double C) {
  TargetFunction out;
  out.kind_ = TargetKind::Jk;
  out.dim_ = 1;
  out.params_.k = k;
  out.params_.C = C;
  // exact sup over the constant pieces
  double running = f.a0, sup = std::abs(f.a0);
  for (const auto& j : f.jumps) {
    running += j.a;
    sup = std::max(sup, std::abs(running));
  }
  out.sup_bound_ = sup;
  out.pl_ = f.to_piecewise();
  out.payload_ = std::move(f);
  return out;
}

TargetFunction TargetFunction::i0(std::vector<AffineAtom> atoms,
                                  std::vector<BaseFunction> basis, int n_s,
                                  double C) {
  if (atoms.empty() || basis.empty())
    throw std::invalid_argument("i0: empty atoms or basis");
  const int d = basis.front().dim();
  for (const auto& a : atoms)
    if (a.A.rows() != d || a.A.cols() != d || a.b.size() != d)
      throw std::invalid_argument("i0: affine shape mismatch");
  TargetFunction out;
  out.kind_ = TargetKind::I0;
  out.dim_ = d;
  out.params_.n_s = n_s;
  out.params_.C = C;
  I0Payload payload{std::move(atoms), std::move(basis)};
  double max_sup = 0.0;
  for (const auto& f : payload.basis) max_sup = std::max(max_sup, f.sup_norm());
  out.sup_bound_ = n_s * C * max_sup;
  if (d == 1) {
    std::vector<PiecewiseLinear> fs;
    std::vector<double> cs;
    for (const auto& a : payload.atoms) {
      fs.push_back(atom_pl_1d(a, payload.phi(a)));
      cs.push_back(1.0);
    }
    out.pl_ = PiecewiseLinear::combine(fs, cs);
  }
  out.payload_ = std::move(payload);
  return out;
}

TargetFunction TargetFunction::jp(WaveletExpansion e) {
  TargetFunction out;
  out.kind_ = TargetKind::Jp;
  out.dim_ = e.wavelet.dim();
  out.params_.sparsity = e.bounds;
  if (out.dim_ == 1) {
    out.pl_ = e.synthesize_pl();
    out.sup_bound_ = out.pl_->max_abs();
  } else {
    out.sup_bound_ =
        1.05 * grid_sup([&](const std::vector<double>& x) { return e.eval(x); },
                        out.dim_);
  }
  out.payload_ = std::move(e);
  return out;
}

TargetFunction TargetFunction::kp(std::vector<KpPart> parts, int n_s,
                                  double C3, SparsityBounds bounds) {
  if (parts.empty()) throw std::invalid_argument("kp: no parts");
  const int d = parts.front().expansion.wavelet.dim();
  TargetFunction out;
  out.kind_ = TargetKind::Kp;
  out.dim_ = d;
  out.params_.n_s = n_s;
  out.params_.C3 = C3;
  out.params_.sparsity = bounds;
  // sup bound: per-part sup of f_j on a 2^14-point grid, summed, then
  // inflated by 5% (|f_j(A x - b)| never exceeds sup |f_j|)
  double acc = 0.0;
  for (const auto& part : parts)
    acc += grid_sup(
        [&](const std::vector<double>& x) { return part.expansion.eval(x); },
        d);
  out.sup_bound_ = 1.05 * acc;
  if (d == 1) {
    std::vector<PiecewiseLinear> fs;
    std::vector<double> cs;
    for (const auto& part : parts) {
      fs.push_back(part.expansion.synthesize_pl().pullback_affine(
          part.A(0, 0), part.b(0)));
      cs.push_back(1.0);
    }
    out.pl_ = PiecewiseLinear::combine(fs, cs);
  }
  out.payload_ = KpPayload{std::move(parts)};
  return out;
}

TargetFunction TargetFunction::custom(PiecewiseLinear f, std::string label) {
  TargetFunction out;
  out.kind_ = TargetKind::Custom;
  out.dim_ = 1;
  out.sup_bound_ = f.max_abs();
  out.pl_ = f;
  out.payload_ = CustomPayload{std::move(f), std::move(label)};
  return out;
}

const PiecewiseConstantFn& TargetFunction::as_jk() const {
  if (kind_ != TargetKind::Jk) throw std::logic_error("not a Jk target");
  return std::get<PiecewiseConstantFn>(payload_);
}
const I0Payload& TargetFunction::as_i0() const {
  if (kind_ != TargetKind::I0) throw std::logic_error("not an I0 target");
  return std::get<I0Payload>(payload_);
}
const WaveletExpansion& TargetFunction::as_jp() const {
  if (kind_ != TargetKind::Jp) throw std::logic_error("not a Jp target");
  return std::get<WaveletExpansion>(payload_);
}
const KpPayload& TargetFunction::as_kp() const {
  if (kind_ != TargetKind::Kp) throw std::logic_error("not a Kp target");
  return std::get<KpPayload>(payload_);
}
const CustomPayload& TargetFunction::as_custom() const {
  if (kind_ != TargetKind::Custom)
    throw std::logic_error("not a custom target");
  return std::get<CustomPayload>(payload_);
}

double TargetFunction::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("eval: dimension mismatch");
  for (double xi : x)
    if (!(xi >= 0.0 && xi <= 1.0))
      throw std::domain_error("eval: x outside [0, 1]^d");
  switch (kind_) {
    case TargetKind::Jk:
      return std::get<PiecewiseConstantFn>(payload_).eval(x[0]);
    case TargetKind::I0: {
      const auto& p = std::get<I0Payload>(payload_);
      double acc = 0.0;
      Eigen::VectorXd xv(dim_);
      for (int i = 0; i < dim_; ++i) xv(i) = x[static_cast<std::size_t>(i)];
      for (const auto& atom : p.atoms) {
        Eigen::VectorXd t = atom.A * xv - atom.b;
        acc += atom.c *
               p.phi(atom).eval(std::span<const double>(t.data(),
                                                        t.size()));
      }
      return acc;
    }
    case TargetKind::Jp: {
      if (dim_ == 1) return pl_->eval(x[0]);
      return std::get<WaveletExpansion>(payload_).eval(x);
    }
    case TargetKind::Kp: {
      if (dim_ == 1) return pl_->eval(x[0]);
      const auto& p = std::get<KpPayload>(payload_);
      double acc = 0.0;
      Eigen::VectorXd xv(dim_);
      for (int i = 0; i < dim_; ++i) xv(i) = x[static_cast<std::size_t>(i)];
      for (const auto& part : p.parts) {
        Eigen::VectorXd t = part.A * xv - part.b;
        bool inside = true;
        for (int i = 0; i < dim_; ++i)
          if (t(i) < 0.0 || t(i) > 1.0) inside = false;
        if (inside)
          acc += part.expansion.eval(
              std::span<const double>(t.data(), t.size()));
      }
      return acc;
    }
    case TargetKind::Custom:
      return pl_->eval(x[0]);
  }
  return 0.0;
}

double eval_target(const TargetFunction& f, std::span<const double> x) {
  return f.eval(x);
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

TargetFunction sample_jk(int k, double C, Rng& rng) {
  if (k < 1 || !(C > 0.0)) throw std::invalid_argument("sample_jk: bad args");
  const double a0 = rng.uniform(-C, C);
  std::vector<double> e(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& v : e) {
    v = -std::log(1.0 - rng.uniform());  // exponential, simplex via normalize
    total += v;
  }
  std::vector<PiecewiseConstantFn::Jump> jumps;
  for (int i = 0; i < k; ++i) {
    double t = 1.0 - rng.uniform();  // uniform on (0, 1]
    jumps.push_back(
        {t, rng.sign() * C * e[static_cast<std::size_t>(i)] / total});
  }
  return TargetFunction::jk(PiecewiseConstantFn::make(a0, std::move(jumps)),
                            k, C);
}

namespace {

// diagonal-dominant matrix with max-entry norm and inverse-determinant both
// bounded by bound; rejection-checked
bool draw_affine(int d, double bound, Rng& rng, Eigen::MatrixXd& A,
                 Eigen::VectorXd& b) {
  if (!(bound >= 1.0)) return false;  // |a| <= C and |a|^{-1} <= C need C >= 1
  A = Eigen::MatrixXd::Zero(d, d);
  double min_diag = bound;
  for (int i = 0; i < d; ++i) {
    const double mag = rng.uniform(1.0 / bound, bound);
    A(i, i) = rng.sign() * mag;
    min_diag = std::min(min_diag, mag);
  }
  if (d > 1) {
    const double off_cap = 0.4 * min_diag / static_cast<double>(d - 1);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j) A(i, j) = rng.uniform(-off_cap, off_cap);
  }
  const double det = A.determinant();
  if (det == 0.0 || 1.0 / std::abs(det) > bound) return false;
  if (A.cwiseAbs().maxCoeff() > bound) return false;
  // place b so the atom support meets the unit cube
  Eigen::VectorXd x0(d), t0(d);
  for (int i = 0; i < d; ++i) {
    x0(i) = rng.uniform();
    t0(i) = rng.uniform(0.25, 0.75);
  }
  b = A * x0 - t0;
  if (b.cwiseAbs().maxCoeff() > bound) return false;
  return true;
}

}  // namespace

TargetFunction sample_i0(int n_s, double C,
                         const std::vector<BaseFunction>& phi_set, Rng& rng,
                         int max_attempts) {
  if (n_s < 1 || !(C > 0.0) || phi_set.empty())
    throw std::invalid_argument("sample_i0: bad args");
  const int d = phi_set.front().dim();
  std::vector<AffineAtom> atoms;
  for (int i = 0; i < n_s; ++i) {
    AffineAtom atom;
    bool ok = false;
    for (int attempt = 0; attempt < max_attempts && !ok; ++attempt)
      ok = draw_affine(d, C, rng, atom.A, atom.b);
    if (!ok)
      throw std::runtime_error(
          "sample_i0: rejection budget exhausted; (d, C) combination "
          "appears infeasible");
    atom.c = rng.uniform(-C, C);
    atom.phi_id =
        phi_set[static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<long>(phi_set.size()) - 1))]
            .id;
    atoms.push_back(std::move(atom));
  }
  return TargetFunction::i0(std::move(atoms), phi_set, n_s, C);
}

TargetFunction sample_kp(const std::vector<DyadicWavelet>& psi_set, int n_s,
                         double p, double C1, double C2, double C3,
                         double beta, int max_level, Rng& rng) {
  if (n_s < 1 || !(C3 > 0.0) || psi_set.empty())
    throw std::invalid_argument("sample_kp: bad args");
  const int d = psi_set.front().dim();
  std::vector<KpPart> parts;
  for (int j = 0; j < n_s; ++j) {
    const auto& psi = psi_set[static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<long>(psi_set.size()) - 1))];
    KpPart part{sample_jp(psi, p, C1, C2, beta, max_level, rng),
                Eigen::MatrixXd(), Eigen::VectorXd()};
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt)
      ok = draw_affine(d, C3, rng, part.A, part.b);
    if (!ok)
      throw std::runtime_error("sample_kp: affine rejection budget exhausted");
    parts.push_back(std::move(part));
  }
  return TargetFunction::kp(std::move(parts), n_s, C3,
                            {p, C1, C2, beta});
}

TargetFunction synthesize(const WaveletExpansion& e) {
  return TargetFunction::jp(e);
}

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

namespace {
constexpr double kRelTol = 1e-9;

bool leq(double value, double bound) {
  return value <= bound * (1.0 + kRelTol) + kRelTol * 1e-3;
}
}  // namespace

std::vector<std::string> validate_jk(const TargetFunction& f, int k,
                                     double C) {
  std::vector<std::string> out;
  if (f.kind() != TargetKind::Jk) {
    out.push_back("not a Jk target");
    return out;
  }
  const auto& pc = f.as_jk();
  if (static_cast<int>(pc.jumps.size()) > k)
    out.push_back("more than k jumps");
  if (!leq(std::abs(pc.a0), C)) out.push_back("|a0| exceeds C");
  double mass = 0.0;
  double prev = 0.0;
  for (const auto& j : pc.jumps) {
    mass += std::abs(j.a);
    if (!(j.t > 0.0 && j.t <= 1.0)) out.push_back("jump location outside (0, 1]");
    if (j.t <= prev) out.push_back("jump locations not strictly increasing");
    if (j.a == 0.0) out.push_back("zero jump retained");
    prev = j.t;
  }
  if (!leq(mass, C)) out.push_back("total jump mass exceeds C");
  return out;
}

std::vector<std::string> validate_i0(const TargetFunction& f, double C) {
  std::vector<std::string> out;
  if (f.kind() != TargetKind::I0) {
    out.push_back("not an I0 target");
    return out;
  }
  const auto& p = f.as_i0();
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    const auto& a = p.atoms[i];
    const std::string tag = "atom " + std::to_string(i) + ": ";
    const double det = a.A.determinant();
    if (det == 0.0 || !leq(1.0 / std::abs(det), C))
      out.push_back(tag + "|det A|^{-1} exceeds C");
    if (!leq(a.A.cwiseAbs().maxCoeff(), C))
      out.push_back(tag + "||A||_inf exceeds C");
    if (!leq(a.b.cwiseAbs().maxCoeff(), C))
      out.push_back(tag + "||b||_inf exceeds C");
    if (!leq(std::abs(a.c), C)) out.push_back(tag + "|c| exceeds C");
    if (std::abs(std::sqrt(p.phi(a).l2_norm_sq()) - 1.0) > 1e-8)
      out.push_back(tag + "phi is not unit norm");
  }
  return out;
}

std::vector<std::string> validate_jp(const WaveletExpansion& e) {
  std::vector<std::string> out;
  const auto& b = e.bounds;
  if (!(b.p > 0.0 && b.p < 2.0)) {
    out.push_back("p outside (0, 2)");
    return out;
  }
  if (!leq(weak_lp_norm(e.coeffs, b.p), b.C1))
    out.push_back("weak lp norm exceeds C1");
  const auto tail = tail_compactness_check(e.coeffs, b.C2, b.beta);
  if (!tail.ok)
    out.push_back("tail bound violated at m = " +
                   std::to_string(tail.first_violation_m));
  return out;
}

std::vector<std::string> validate_kp(const TargetFunction& f) {
  std::vector<std::string> out;
  if (f.kind() != TargetKind::Kp) {
    out.push_back("not a Kp target");
    return out;
  }
  const auto& payload = f.as_kp();
  const double C3 = f.params().C3;
  for (std::size_t j = 0; j < payload.parts.size(); ++j) {
    const auto& part = payload.parts[j];
    const std::string tag = "part " + std::to_string(j) + ": ";
    for (const auto& v : validate_jp(part.expansion)) out.push_back(tag + v);
    const double det = part.A.determinant();
    if (det == 0.0 || !leq(1.0 / std::abs(det), C3))
      out.push_back(tag + "|det A|^{-1} exceeds C3");
    if (!leq(part.A.cwiseAbs().maxCoeff(), C3))
      out.push_back(tag + "||A||_inf exceeds C3");
    if (!leq(part.b.cwiseAbs().maxCoeff(), C3))
      out.push_back(tag + "||b||_inf exceeds C3");
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

json pl_to_json(const PiecewiseLinear& f) {
  json nodes = json::array();
  for (double x : f.nodes()) nodes.push_back(x);
  json values = json::array();
  for (const auto& s : f.segments()) values.push_back({s.yl, s.yr});
  return json{{"nodes", nodes}, {"values", values}};
}

PiecewiseLinear pl_from_json(const json& j) {
  std::vector<double> nodes = j.at("nodes").get<std::vector<double>>();
  std::vector<PiecewiseLinear::Segment> segs;
  for (const auto& v : j.at("values"))
    segs.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  return PiecewiseLinear(std::move(nodes), std::move(segs));
}

json matrix_to_json(const Eigen::MatrixXd& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = j.at(0).size();
  Eigen::MatrixXd A(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j.at(i).at(c).get<double>();
  return A;
}

json vector_to_json(const Eigen::VectorXd& b) {
  json out = json::array();
  for (Eigen::Index i = 0; i < b.size(); ++i) out.push_back(b(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd b(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    b(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return b;
}

json wavelet_to_json(const DyadicWavelet& w) {
  json mothers = json::array();
  for (int c = 0; c < w.dim(); ++c) mothers.push_back(pl_to_json(w.mother(c)));
  return json{{"name", w.name()}, {"mothers", mothers}};
}

DyadicWavelet wavelet_from_json(const json& j) {
  std::vector<PiecewiseLinear> mothers;
  for (const auto& m : j.at("mothers")) mothers.push_back(pl_from_json(m));
  // orthonormality was verified when the wavelet was first constructed
  return DyadicWavelet(j.at("name").get<std::string>(), std::move(mothers),
                       /*verify_level=*/-1);
}

json expansion_to_json(const WaveletExpansion& e) {
  json coeffs = json::array();
  for (const auto& [idx, a] : e.coeffs.entries())
    coeffs.push_back({{"k", idx.k}, {"l", idx.l}, {"a", a}});
  return json{{"wavelet", wavelet_to_json(e.wavelet)},
              {"coeffs", coeffs},
              {"p", e.bounds.p},
              {"C1", e.bounds.C1},
              {"C2", e.bounds.C2},
              {"beta", e.bounds.beta}};
}

WaveletExpansion expansion_from_json(const json& j) {
  WaveletExpansion e{wavelet_from_json(j.at("wavelet")), {}, {}};
  for (const auto& c : j.at("coeffs")) {
    WaveletIndex idx{c.at("k").get<std::vector<int>>(),
                     c.at("l").get<std::vector<int>>()};
    e.coeffs.set(idx, c.at("a").get<double>());
  }
  e.bounds = {j.at("p").get<double>(), j.at("C1").get<double>(),
              j.at("C2").get<double>(), j.at("beta").get<double>()};
  return e;
}

}  // namespace

std::string target_to_json(const TargetFunction& f, int indent) {
  json params;
  switch (f.kind()) {
    case TargetKind::Jk: {
      const auto& pc = f.as_jk();
      json jumps = json::array();
      for (const auto& j : pc.jumps)
        jumps.push_back({{"t", j.t}, {"a", j.a}});
      params = {{"k", f.params().k},
                {"C", f.params().C},
                {"a0", pc.a0},
                {"jumps", jumps}};
      break;
    }
    case TargetKind::I0: {
      const auto& p = f.as_i0();
      json atoms = json::array();
      for (const auto& a : p.atoms)
        atoms.push_back({{"c", a.c},
                         {"A", matrix_to_json(a.A)},
                         {"b", vector_to_json(a.b)},
                         {"phi", a.phi_id}});
      json basis = json::array();
      for (const auto& bf : p.basis) {
        json factors = json::array();
        for (const auto& fac : bf.factors) factors.push_back(pl_to_json(fac));
        basis.push_back({{"id", bf.id}, {"factors", factors}});
      }
      params = {{"n_s", f.params().n_s},
                {"C", f.params().C},
                {"atoms", atoms},
                {"basis", basis}};
      break;
    }
    case TargetKind::Jp:
      params = expansion_to_json(f.as_jp());
      break;
    case TargetKind::Kp: {
      const auto& p = f.as_kp();
      json parts = json::array();
      for (const auto& part : p.parts)
        parts.push_back({{"expansion", expansion_to_json(part.expansion)},
                         {"A", matrix_to_json(part.A)},
                         {"b", vector_to_json(part.b)}});
      params = {{"n_s", f.params().n_s},
                {"C3", f.params().C3},
                {"p", f.params().sparsity.p},
                {"C1", f.params().sparsity.C1},
                {"C2", f.params().sparsity.C2},
                {"beta", f.params().sparsity.beta},
                {"parts", parts}};
      break;
    }
    case TargetKind::Custom: {
      const auto& p = f.as_custom();
      params = {{"label", p.label}, {"fn", pl_to_json(p.fn)}};
      break;
    }
  }
  json out{{"kind", to_string(f.kind())},
           {"sup_bound", f.sup_bound()},
           {"params", params}};
  return out.dump(indent);
}

TargetFunction target_from_json(const std::string& text) {
  const json j = json::parse(text);
  const TargetKind kind = target_kind_from_string(j.at("kind"));
  const json& params = j.at("params");
  switch (kind) {
    case TargetKind::Jk: {
      std::vector<PiecewiseConstantFn::Jump> jumps;
      for (const auto& jj : params.at("jumps"))
        jumps.push_back({jj.at("t").get<double>(), jj.at("a").get<double>()});
      return TargetFunction::jk(
          PiecewiseConstantFn::make(params.at("a0").get<double>(),
                                    std::move(jumps)),
          params.at("k").get<int>(), params.at("C").get<double>());
    }
    case TargetKind::I0: {
      std::vector<AffineAtom> atoms;
      for (const auto& a : params.at("atoms")) {
        AffineAtom atom;
        atom.c = a.at("c").get<double>();
        atom.A = matrix_from_json(a.at("A"));
        atom.b = vector_from_json(a.at("b"));
        atom.phi_id = a.at("phi").get<std::string>();
        atoms.push_back(std::move(atom));
      }
      std::vector<BaseFunction> basis;
      for (const auto& bf : params.at("basis")) {
        BaseFunction fn;
        fn.id = bf.at("id").get<std::string>();
        for (const auto& fac : bf.at("factors"))
          fn.factors.push_back(pl_from_json(fac));
        basis.push_back(std::move(fn));
      }
      return TargetFunction::i0(std::move(atoms), std::move(basis),
                                params.at("n_s").get<int>(),
                                params.at("C").get<double>());
    }
    case TargetKind::Jp:
      return TargetFunction::jp(expansion_from_json(params));
    case TargetKind::Kp: {
      std::vector<KpPart> parts;
      for (const auto& part : params.at("parts"))
        parts.push_back({expansion_from_json(part.at("expansion")),
                         matrix_from_json(part.at("A")),
                         vector_from_json(part.at("b"))});
      SparsityBounds bounds{
          params.at("p").get<double>(), params.at("C1").get<double>(),
          params.at("C2").get<double>(), params.at("beta").get<double>()};
      return TargetFunction::kp(std::move(parts), params.at("n_s").get<int>(),
                                params.at("C3").get<double>(), bounds);
    }
    case TargetKind::Custom:
      return TargetFunction::custom(pl_from_json(params.at("fn")),
                                    params.at("label").get<std::string>());
  }
  throw std::logic_error("unreachable");
}

}  // namespace minimax
