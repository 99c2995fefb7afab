#include "minimax/relu_net.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace minimax {

using nlohmann::json;

ReluNetwork::ReluNetwork(std::vector<Eigen::MatrixXd> weights,
                         std::vector<Eigen::VectorXd> biases, NetworkArch arch)
    : weights_(std::move(weights)), biases_(std::move(biases)), arch_(arch) {
  if (weights_.size() != static_cast<std::size_t>(arch_.L) + 1)
    throw std::invalid_argument("ReluNetwork: need L+1 weight matrices");
  if (biases_.size() != static_cast<std::size_t>(arch_.L))
    throw std::invalid_argument("ReluNetwork: need L bias vectors");
  input_dim_ = static_cast<int>(weights_.front().cols());
  const int D = arch_.D;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const auto rows = weights_[i].rows();
    const auto cols = weights_[i].cols();
    const bool last = (i + 1 == weights_.size());
    const Eigen::Index want_rows = last ? 1 : D;
    const Eigen::Index want_cols = (i == 0) ? input_dim_ : D;
    if (rows != want_rows || cols != want_cols)
      throw std::invalid_argument("ReluNetwork: weight shape mismatch");
  }
  for (const auto& v : biases_)
    if (v.size() != D)
      throw std::invalid_argument("ReluNetwork: bias shape mismatch");
}

ReluNetwork ReluNetwork::zero(int input_dim, NetworkArch arch) {
  std::vector<Eigen::MatrixXd> ws;
  std::vector<Eigen::VectorXd> vs;
  ws.push_back(Eigen::MatrixXd::Zero(arch.D, input_dim));
  for (int i = 1; i < arch.L; ++i)
    ws.push_back(Eigen::MatrixXd::Zero(arch.D, arch.D));
  ws.push_back(Eigen::MatrixXd::Zero(1, arch.D));
  for (int i = 0; i < arch.L; ++i)
    vs.push_back(Eigen::VectorXd::Zero(arch.D));
  return ReluNetwork(std::move(ws), std::move(vs), arch);
}

double ReluNetwork::forward_unclipped(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_)
    throw std::invalid_argument("forward: dimension mismatch");
  Eigen::VectorXd h(input_dim_);
  for (int i = 0; i < input_dim_; ++i) h(i) = x[static_cast<std::size_t>(i)];
  for (int layer = 0; layer < arch_.L; ++layer) {
    h = (weights_[static_cast<std::size_t>(layer)] * h -
         biases_[static_cast<std::size_t>(layer)])
            .cwiseMax(0.0);
  }
  return (weights_.back() * h)(0);
}

double ReluNetwork::forward(std::span<const double> x) const {
  const double y = forward_unclipped(x);
  if (arch_.F) {
    const double F = *arch_.F;
    return std::copysign(std::min(std::abs(y), F), y);
  }
  return y;
}

long ReluNetwork::nonzero_count() const {
  long count = 0;
  for (const auto& W : weights_)
    count += (W.array() != 0.0).count();
  for (const auto& v : biases_)
    count += (v.array() != 0.0).count();
  return count;
}

PiecewiseLinear ReluNetwork::piecewise_1d() const {
  if (input_dim_ != 1)
    throw std::logic_error("piecewise_1d: network input must be 1-d");
  const PiecewiseLinear x({0.0, 1.0}, {{0.0, 1.0}});  // identity on [0, 1]
  std::vector<PiecewiseLinear> h;
  h.push_back(x);
  for (int layer = 0; layer < arch_.L; ++layer) {
    const auto& W = weights_[static_cast<std::size_t>(layer)];
    const auto& v = biases_[static_cast<std::size_t>(layer)];
    std::vector<PiecewiseLinear> next;
    next.reserve(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      std::vector<double> coefs;
      for (Eigen::Index c = 0; c < W.cols(); ++c) coefs.push_back(W(r, c));
      PiecewiseLinear z = PiecewiseLinear::combine(h, coefs)
                              .plus(PiecewiseLinear::constant(-v(r)));
      next.push_back(z.relu());
    }
    h = std::move(next);
  }
  std::vector<double> coefs;
  for (Eigen::Index c = 0; c < weights_.back().cols(); ++c)
    coefs.push_back(weights_.back()(0, c));
  PiecewiseLinear out = PiecewiseLinear::combine(h, coefs);
  if (arch_.F) out = out.clipped(*arch_.F);
  return out;
}

ArchReport validate_arch(const ReluNetwork& net) {
  ArchReport rep;
  const auto& a = net.arch();
  auto fail = [&](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };
  if (a.L < 1) fail("L must be >= 1");
  if (a.S < 1) fail("S must be >= 1");
  if (!(a.B >= 1.0)) fail("B must be >= 1");
  if (a.D < net.input_dim()) fail("D must be >= input dimension");
  for (std::size_t i = 0; i < net.weights().size(); ++i) {
    const double mag = net.weights()[i].cwiseAbs().maxCoeff();
    if (mag > a.B)
      fail("weight magnitude " + std::to_string(mag) + " in W" +
           std::to_string(i + 1) + " exceeds B");
  }
  for (std::size_t i = 0; i < net.biases().size(); ++i) {
    if (net.biases()[i].size() == 0) continue;
    const double mag = net.biases()[i].cwiseAbs().maxCoeff();
    if (mag > a.B)
      fail("bias magnitude " + std::to_string(mag) + " in v" +
           std::to_string(i + 1) + " exceeds B");
  }
  const long nnz = net.nonzero_count();
  if (nnz > a.S)
    fail("nonzero count " + std::to_string(nnz) + " exceeds S = " +
         std::to_string(a.S));
  return rep;
}

double covering_entropy_bound(const NetworkArch& arch, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("covering_entropy_bound: delta outside (0,1)");
  return 2.0 * static_cast<double>(arch.S) * (arch.L + 1) *
         std::log(arch.B * (arch.L + 1) * (arch.D + 1) / delta);
}

double shared_entropy_bound(const NetworkArch& arch, int N, int d,
                            double delta) {
  if (arch.L < 2)
    throw std::invalid_argument("shared_entropy_bound: requires L >= 2");
  if (N < 1) throw std::invalid_argument("shared_entropy_bound: N must be >= 1");
  if (d < 1) throw std::invalid_argument("shared_entropy_bound: d must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("shared_entropy_bound: delta outside (0,1)");
  const double head = static_cast<double>(N) * (d + 1.0) * (d + 1.0) +
                      2.0 * static_cast<double>(arch.S) * (arch.L + 1);
  return head * (arch.L + 3) *
         std::log(N * arch.B * (arch.L + 1) * (arch.D + 1) / delta);
}

ReluNetwork build_jump_approx(double jump, double height, double w) {
  if (!(jump > 0.0 && jump < 1.0))
    throw std::invalid_argument("build_jump_approx: jump outside (0, 1)");
  if (!(w > 0.0 && w < std::min(jump, 1.0 - jump)))
    throw std::invalid_argument(
        "build_jump_approx: need 0 < w < min(jump, 1 - jump)");
  const double slope = height / w;
  NetworkArch arch{1, 6, 2, std::max(1.0, std::abs(slope)), std::nullopt};
  Eigen::MatrixXd W1(2, 1), W2(1, 2);
  W1 << 1.0, 1.0;
  W2 << slope, -slope;
  Eigen::VectorXd v1(2);
  v1 << jump - w, jump;
  ReluNetwork net({W1, W2}, {v1}, arch);
  net.output_sign = height >= 0.0 ? 1 : -1;
  net.vanishes_on_nonpositive = true;  // zero on (-inf, jump - w], jump-w > 0
  return net;
}

double jump_ramp_l2_error(double height, double w) {
  return std::abs(height) * std::sqrt(w / 3.0);
}

ReluNetwork build_haar_atom(int k, int l, double delta) {
  if (k < 0 || l < 0 || (static_cast<long>(l) >= (1L << k)))
    throw std::invalid_argument("build_haar_atom: invalid dyadic index");
  const double cell = std::ldexp(1.0, -k);
  const double s = l * cell, e = (l + 1) * cell, m = s + 0.5 * cell;
  const double amp = std::sqrt(std::ldexp(1.0, k));
  delta = std::min(delta, cell / 8.0);
  if (!(delta > 0.0)) throw std::invalid_argument("build_haar_atom: delta <= 0");
  const double g = amp / delta;
  // slope changes of the ramped wavelet at its six transition knots
  const double knots[6] = {s, s + delta, m - delta, m + delta, e - delta, e};
  const double gains[6] = {g, -g, -g, g, g, -g};
  Eigen::MatrixXd W1(6, 1), W2(1, 6);
  Eigen::VectorXd v1(6);
  for (int i = 0; i < 6; ++i) {
    W1(i, 0) = 1.0;
    v1(i) = knots[i];
    W2(0, i) = gains[i];
  }
  NetworkArch arch{1, 18, 6, std::max(1.0, g), std::nullopt};
  ReluNetwork net({W1, W2}, {v1}, arch);
  net.vanishes_on_nonpositive = true;
  return net;
}

NetworkArch compose_arch(const NetworkArch& sub, int n_s, int d, double C) {
  NetworkArch out;
  out.L = sub.L + 2;
  out.S = static_cast<long>(n_s) *
          (sub.S + 2L * sub.D * d + static_cast<long>(d) * d + d + 1);
  out.D = n_s * sub.D;
  out.B = std::max(sub.B, C);
  return out;
}

ReluNetwork compose_atoms(const ReluNetwork& sub,
                          const std::vector<AffineAtom>& atoms, double C) {
  if (atoms.empty()) throw std::invalid_argument("compose_atoms: no atoms");
  const int d = sub.input_dim();
  if (sub.arch().D < d)
    throw std::invalid_argument(
        "compose_atoms: sub width must be at least the input dimension");
  if (sub.output_sign == 0 || !sub.vanishes_on_nonpositive)
    throw std::invalid_argument(
        "compose_atoms: sub must certify a definite output sign and "
        "vanish on nonpositive inputs (library ramp builders do)");
  for (const auto& atom : atoms) {
    if (atom.A.rows() != d || atom.A.cols() != d || atom.b.size() != d)
      throw std::invalid_argument("compose_atoms: atom shape mismatch");
    const double det = atom.A.determinant();
    if (det == 0.0 || 1.0 / std::abs(det) > C * (1 + 1e-12) ||
        atom.A.cwiseAbs().maxCoeff() > C * (1 + 1e-12) ||
        atom.b.cwiseAbs().maxCoeff() > C * (1 + 1e-12) ||
        std::abs(atom.c) > C * (1 + 1e-12))
      throw std::invalid_argument(
          "compose_atoms: atom violates the affine-class bounds");
  }
  const int n_s = static_cast<int>(atoms.size());
  const int Dsub = sub.arch().D;
  const int Lsub = sub.arch().L;
  const NetworkArch arch = compose_arch(sub.arch(), n_s, d, C);
  const int Dout = arch.D;

  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> v;
  // layer 1: per-atom affine maps y_i = rho(A_i x - b_i); the input-side
  // clip is harmless because sub vanishes on nonpositive coordinates
  {
    Eigen::MatrixXd W1 = Eigen::MatrixXd::Zero(Dout, d);
    Eigen::VectorXd v1 = Eigen::VectorXd::Zero(Dout);
    for (int i = 0; i < n_s; ++i) {
      W1.block(i * Dsub, 0, d, d) = atoms[static_cast<std::size_t>(i)].A;
      v1.segment(i * Dsub, d) = atoms[static_cast<std::size_t>(i)].b;
    }
    W.push_back(W1);
    v.push_back(v1);
  }
  // layers 2 .. L+1: block-diagonal copies of the sub network
  for (int layer = 0; layer < Lsub; ++layer) {
    Eigen::MatrixXd Wk = Eigen::MatrixXd::Zero(Dout, Dout);
    Eigen::VectorXd vk = Eigen::VectorXd::Zero(Dout);
    const auto& Wsub = sub.weights()[static_cast<std::size_t>(layer)];
    const auto& vsub = sub.biases()[static_cast<std::size_t>(layer)];
    for (int i = 0; i < n_s; ++i) {
      Wk.block(i * Dsub, i * Dsub, Wsub.rows(), Wsub.cols()) = Wsub;
      vk.segment(i * Dsub, Dsub) = vsub;
    }
    W.push_back(Wk);
    v.push_back(vk);
  }
  // layer L+2: one sign-straightened channel per atom,
  // r_i = rho(sign * W_{L+1} h_i) = |sub output|
  const double sign = static_cast<double>(sub.output_sign);
  {
    Eigen::MatrixXd Wk = Eigen::MatrixXd::Zero(Dout, Dout);
    Eigen::VectorXd vk = Eigen::VectorXd::Zero(Dout);
    const auto& Wlast = sub.weights().back();
    for (int i = 0; i < n_s; ++i)
      Wk.block(i * Dsub, i * Dsub, 1, Dsub) = sign * Wlast;
    W.push_back(Wk);
    v.push_back(vk);
  }
  // output: sum_i (c_i sign) r_i
  {
    Eigen::MatrixXd Wout = Eigen::MatrixXd::Zero(1, Dout);
    for (int i = 0; i < n_s; ++i)
      Wout(0, i * Dsub) = atoms[static_cast<std::size_t>(i)].c * sign;
    W.push_back(Wout);
  }
  return ReluNetwork(std::move(W), std::move(v), arch);
}

double eval_shared(const SharedFamily& fam, std::span<const double> x) {
  const double B = fam.base.arch().B;
  const int d = fam.base.input_dim();
  if (fam.atoms.empty())
    throw std::invalid_argument("eval_shared: empty family");
  double acc = 0.0;
  for (const auto& atom : fam.atoms) {
    if (std::abs(atom.c) > B || atom.A.cwiseAbs().maxCoeff() > B ||
        atom.b.cwiseAbs().maxCoeff() > B)
      throw std::invalid_argument("eval_shared: atom bound violation");
    if (atom.A.rows() != d || atom.A.cols() != d || atom.b.size() != d)
      throw std::invalid_argument("eval_shared: atom shape mismatch");
    Eigen::VectorXd xv(d);
    for (int i = 0; i < d; ++i) xv(i) = x[static_cast<std::size_t>(i)];
    Eigen::VectorXd t = atom.A * xv - atom.b;
    acc += atom.c * fam.base.forward(std::span<const double>(t.data(),
                                                             t.size()));
  }
  return acc;
}

std::string network_to_json(const ReluNetwork& net, int indent) {
  json weights = json::array();
  json mask = json::array();
  for (const auto& Wm : net.weights()) {
    json rows = json::array(), mrows = json::array();
    for (Eigen::Index r = 0; r < Wm.rows(); ++r) {
      json row = json::array(), mrow = json::array();
      for (Eigen::Index c = 0; c < Wm.cols(); ++c) {
        row.push_back(Wm(r, c));
        mrow.push_back(Wm(r, c) != 0.0 ? 1 : 0);
      }
      rows.push_back(row);
      mrows.push_back(mrow);
    }
    weights.push_back(rows);
    mask.push_back(mrows);
  }
  json biases = json::array();
  for (const auto& vv : net.biases()) {
    json row = json::array();
    for (Eigen::Index i = 0; i < vv.size(); ++i) row.push_back(vv(i));
    biases.push_back(row);
  }
  json arch{{"L", net.arch().L},
            {"S", net.arch().S},
            {"D", net.arch().D},
            {"B", net.arch().B}};
  if (net.arch().F) arch["F"] = *net.arch().F;
  return json{{"version", 1},
              {"arch", arch},
              {"input_dim", net.input_dim()},
              {"weights", weights},
              {"sparsity_mask", mask},
              {"biases", biases},
              {"output_sign", net.output_sign},
              {"vanishes_on_nonpositive", net.vanishes_on_nonpositive}}
      .dump(indent);
}

ReluNetwork network_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::invalid_argument("network_from_json: unsupported version");
  NetworkArch arch;
  arch.L = j.at("arch").at("L").get<int>();
  arch.S = j.at("arch").at("S").get<long>();
  arch.D = j.at("arch").at("D").get<int>();
  arch.B = j.at("arch").at("B").get<double>();
  if (j.at("arch").contains("F")) arch.F = j.at("arch").at("F").get<double>();
  std::vector<Eigen::MatrixXd> weights;
  const auto& jw = j.at("weights");
  const auto& jm = j.at("sparsity_mask");
  for (std::size_t i = 0; i < jw.size(); ++i) {
    const auto& rows = jw.at(i);
    Eigen::MatrixXd Wm(rows.size(), rows.at(0).size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows.at(r).size(); ++c) {
        Wm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rows.at(r).at(c).get<double>();
        const bool masked = jm.at(i).at(r).at(c).get<int>() == 0;
        if (masked && Wm(static_cast<Eigen::Index>(r),
                         static_cast<Eigen::Index>(c)) != 0.0)
          throw std::invalid_argument(
              "network_from_json: sparsity mask contradicts weights");
      }
    weights.push_back(std::move(Wm));
  }
  std::vector<Eigen::VectorXd> biases;
  for (const auto& row : j.at("biases")) {
    Eigen::VectorXd vv(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
      vv(static_cast<Eigen::Index>(i)) = row.at(i).get<double>();
    biases.push_back(std::move(vv));
  }
  ReluNetwork net(std::move(weights), std::move(biases), arch);
  net.output_sign = j.value("output_sign", 0);
  net.vanishes_on_nonpositive = j.value("vanishes_on_nonpositive", false);
  return net;
}

}  // namespace minimax
