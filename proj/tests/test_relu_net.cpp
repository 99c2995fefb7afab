#include <cmath>
#include <vector>

#include "doctest.h"
#include "minimax/relu_net.hpp"
#include "minimax/rng.hpp"

using namespace minimax;

TEST_SUITE_BEGIN("relu_net");

namespace {

// independent layer-by-layer interpreter using plain vectors
double naive_forward(const ReluNetwork& net, const std::vector<double>& x) {
  std::vector<double> h = x;
  for (int layer = 0; layer < net.arch().L; ++layer) {
    const auto& W = net.weights()[static_cast<std::size_t>(layer)];
    const auto& v = net.biases()[static_cast<std::size_t>(layer)];
    std::vector<double> next(static_cast<std::size_t>(W.rows()), 0.0);
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      double z = -v(r);
      for (Eigen::Index c = 0; c < W.cols(); ++c)
        z += W(r, c) * h[static_cast<std::size_t>(c)];
      next[static_cast<std::size_t>(r)] = z > 0.0 ? z : 0.0;
    }
    h = std::move(next);
  }
  const auto& Wl = net.weights().back();
  double out = 0.0;
  for (Eigen::Index c = 0; c < Wl.cols(); ++c)
    out += Wl(0, c) * h[static_cast<std::size_t>(c)];
  if (net.arch().F) {
    const double F = *net.arch().F;
    out = out >= 0.0 ? std::min(out, F) : std::max(out, -F);
  }
  return out;
}

ReluNetwork random_net(Rng& rng, int d, int L, int D, double B,
                       std::optional<double> F = std::nullopt) {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> v;
  long nnz = 0;
  auto fill = [&](Eigen::MatrixXd& M) {
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      for (Eigen::Index c = 0; c < M.cols(); ++c)
        if (rng.uniform() < 0.7) {
          M(r, c) = rng.uniform(-B, B);
          if (M(r, c) != 0.0) ++nnz;
        }
  };
  Eigen::MatrixXd W1 = Eigen::MatrixXd::Zero(D, d);
  fill(W1);
  W.push_back(W1);
  for (int i = 1; i < L; ++i) {
    Eigen::MatrixXd Wi = Eigen::MatrixXd::Zero(D, D);
    fill(Wi);
    W.push_back(Wi);
  }
  Eigen::MatrixXd Wl = Eigen::MatrixXd::Zero(1, D);
  fill(Wl);
  W.push_back(Wl);
  for (int i = 0; i < L; ++i) {
    Eigen::VectorXd vi = Eigen::VectorXd::Zero(D);
    for (int r = 0; r < D; ++r)
      if (rng.uniform() < 0.6) {
        vi(r) = rng.uniform(-B, B);
        if (vi(r) != 0.0) ++nnz;
      }
    v.push_back(vi);
  }
  NetworkArch arch{L, std::max(1L, nnz), D, B, F};
  return ReluNetwork(std::move(W), std::move(v), arch);
}

}  // namespace

TEST_CASE("forward on hand cases") {
  auto zero = ReluNetwork::zero(1, {2, 10, 3, 1.0, std::nullopt});
  CHECK(zero.forward1(0.3) == 0.0);
  CHECK(zero.forward1(0.9) == 0.0);

  // single neuron rho(x - 0.5)
  Eigen::MatrixXd W1(1, 1), W2(1, 1);
  W1 << 1.0;
  W2 << 1.0;
  Eigen::VectorXd v1(1);
  v1 << 0.5;
  ReluNetwork net({W1, W2}, {v1}, {1, 3, 1, 1.0, std::nullopt});
  CHECK(net.forward1(0.25) == 0.0);
  CHECK(net.forward1(0.75) == doctest::Approx(0.25));
}

TEST_CASE("forward matches a naive interpreter on random networks") {
  Rng rng(9001);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = static_cast<int>(rng.uniform_int(1, 3));
    const int L = static_cast<int>(rng.uniform_int(1, 3));
    const int D = static_cast<int>(rng.uniform_int(d, 6));
    auto net = random_net(rng, d, L, D, 2.0,
                          trial % 3 == 0 ? std::optional<double>(0.8)
                                         : std::nullopt);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> x;
      for (int c = 0; c < d; ++c) x.push_back(rng.uniform());
      CHECK(net.forward(x) ==
            doctest::Approx(naive_forward(net, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("piecewise view agrees with forward everywhere (d = 1)") {
  Rng rng(9002);
  for (int trial = 0; trial < 30; ++trial) {
    const int L = static_cast<int>(rng.uniform_int(1, 3));
    const int D = static_cast<int>(rng.uniform_int(1, 5));
    auto net = random_net(rng, 1, L, D, 1.5,
                          trial % 4 == 0 ? std::optional<double>(0.5)
                                         : std::nullopt);
    auto pl = net.piecewise_1d();
    for (int i = 0; i < 50; ++i) {
      const double x = rng.uniform();
      CHECK(pl.eval(x) == doctest::Approx(net.forward1(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("clipped evaluation never exceeds F") {
  Rng rng(9003);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = random_net(rng, 1, 2, 4, 3.0, 0.7);
    for (int i = 0; i < 50; ++i)
      CHECK(std::abs(net.forward1(rng.uniform())) <= 0.7 + 1e-15);
  }
}

TEST_CASE("last layer is positively homogeneous") {
  Rng rng(9004);
  auto net = random_net(rng, 1, 2, 4, 2.0);
  const double lambda = 3.7;
  auto W = net.weights();
  W.back() *= lambda;
  ReluNetwork scaled(W, net.biases(),
                     {net.arch().L, net.arch().S, net.arch().D,
                      net.arch().B * lambda, std::nullopt});
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform();
    CHECK(scaled.forward1(x) ==
          doctest::Approx(lambda * net.forward1(x)).epsilon(1e-12));
  }
}

TEST_CASE("validate_arch reports violations") {
  auto zero = ReluNetwork::zero(1, {1, 1, 2, 1.0, std::nullopt});
  CHECK(validate_arch(zero).ok);

  // magnitude violation: weight set to B + 1
  Eigen::MatrixXd W1(2, 1), W2(1, 2);
  W1 << 2.0, 0.0;  // B = 1, so 2 violates
  W2 << 1.0, 0.0;
  Eigen::VectorXd v1 = Eigen::VectorXd::Zero(2);
  ReluNetwork bad({W1, W2}, {v1}, {1, 10, 2, 1.0, std::nullopt});
  auto rep = validate_arch(bad);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].find("exceeds B") != std::string::npos);
}

TEST_CASE("nonzero count equals a dense-scan oracle on random nets") {
  Rng rng(9005);
  for (int trial = 0; trial < 100; ++trial) {
    auto net = random_net(rng, 1, 2, 5, 1.0);
    long oracle = 0;
    for (const auto& W : net.weights())
      for (Eigen::Index r = 0; r < W.rows(); ++r)
        for (Eigen::Index c = 0; c < W.cols(); ++c)
          if (W(r, c) != 0.0) ++oracle;
    for (const auto& v : net.biases())
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v(i) != 0.0) ++oracle;
    CHECK(net.nonzero_count() == oracle);
    CHECK(validate_arch(net).ok);  // S was set to the true count
  }
}

TEST_CASE("covering entropy bound: value, linearity in S, delta path") {
  NetworkArch arch{2, 10, 4, 1.0, std::nullopt};
  CHECK(covering_entropy_bound(arch, 0.1) ==
        doctest::Approx(60.0 * std::log(150.0)).epsilon(1e-12));
  NetworkArch arch2 = arch;
  arch2.S = 20;
  CHECK(covering_entropy_bound(arch2, 0.1) ==
        doctest::Approx(2.0 * covering_entropy_bound(arch, 0.1)));
  // with B (L+1)(D+1) = 15 fixed, delta -> 1 leaves ln(15/delta) -> ln 15
  NetworkArch arch3{2, 10, 4, 1.0, std::nullopt};
  CHECK(covering_entropy_bound(arch3, 0.999999) ==
        doctest::Approx(60.0 * std::log(15.0 / 0.999999)).epsilon(1e-9));
  CHECK_THROWS(covering_entropy_bound(arch, 0.0));
  CHECK_THROWS(covering_entropy_bound(arch, 1.0));
}

TEST_CASE("shared entropy bound: value, guards, monotone sweep") {
  NetworkArch arch{2, 10, 4, 1.0, std::nullopt};
  CHECK(shared_entropy_bound(arch, 2, 1, 0.1) ==
        doctest::Approx(340.0 * std::log(300.0)).epsilon(1e-12));
  CHECK_THROWS(shared_entropy_bound(arch, 0, 1, 0.1));  // empty family
  NetworkArch shallow{1, 10, 4, 1.0, std::nullopt};
  CHECK_THROWS(shared_entropy_bound(shallow, 2, 1, 0.1));  // L >= 2 required

  // strictly increasing in N, S, L, D, B and in 1/delta
  const double base = shared_entropy_bound(arch, 2, 1, 0.1);
  {
    NetworkArch a = arch;
    a.S = 11;
    CHECK(shared_entropy_bound(a, 2, 1, 0.1) > base);
    a = arch;
    a.L = 3;
    CHECK(shared_entropy_bound(a, 2, 1, 0.1) > base);
    a = arch;
    a.D = 5;
    CHECK(shared_entropy_bound(a, 2, 1, 0.1) > base);
    a = arch;
    a.B = 1.5;
    CHECK(shared_entropy_bound(a, 2, 1, 0.1) > base);
    CHECK(shared_entropy_bound(arch, 3, 1, 0.1) > base);
    CHECK(shared_entropy_bound(arch, 2, 1, 0.05) > base);
  }
  // covering bound is monotone too
  {
    const double cb = covering_entropy_bound(arch, 0.1);
    NetworkArch a = arch;
    a.S = 11;
    CHECK(covering_entropy_bound(a, 0.1) > cb);
    a = arch;
    a.L = 3;
    CHECK(covering_entropy_bound(a, 0.1) > cb);
    a = arch;
    a.D = 5;
    CHECK(covering_entropy_bound(a, 0.1) > cb);
    a = arch;
    a.B = 2.0;
    CHECK(covering_entropy_bound(a, 0.1) > cb);
    CHECK(covering_entropy_bound(arch, 0.05) > cb);
  }
}

TEST_CASE("jump approximator: plateau, zero region, exact error certificate") {
  const double height = std::sqrt(2.0);
  for (double w : {1e-1, 1e-2, 1e-3}) {
    const double jump = 0.5;
    auto net = build_jump_approx(jump, height, w);
    CHECK(net.forward1(jump + w) == doctest::Approx(height).epsilon(1e-12));
    CHECK(net.forward1(std::max(0.0, jump - 2 * w)) == 0.0);
    CHECK(net.forward1(1.0) == doctest::Approx(height));
    // measured (exact piecewise quadrature) L2 error vs height 1_{[jump, 1]}
    auto target = PiecewiseLinear::step(jump, height);
    const double measured = std::sqrt(net.piecewise_1d().l2_dist_sq(target));
    CHECK(std::abs(measured - jump_ramp_l2_error(height, w)) <= 1e-8);
  }
  // the spec's numeric example: sqrt(2) * sqrt(0.01 / 3) ~= 0.0816
  CHECK(jump_ramp_l2_error(std::sqrt(2.0), 0.01) ==
        doctest::Approx(0.081649658).epsilon(1e-6));
  CHECK_THROWS(build_jump_approx(0.5, 1.0, 0.6));
  CHECK(validate_arch(build_jump_approx(0.3, -1.0, 0.05)).ok);
}

TEST_CASE("haar ramp atom approximates psi_{k,l} with the closed-form error") {
  auto w = DyadicWavelet::haar(1);
  for (int k : {0, 1, 3}) {
    const int l = k == 0 ? 0 : (1 << k) - 1;
    const double delta = std::ldexp(1.0, -k) / 64.0;
    auto atom = build_haar_atom(k, l, delta);
    CHECK(validate_arch(atom).ok);
    const auto truth = w.pl(WaveletIndex::d1(k, l));
    const double err2 = atom.piecewise_1d().l2_dist_sq(truth);
    const double amp2 = std::ldexp(1.0, k);
    CHECK(err2 == doctest::Approx(4.0 / 3.0 * amp2 * delta).epsilon(1e-9));
  }
}

TEST_CASE("compose_arch reproduces the architecture formula") {
  NetworkArch sub{2, 20, 6, 5.0, std::nullopt};
  auto out = compose_arch(sub, 3, 1, 2.0);
  CHECK(out.L == 4);
  CHECK(out.S == 105);  // 3 * (20 + 12 + 1 + 1 + 1)
  CHECK(out.D == 18);
  CHECK(out.B == 5.0);
}

TEST_CASE("compose_atoms: identity atom equals the sub network") {
  auto sub = build_jump_approx(0.5, std::sqrt(2.0), 0.01);
  std::vector<AffineAtom> atoms(1);
  atoms[0].c = 1.0;
  atoms[0].A = Eigen::MatrixXd::Identity(1, 1);
  atoms[0].b = Eigen::VectorXd::Zero(1);
  auto net = compose_atoms(sub, atoms, 2.0);
  CHECK(net.arch().L == 3);
  CHECK(validate_arch(net).ok);
  Rng rng(9006);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform();
    CHECK(std::abs(net.forward1(x) - sub.forward1(x)) <= 1e-10);
  }
}

TEST_CASE("compose_atoms satisfies the composition error bound") {
  // atoms drawn with images inside [0, 1], where the zero-extension of the
  // base function and the ramp plateau agree
  Rng rng(9007);
  const double C = 2.0;
  const double height = std::sqrt(2.0);
  for (double eps : {1e-2, 1e-3}) {
    const double w = 3.0 * eps * eps / (height * height);
    auto sub = build_jump_approx(0.5, height, w);
    for (int n_s = 1; n_s <= 4; ++n_s) {
      std::vector<AffineAtom> atoms;
      std::vector<PiecewiseLinear> truths;
      std::vector<double> coefs;
      for (int i = 0; i < n_s; ++i) {
        AffineAtom atom;
        const double a = rng.uniform(1.0 / C, 1.0);
        const double b = rng.uniform(a - 1.0, 0.0);
        atom.c = rng.uniform(-C, C);
        atom.A = Eigen::MatrixXd::Constant(1, 1, a);
        atom.b = Eigen::VectorXd::Constant(1, b);
        atoms.push_back(atom);
        truths.push_back(
            PiecewiseLinear::step(0.5, height).pullback_affine(a, b));
        coefs.push_back(atom.c);
      }
      auto net = compose_atoms(sub, atoms, C);
      // architecture formula holds and the built network validates
      const auto want = compose_arch(sub.arch(), n_s, 1, C);
      CHECK(net.arch().L == want.L);
      CHECK(net.arch().S == want.S);
      CHECK(net.arch().D == want.D);
      CHECK(net.arch().B == want.B);
      CHECK(validate_arch(net).ok);
      // quadrature error against the true atom sum
      auto truth = PiecewiseLinear::combine(truths, coefs);
      const double err = std::sqrt(net.piecewise_1d().l2_dist_sq(truth));
      CHECK(err <= std::pow(C, 1.5) * n_s * eps);
    }
  }
}

TEST_CASE("compose_atoms rejects unsuitable subs and bad atoms") {
  Rng rng(9008);
  auto generic = random_net(rng, 1, 1, 2, 1.0);  // no sign certificate
  std::vector<AffineAtom> atoms(1);
  atoms[0].c = 1.0;
  atoms[0].A = Eigen::MatrixXd::Identity(1, 1);
  atoms[0].b = Eigen::VectorXd::Zero(1);
  CHECK_THROWS(compose_atoms(generic, atoms, 2.0));

  auto sub = build_jump_approx(0.5, 1.0, 0.01);
  atoms[0].c = 5.0;  // violates |c| <= C = 2
  CHECK_THROWS(compose_atoms(sub, atoms, 2.0));
}

TEST_CASE("eval_shared basics and naive-loop oracle") {
  auto base = build_jump_approx(0.5, 1.0, 0.05);
  SharedFamily fam{base, {}};
  fam.atoms.push_back(
      {1.0, Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)});
  Rng rng(9009);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform();
    CHECK(eval_shared(fam, {&x, 1}) == doctest::Approx(base.forward1(x)));
  }
  // cancellation: c1 = -c2 with identical maps
  fam.atoms.push_back(
      {-1.0, Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)});
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform();
    CHECK(eval_shared(fam, {&x, 1}) == doctest::Approx(0.0));
  }
  // random family vs naive loop
  SharedFamily rnd{base, {}};
  const double B = base.arch().B;
  for (int i = 0; i < 5; ++i) {
    const double bb = std::min(B, 1.0);
    rnd.atoms.push_back({rng.uniform(-bb, bb),
                         Eigen::MatrixXd::Constant(1, 1, rng.uniform(0.2, bb)),
                         Eigen::VectorXd::Constant(1, rng.uniform(-bb, bb))});
  }
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform();
    double oracle = 0.0;
    for (const auto& atom : rnd.atoms) {
      const double t = atom.A(0, 0) * x - atom.b(0);
      oracle += atom.c * base.forward1(t);
    }
    CHECK(std::abs(eval_shared(rnd, {&x, 1}) - oracle) <= 1e-12);
  }
  // bound violation rejected
  SharedFamily bad{base, {}};
  bad.atoms.push_back({B * 2.0, Eigen::MatrixXd::Identity(1, 1),
                       Eigen::VectorXd::Zero(1)});
  const double x = 0.5;
  CHECK_THROWS(eval_shared(bad, {&x, 1}));
}

TEST_CASE("network JSON round trip preserves evaluation and metadata") {
  Rng rng(9010);
  auto net = build_jump_approx(0.4, -1.3, 0.02);
  auto back = network_from_json(network_to_json(net));
  CHECK(back.output_sign == net.output_sign);
  CHECK(back.vanishes_on_nonpositive == net.vanishes_on_nonpositive);
  CHECK(network_to_json(back) == network_to_json(net));
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform();
    CHECK(back.forward1(x) == net.forward1(x));
  }
}

TEST_SUITE_END();
