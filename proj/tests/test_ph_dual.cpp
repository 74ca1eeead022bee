#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "gasmor/steady.hpp"
#include "oracles.hpp"

using namespace gasmor;

namespace {

struct Built {
  RefinementResult ref;
  TopologyMatrices topo;
  DiscreteModel model;
};

Built build(const std::string& net_text, double dx, ModelConfig mc = {}) {
  Built b;
  auto net = parse_net(net_text);
  b.ref = refine(net, dx);
  b.topo = incidence(b.ref.refined);
  b.model = assemble(b.topo, b.ref, mc);
  return b;
}

Params kTheta{283.15, 530.0};

GasState ideal_gas() {
  GasState g;
  g.z0 = 1.0;
  g.d0 = 1.0 / (kTheta.T0 * kTheta.RS);
  return g;
}

// desk-scale level pipeline (compressor-free)
Built pipe_instance() { return build("pipe,a,b,24000,1.422,0,1e-5", 800); }

/// Dense frozen-dissipation system matrix (J - R(xbar)) and ports.
struct FrozenParts {
  Mat e, a, b, c;
  int n;
};

FrozenParts frozen(const Built& bl, const SteadyState& st) {
  PortHamiltonianParts ph = ph_parts(bl.model, kTheta, ideal_gas());
  const int n = bl.model.state_dim();
  Vec rdiag = ph.R_qdiag(st.pbar, st.qbar, kTheta, ideal_gas());
  Mat r = Mat::Zero(n, n);
  r.bottomRightCorner(bl.model.nq, bl.model.nq) = Mat(rdiag.asDiagonal());
  FrozenParts f;
  f.e = Mat(ph.E);
  f.a = Mat(ph.J) - r;
  f.b = Mat(ph.G) - Mat(ph.P);
  f.c = (Mat(ph.G) + Mat(ph.P)).transpose();
  f.n = n;
  return f;
}

}  // namespace

TEST_CASE("ph_parts: structural members") {
  auto bl = pipe_instance();
  PortHamiltonianParts ph = ph_parts(bl.model, kTheta, ideal_gas());
  const int n = bl.model.state_dim();

  // J is exactly skew-symmetric
  Mat j = Mat(ph.J);
  CHECK((j + j.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // E is SPD
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(ph.E));
  CHECK(es.eigenvalues().minCoeff() > 0);

  // Q is the scale homogenization weight
  CHECK(ph.Qdiag.size() == n);
  CHECK(ph.Qdiag.head(bl.model.np).minCoeff() == 1e5);
  CHECK(ph.Qdiag.head(bl.model.np).maxCoeff() == 1e5);
  CHECK(ph.Qdiag.tail(bl.model.nq).minCoeff() == 1e-5);
  CHECK(ph.Qdiag.tail(bl.model.nq).maxCoeff() == 1e-5);

  // port split: G - P = B and (G + P)^T = C of the assembled model
  LumpedSystem sys = lumped(bl.model, kTheta, ideal_gas());
  CHECK((Mat(ph.G) - Mat(ph.P) - Mat(sys.B)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(((Mat(ph.G) + Mat(ph.P)).transpose() - Mat(sys.C)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ph_parts: dissipation is PSD on admissible states") {
  auto bl = pipe_instance();
  PortHamiltonianParts ph = ph_parts(bl.model, kTheta, ideal_gas());
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p(bl.model.np), q(bl.model.nq), xs(bl.model.nq);
    for (int i = 0; i < bl.model.np; ++i) p(i) = rng.uniform(20.0, 90.0);
    for (int i = 0; i < bl.model.nq; ++i) q(i) = rng.uniform(-80.0, 80.0);
    for (int i = 0; i < bl.model.nq; ++i) xs(i) = rng.uniform(-1.0, 1.0);
    Vec r = ph.R_qdiag(p, q, kTheta, ideal_gas());
    CHECK(r.minCoeff() >= 0.0);
    double quad = (r.array() * xs.array() * xs.array()).sum();
    CHECK(quad >= -1e-12);
  }
}

TEST_CASE("ph_parts: reconstruction equals eval_rhs") {
  auto bl = pipe_instance();
  PortHamiltonianParts ph = ph_parts(bl.model, kTheta, ideal_gas());
  Mat j = Mat(ph.J), g = Mat(ph.G), pp = Mat(ph.P);
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p(bl.model.np), q(bl.model.nq), u(2);
    for (int i = 0; i < bl.model.np; ++i) p(i) = rng.uniform(30.0, 90.0);
    for (int i = 0; i < bl.model.nq; ++i) q(i) = rng.uniform(0.5, 60.0);
    u << rng.uniform(30.0, 90.0), rng.uniform(-40.0, 40.0);

    Vec x(bl.model.state_dim());
    x << p, q;
    Vec rdiag = ph.R_qdiag(p, q, kTheta, ideal_gas());
    Vec rx = Vec::Zero(x.size());
    rx.tail(bl.model.nq) = rdiag.asDiagonal() * q;
    Vec lhs = j * x - rx + (g - pp) * u;

    auto [rp, rq] = eval_rhs(bl.model, p, q, u.head(1), u.tail(1), kTheta, ideal_gas());
    Vec rhs(x.size());
    rhs << rp, rq;
    CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("ph_parts: rejected for the midpoint discretization") {
  ModelConfig mc;
  mc.disc = Discretization::OdeMid;
  auto bl = build("pipe,a,b,24000,1.422,0,1e-5", 800, mc);
  CHECK_THROWS_AS(ph_parts(bl.model, kTheta, ideal_gas()), Error);
  CHECK_THROWS_AS(dual_model(bl.model, Vec::Ones(bl.model.np), Vec::Ones(bl.model.nq), kTheta,
                             ideal_gas()),
                  Error);
}

TEST_CASE("dual: port dimensions and involution guard") {
  auto bl = build("pipe,a,b,4000,0.5,0,1e-5", 800);
  SteadyState st = steady_state(bl.model, Vec::Constant(1, 60.0), Vec::Constant(1, 20.0), kTheta,
                                ideal_gas());
  DiscreteModel d = dual_model(bl.model, st.pbar, st.qbar, kTheta, ideal_gas());
  CHECK(d.ns == bl.model.ns);
  CHECK(d.nd == bl.model.nd);
  CHECK(d.port_dim() == bl.model.port_dim());
  CHECK(d.dual);
  CHECK_THROWS_AS(dual_model(d, st.pbar, st.qbar, kTheta, ideal_gas()), Error);

  // the primal steady state is stationary for the dual under ybar
  LumpedSystem ds = lumped(d, kTheta, ideal_gas());
  Vec x(bl.model.state_dim());
  x << st.pbar, st.qbar;
  LumpedSystem ps = lumped(bl.model, kTheta, ideal_gas());
  Vec ybar = ps.C * x;
  Vec r = ds.A * x + ds.B * ybar + ds.F + ds.f(x, ybar);
  CHECK(r.norm() <= 1e-10 * (1.0 + x.norm()));
}

TEST_CASE("dual: frozen transfer function is the transpose of the primal") {
  auto bl = build("pipe,a,b,4000,0.5,0,1e-5", 800);  // N = 10
  REQUIRE(bl.model.state_dim() <= 10);
  SteadyState st = steady_state(bl.model, Vec::Constant(1, 60.0), Vec::Constant(1, 20.0), kTheta,
                                ideal_gas());
  FrozenParts f = frozen(bl, st);

  Mat h = oracles::transfer_at(1.0, f.e, f.a, f.b, f.c);
  Mat hd = oracles::transfer_at(1.0, f.e, f.a.transpose(), f.c.transpose(), f.b.transpose());
  CHECK((hd - h.transpose()).norm() <= 1e-12 * h.norm());
}

TEST_CASE("dual: reachability Gramian reproduces primal observability (N <= 20)") {
  auto bl = build("pipe,a,b,8000,0.5,0,1e-5", 800);  // np = nq = 10, N = 20
  REQUIRE(bl.model.state_dim() <= 20);
  SteadyState st = steady_state(bl.model, Vec::Constant(1, 60.0), Vec::Constant(1, 20.0), kTheta,
                                ideal_gas());
  FrozenParts f = frozen(bl, st);
  Mat einv = f.e.inverse();

  // primal observability of (E^-1 A, C)
  Mat wo = oracles::obs_gramian(einv * f.a, f.c);

  // dual reachability of (E^-1 A^T, E^-1 C^T), recorded as E * z
  Mat wr_dual = oracles::reach_gramian(einv * f.a.transpose(), einv * f.c.transpose());
  Mat wr_weighted = f.e * wr_dual * f.e;

  CHECK((wr_weighted - wo).norm() <= 0.05 * wo.norm());
}
