#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "gasmor/steady.hpp"

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

}  // namespace

TEST_CASE("steady: flux continuity on a path graph") {
  auto b = build("pipe,a,b,3000,0.5,0,1e-5", 400);
  Vec dq = Vec::Constant(1, 46.3);
  Vec q = steady_flux(b.model, dq);
  CHECK(q.size() == b.model.nq);
  for (Eigen::Index j = 0; j < q.size(); ++j) CHECK(q(j) == doctest::Approx(46.3).epsilon(1e-12));
}

TEST_CASE("steady: frictionless level pipe keeps the supply pressure") {
  // shortcuts are frictionless, so the pressure is flat at sbar
  auto b = build("shortcut,a,b,500,0.5,0,0\nshortcut,b,c,500,0.5,0,0", 400);
  SteadyState st = steady_state(b.model, Vec::Constant(1, 60.0), Vec::Constant(1, 5.0), kTheta,
                                ideal_gas());
  CHECK(st.converged);
  for (Eigen::Index i = 0; i < st.pbar.size(); ++i)
    CHECK(st.pbar(i) == doctest::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("steady: pipeline pressure decreases along the flow") {
  auto b = build("pipe,a,b,24000,1.422,0,1e-5", 800);
  SteadyState st = steady_state(b.model, Vec::Constant(1, 84.0), Vec::Constant(1, 46.3), kTheta,
                                ideal_gas());
  CHECK(st.converged);
  CHECK(!st.marched);
  // state nodes: demand (original node b) first, then the chain a->b
  Vec along(st.pbar.size());
  along.head(st.pbar.size() - 1) = st.pbar.tail(st.pbar.size() - 1);
  along(st.pbar.size() - 1) = st.pbar(0);
  for (Eigen::Index i = 1; i < along.size(); ++i) CHECK(along(i) < along(i - 1));
  CHECK(along(along.size() - 1) < 84.0);

  // residual of the assembled rhs is below tolerance
  auto [rp, rq] = eval_rhs(b.model, st.pbar, st.qbar, Vec::Constant(1, 84.0),
                           Vec::Constant(1, 46.3), kTheta, ideal_gas());
  CHECK(std::sqrt(rp.squaredNorm() + rq.squaredNorm()) <= 1e-6);

  // supply/demand mass balance through the outputs
  Vec sq = b.model.Csq * st.qbar;
  CHECK(sq(0) == doctest::Approx(46.3).epsilon(1e-10));
}

TEST_CASE("steady: correction iteration residual is monotone on the pipeline") {
  auto b = build("pipe,a,b,24000,1.422,0,1e-5", 800);
  Vec sp = Vec::Constant(1, 84.0), dq = Vec::Constant(1, 46.3);
  GasState gas = ideal_gas();

  double prev = 1e300;
  for (int its = 1; its <= 5; ++its) {
    SteadyOptions o;
    o.max_corrections = its;
    o.tol = 1e-300;          // run exactly `its` corrections
    o.max_march_steps = -1;  // marching disabled
    SteadyState st = steady_state(b.model, sp, dq, kTheta, gas, o);
    CHECK(st.iterations == its);
    CHECK(st.residual <= prev * (1.0 + 1e-12));
    prev = st.residual;
  }
}

TEST_CASE("steady: dimension errors") {
  auto b = build("pipe,a,b,3000,0.5,0,1e-5", 400);
  CHECK_THROWS_AS(steady_state(b.model, Vec::Constant(2, 84.0), Vec::Constant(1, 1.0), kTheta,
                               ideal_gas()),
                  Error);
  CHECK_THROWS_AS(steady_flux(b.model, Vec::Constant(2, 1.0)), Error);
}

TEST_CASE("steady: compressor network marches and pins the discharge node") {
  ModelConfig mc;
  mc.compressor_pressures = {52.0};
  auto b = build(
      "pipe,s,a,8000,0.8,0,1e-5\n"
      "compressor,a,c,10,0.8,0,0\n"
      "pipe,c,d,8000,0.8,0,1e-5",
      800, mc);
  SteadyState st = steady_state(b.model, Vec::Constant(1, 50.0), Vec::Constant(1, 30.0), kTheta,
                                ideal_gas());
  // discharge node c is held at the target pressure
  int c_row = -1;
  for (std::size_t i = 0; i < b.topo.state_nodes.size(); ++i)
    if (b.ref.refined.node_ids[static_cast<std::size_t>(b.topo.state_nodes[i])] == "c")
      c_row = static_cast<int>(i);
  REQUIRE(c_row >= 0);
  CHECK(st.pbar(c_row) == doctest::Approx(52.0).epsilon(1e-6));
  // flux balance still holds
  Vec sq = b.model.Csq * st.qbar;
  CHECK(sq.sum() == doctest::Approx(30.0).epsilon(1e-7));
}

TEST_CASE("steady: cache round trip") {
  auto b = build("pipe,a,b,3000,0.5,0,1e-5", 400);
  Vec sp = Vec::Constant(1, 84.0), dq = Vec::Constant(1, 46.3);
  SteadyState st = steady_state(b.model, sp, dq, kTheta, ideal_gas());
  auto dir = std::filesystem::temp_directory_path() / "gasmor_steady_cache";
  std::filesystem::remove_all(dir);
  std::string key = steady_cache_key(b.model, sp, dq, kTheta);
  steady_cache_store(dir.string(), key, st);
  SteadyState back;
  REQUIRE(steady_cache_load(dir.string(), key, back));
  CHECK((back.pbar - st.pbar).norm() == 0.0);
  CHECK((back.qbar - st.qbar).norm() == 0.0);
  SteadyState miss;
  CHECK(!steady_cache_load(dir.string(), "deadbeef", miss));
  std::filesystem::remove_all(dir);
}
