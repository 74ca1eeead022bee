#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "gasmor/network.hpp"

using namespace gasmor;

static Eigen::MatrixXd dense(const SpMat& m) { return Eigen::MatrixXd(m); }

TEST_CASE("parse_net: single row") {
  auto net = parse_net("pipe,n1,n2,1000,0.5,0,1e-5");
  CHECK(net.node_count() == 2);
  CHECK(net.edge_count() == 1);
  CHECK(net.edges[0].kind == EdgeKind::Pipe);
  CHECK(net.edges[0].length == doctest::Approx(1000.0));
  CHECK(net.roles[0] == NodeRole::Supply);
  CHECK(net.roles[1] == NodeRole::Demand);
}

TEST_CASE("parse_net: yamal-scale pipe") {
  auto net = parse_net("# a long pipe\npipe,in,out,363000,1.422,0,1e-5\n");
  CHECK(net.edge_count() == 1);
  CHECK(net.edges[0].length == doctest::Approx(363000.0));
  CHECK(net.edges[0].diameter == doctest::Approx(1.422));
}

TEST_CASE("parse_net: errors") {
  CHECK_THROWS_AS(parse_net("pipe,n1,n2,1000"), Error);                    // arity
  CHECK_THROWS_AS(parse_net("tube,n1,n2,1,1,0,0"), Error);                 // unknown kind
  CHECK_THROWS_AS(parse_net("pipe,n1,n1,1,1,0,0"), Error);                 // self loop
  CHECK_THROWS_AS(parse_net("pipe,n1,n2,1000,0.5,0,1e-5\npipe,n1,n2,2,1,0,0"), Error);  // dup
  CHECK_THROWS_AS(parse_net("pipe,n1,n2,-5,0.5,0,1e-5"), Error);           // length
  CHECK_THROWS_AS(parse_net(""), Error);                                   // empty
}

TEST_CASE("classify_boundary: path and orientation rules") {
  auto net = parse_net("pipe,n1,n2,10,1,0,0\npipe,n2,n3,10,1,0,0");
  CHECK(net.roles[0] == NodeRole::Supply);
  CHECK(net.roles[1] == NodeRole::Internal);
  CHECK(net.roles[2] == NodeRole::Demand);

  // leaf with edge directed toward it is a demand
  auto t = parse_net("pipe,a,b,10,1,0,0\npipe,a,c,10,1,0,0\npipe,d,a,10,1,0,0");
  CHECK(t.roles[t.node_count() - 1] == NodeRole::Supply);  // d
  CHECK(t.roles[1] == NodeRole::Demand);                   // b
  CHECK(t.roles[2] == NodeRole::Demand);                   // c
}

TEST_CASE("classify_boundary: disconnected graph rejected") {
  CHECK_THROWS_AS(parse_net("pipe,a,b,10,1,0,0\npipe,c,d,10,1,0,0"), Error);
}

TEST_CASE("nominal_length") {
  CHECK(nominal_length(60, 20, 0.01) == doctest::Approx(1188.0));
  CHECK(nominal_length(20, 20, 0.01) == doctest::Approx(396.0));
  CHECK(nominal_length(60, 20, 0.0) == doctest::Approx(1200.0));
  CHECK_THROWS_AS(nominal_length(0, 20, 0.01), Error);
}

TEST_CASE("refine: segment counts and friction scaling") {
  auto net = parse_net("pipe,n1,n2,1000,0.5,0,1e-5");

  SUBCASE("long pipe with remainder") {
    auto r = refine(net, 400);
    REQUIRE(r.refined.edge_count() == 3);
    CHECK(r.friction_scale[0] == doctest::Approx(1.0));
    CHECK(r.friction_scale[1] == doctest::Approx(1.0));
    CHECK(r.friction_scale[2] == doctest::Approx(0.5));
    for (const auto& e : r.refined.edges) CHECK(e.length == doctest::Approx(400.0));
    CHECK(r.virtual_of == std::vector<int>{0, 0, 0});
    // boundary labels survive
    CHECK(r.refined.roles[0] == NodeRole::Supply);
    CHECK(r.refined.roles[1] == NodeRole::Demand);
  }
  SUBCASE("exact fit") {
    auto net2 = parse_net("pipe,n1,n2,400,0.5,0,1e-5");
    auto r = refine(net2, 400);
    REQUIRE(r.refined.edge_count() == 1);
    CHECK(r.friction_scale[0] == doctest::Approx(1.0));
  }
  SUBCASE("short pipe rounded up") {
    auto net3 = parse_net("pipe,n1,n2,100,0.5,0,1e-5");
    auto r = refine(net3, 400);
    REQUIRE(r.refined.edge_count() == 1);
    CHECK(r.friction_scale[0] == doctest::Approx(0.25));
    CHECK(r.refined.edges[0].length == doctest::Approx(400.0));
  }
}

TEST_CASE("refine: incline apportioned by represented sub-length") {
  auto net = parse_net("pipe,n1,n2,1000,0.5,30,1e-5");
  auto r = refine(net, 400);
  REQUIRE(r.refined.edge_count() == 3);
  CHECK(r.refined.edges[0].incline == doctest::Approx(12.0));
  CHECK(r.refined.edges[1].incline == doctest::Approx(12.0));
  CHECK(r.refined.edges[2].incline == doctest::Approx(6.0));
  double total = 0;
  for (const auto& e : r.refined.edges) total += e.incline;
  CHECK(total == doctest::Approx(30.0));
}

TEST_CASE("refine: length preservation up to rounding") {
  auto net = parse_net("pipe,n1,n2,3700,0.5,0,1e-5\npipe,n2,n3,150,0.6,0,1e-5");
  auto r = refine(net, 400);
  std::vector<double> covered(2, 0.0);
  for (std::size_t j = 0; j < r.refined.edges.size(); ++j)
    covered[static_cast<std::size_t>(r.virtual_of[j])] += r.dx;
  CHECK(covered[0] >= 3700.0);
  CHECK(covered[0] - 3700.0 < 400.0);
  CHECK(covered[1] >= 150.0);
  CHECK(covered[1] - 150.0 < 400.0);
}

TEST_CASE("refine: non-pipe elements pass through frictionless") {
  auto net = parse_net(
      "pipe,a,b,900,0.5,0,1e-5\n"
      "compressor,b,c,10,0.5,0,0\n"
      "shortcut,c,d,75,0.5,4,0\n"
      "valve,d,e,50,0.5,0,0\n"
      "pipe,e,f,900,0.5,0,1e-5");
  auto r = refine(net, 400);
  int comp = -1, shortcut = -1, valve = -1;
  for (int j = 0; j < r.refined.edge_count(); ++j) {
    if (r.refined.edges[static_cast<std::size_t>(j)].kind == EdgeKind::Compressor) comp = j;
    if (r.refined.edges[static_cast<std::size_t>(j)].kind == EdgeKind::Shortcut) shortcut = j;
    if (r.refined.edges[static_cast<std::size_t>(j)].kind == EdgeKind::Valve) valve = j;
  }
  REQUIRE(comp >= 0);
  REQUIRE(shortcut >= 0);
  REQUIRE(valve >= 0);
  CHECK(r.friction_scale[static_cast<std::size_t>(comp)] == 0.0);
  CHECK(r.friction_scale[static_cast<std::size_t>(shortcut)] == 0.0);
  CHECK(r.friction_scale[static_cast<std::size_t>(valve)] == 0.0);  // open valve = shortcut
  CHECK(r.refined.edges[static_cast<std::size_t>(shortcut)].incline == 0.0);
  CHECK(r.refined.edges[static_cast<std::size_t>(comp)].length == doctest::Approx(400.0));
}

TEST_CASE("incidence: two-edge path") {
  auto net = parse_net("pipe,n1,n2,10,1,0,0\npipe,n2,n3,10,1,0,0");
  auto t = incidence(net);

  Eigen::MatrixXd A(3, 2), AR(3, 2), AL(3, 2);
  A << -1, 0, 1, -1, 0, 1;
  AR << 0, 0, 1, 0, 0, 1;
  AL << -1, 0, 0, -1, 0, 0;
  CHECK(dense(t.A).isApprox(A));
  CHECK(dense(t.AR).isApprox(AR));
  CHECK(dense(t.AL).isApprox(AL));

  // A0 drops the supply row
  CHECK(t.A0.rows() == 2);
  CHECK(dense(t.A0).isApprox(A.bottomRows(2)));
  CHECK(t.state_nodes == std::vector<int>{1, 2});

  // ports
  CHECK(dense(t.Bs).isApprox(Eigen::MatrixXd{{1, 0}}));
  Eigen::MatrixXd Bd = Eigen::MatrixXd::Zero(3, 1);
  Bd(2, 0) = 1;
  CHECK(dense(t.Bd).isApprox(Bd));
}

TEST_CASE("incidence: structural identities on a refined mixed network") {
  auto net = parse_net(
      "pipe,s,a,900,0.5,3,1e-5\n"
      "pipe,a,b,1300,0.5,-2,1e-5\n"
      "pipe,a,c,500,0.6,0,1e-5\n"
      "compressor,b,c,10,0.5,0,0\n"
      "pipe,c,d,700,0.5,0,1e-5");
  auto r = refine(net, 400);
  auto t = incidence(r.refined);

  CHECK(dense(t.A).isApprox(dense(t.AR) + dense(t.AL)));
  Eigen::MatrixXd absA = dense(t.A).cwiseAbs();
  CHECK(absA.isApprox(dense(t.AR) - dense(t.AL)));
  CHECK(dense(t.A0).isApprox(dense(t.A0R) + dense(t.A0L)));

  // every column of A has exactly one +1 and one -1, so column sums vanish
  Eigen::VectorXd colsum = dense(t.A).colwise().sum();
  CHECK(colsum.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // row ordering of A0 equals node ordering with supply rows deleted
  Eigen::MatrixXd A = dense(t.A);
  for (std::size_t r0 = 0; r0 < t.state_nodes.size(); ++r0)
    CHECK(dense(t.A0).row(static_cast<Eigen::Index>(r0)) ==
          A.row(t.state_nodes[r0]));
}
