#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <filesystem>

#include "gasmor/gramians.hpp"
#include "oracles.hpp"

using namespace gasmor;

namespace {

Params kTheta{283.15, 530.0};

GasState ideal_gas() {
  GasState g;
  g.z0 = 1.0;
  g.d0 = 1.0 / (kTheta.T0 * kTheta.RS);
  return g;
}

/// Surrogate LTI training system x' = A x + B u, y = C x around xbar = 0.
TrainingSystem surrogate(const Mat& a, const Mat& b, const Mat& c, int np, bool with_dual = false) {
  TrainingSystem ts;
  const int n = static_cast<int>(a.rows());
  ts.np = np;
  ts.nq = n - np;
  ts.theta = kTheta;
  ts.sys.E = Mat(Mat::Identity(n, n)).sparseView();
  ts.sys.A = a.sparseView();
  ts.sys.B = b.sparseView();
  ts.sys.C = c.sparseView();
  ts.sys.F = Vec::Zero(n);
  ts.sys.y_offset = Vec::Zero(c.rows());
  ts.sys.f = [](const Vec& x, const Vec&) { return Vec(Vec::Zero(x.size())); };
  ts.sys.np = np;
  ts.sys.nq = n - np;
  ts.xbar = Vec::Zero(n);
  ts.ubar = Vec::Zero(b.cols());
  ts.ybar = Vec::Zero(c.rows());
  if (with_dual) {
    ts.dual = ts.sys;
    ts.dual.A = Mat(a.transpose()).sparseView();
    ts.dual.B = Mat(c.transpose()).sparseView();
    ts.dual.C = Mat(b.transpose()).sparseView();
    ts.dual_ubar = Vec::Zero(c.rows());
    ts.has_dual = true;
  }
  return ts;
}

TrainingSetup fine_setup(double h = 1e-3, double horizon = 25.0) {
  TrainingSetup s;
  s.horizon = horizon;
  s.h = h;
  s.shape = InputShape::Impulse;
  s.input_rel = 0.0;
  s.input_abs = 1.0;  // unit perturbations
  s.state_rel = 0.0;
  s.state_abs = 1.0;
  s.solver = SolverKind::Rk4;  // preserves equilibria exactly, high order
  s.workers = 2;
  return s;
}

Mat scalar_decay_a() {
  Mat a(1, 1);
  a << -1;
  return a;
}

}  // namespace

TEST_CASE("WR: 1-state impulse matches the Lyapunov solution") {
  Mat a = scalar_decay_a(), b = Mat::Ones(1, 1), c = Mat::Ones(1, 1);
  GramianTrainer t({surrogate(a, b, c, 1)}, fine_setup());
  GramianPair g = t.wr();
  CHECK(g.Wp(0, 0) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(g.Wq.size() == 0);
  CHECK(t.stats().input_runs == 1);
}

TEST_CASE("WR: zero perturbation scale gives the zero Gramian") {
  Mat a = scalar_decay_a(), b = Mat::Ones(1, 1), c = Mat::Ones(1, 1);
  TrainingSetup s = fine_setup(1e-2, 5.0);
  s.input_abs = 0.0;  // no input excitation at ubar = 0
  GramianTrainer t({surrogate(a, b, c, 1)}, s);
  CHECK(t.wr().Wp.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("WR: two identical parameter samples double the Gramian") {
  Mat a = scalar_decay_a(), b = Mat::Ones(1, 1), c = Mat::Ones(1, 1);
  TrainingSetup s = fine_setup(1e-2, 10.0);
  GramianTrainer one({surrogate(a, b, c, 1)}, s);
  GramianTrainer two({surrogate(a, b, c, 1), surrogate(a, b, c, 1)}, s);
  CHECK(two.wr().Wp(0, 0) == doctest::Approx(2.0 * one.wr().Wp(0, 0)).epsilon(1e-12));
}

TEST_CASE("WR: scaling covariance on a linear surrogate") {
  Mat a(2, 2), b(2, 1), c(1, 2);
  a << -1, 0.3, 0.1, -2;
  b << 1, 0.5;
  c << 1, 0;
  TrainingSetup s = fine_setup(1e-2, 15.0);
  GramianTrainer t1({surrogate(a, b, c, 1)}, s);
  TrainingSetup s3 = s;
  s3.input_abs = 3.0;
  GramianTrainer t3({surrogate(a, b, c, 1)}, s3);
  CHECK((t3.wr().Wp - 9.0 * t1.wr().Wp).cwiseAbs().maxCoeff() <=
        1e-10 * t3.wr().Wp.cwiseAbs().maxCoeff());
}

TEST_CASE("WO: 1-state output energy matches the Lyapunov solution") {
  Mat a = scalar_decay_a(), b = Mat::Zero(1, 1), c = Mat::Ones(1, 1);
  GramianTrainer t({surrogate(a, b, c, 1)}, fine_setup());
  CHECK(t.wo().Wp(0, 0) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(t.stats().state_runs == 1);
}

TEST_CASE("WO: zero output map gives the zero Gramian") {
  Mat a = scalar_decay_a(), b = Mat::Ones(1, 1), c = Mat::Zero(1, 1);
  GramianTrainer t({surrogate(a, b, c, 1)}, fine_setup(1e-2, 5.0));
  CHECK(t.wo().Wp.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("WX: 1-state cross energy and degenerate cases") {
  Mat a = scalar_decay_a(), b = Mat::Ones(1, 1), c = Mat::Ones(1, 1);
  GramianTrainer t({surrogate(a, b, c, 1)}, fine_setup());
  CHECK(t.wx().Wp(0, 0) == doctest::Approx(0.5).epsilon(0.01));

  Mat b0 = Mat::Zero(1, 1);
  GramianTrainer t0({surrogate(a, b0, c, 1)}, fine_setup(1e-2, 5.0));
  CHECK(t0.wx().Wp.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("WX: SISO identity Wx^2 = Wr Wo on a symmetric surrogate") {
  // symmetric SISO system (A = A^T, C = B^T) where the identity is exact
  Mat a(3, 3), b(3, 1);
  a << -2, 0.5, 0, 0.5, -1.5, 0.25, 0, 0.25, -1;
  b << 1, 0.5, 0.25;
  Mat c = b.transpose();
  TrainingSetup s = fine_setup(5e-4, 30.0);
  GramianTrainer t({surrogate(a, b, c, 3)}, s);
  Mat wx = t.wx().Wp, wr = t.wr().Wp, wo = t.wo().Wp;
  CHECK((wx * wx - wr * wo).norm() <= 0.02 * (wr * wo).norm());
}

TEST_CASE("WZ: SISO equals WX exactly and zero outputs vanish") {
  Mat a(2, 2), b(2, 1), c(1, 2);
  a << -1, 0.2, 0.1, -2;
  b << 1, 0.4;
  c << 0.8, 0.1;
  TrainingSetup s = fine_setup(1e-2, 15.0);
  GramianTrainer t({surrogate(a, b, c, 1)}, s);
  CHECK((t.wz().Wp - t.wx().Wp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.wz().Wq - t.wx().Wq).cwiseAbs().maxCoeff() == 0.0);

  Mat c0 = Mat::Zero(1, 2);
  GramianTrainer tz({surrogate(a, b, c0, 1)}, s);
  CHECK(tz.wz().Wp.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("WZ: literal triple-sum oracle on a 2-port diagonal surrogate") {
  Mat a(2, 2), b(2, 2), c(2, 2);
  a << -1, 0, 0, -2;
  b << 1, 0.3, 0.2, 1;
  c << 0.7, 0.1, 0.4, 1.1;
  TrainingSetup s = fine_setup(1e-2, 12.0);
  s.shape = InputShape::Step;
  GramianTrainer t({surrogate(a, b, c, 1)}, s);
  Mat wz_p = t.wz().Wp, wz_q = t.wz().Wq;

  // independent reimplementation: simulate each perturbation run with the
  // same solver, then evaluate Eq-style nested scalar sums literally
  const int n = 2, ports = 2;
  const auto steps = static_cast<Eigen::Index>(s.horizon / s.h);
  LumpedSystem sys = surrogate(a, b, c, 1).sys;
  std::vector<Mat> xs;  // input-perturbed states
  for (int m = 0; m < ports; ++m) {
    InputFn u = [&, m](double) {
      Vec v = Vec::Zero(ports);
      v(m) += 1.0;
      return v;
    };
    SolveOptions o;
    o.capture_states = true;
    xs.push_back(solve(s.solver, sys, u, Vec::Zero(n), s.h, s.horizon, o).x);
  }
  std::vector<Mat> ys;  // state-perturbation outputs
  for (int i = 0; i < n; ++i) {
    InputFn u = [&](double) { return Vec(Vec::Zero(ports)); };
    Vec x0 = Vec::Zero(n);
    x0(i) = 1.0;
    ys.push_back(solve(s.solver, sys, u, x0, s.h, s.horizon).y);
  }
  Mat wz_ref = Mat::Zero(n, n);
  for (int m = 0; m < ports; ++m)
    for (int qq = 0; qq < ports; ++qq)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (Eigen::Index k = 0; k < steps; ++k)
            wz_ref(i, j) += s.h * xs[static_cast<std::size_t>(m)](k, i) *
                            ys[static_cast<std::size_t>(j)](k, qq);

  CHECK(std::abs(wz_p(0, 0) - wz_ref(0, 0)) <= 1e-10);
  CHECK(std::abs(wz_q(0, 0) - wz_ref(1, 1)) <= 1e-10);
}

TEST_CASE("structured blocks are symmetric PSD for WR/WO") {
  Mat a(4, 4), b(4, 2), c(2, 4);
  a << -2, 0.5, 0, 0.1, 0.4, -1.5, 0.2, 0, 0, 0.3, -1, 0.2, 0.1, 0, 0.2, -2.5;
  b << 1, 0, 0, 1, 0.5, 0.2, 0.1, 0.3;
  c << 1, 0, 0.5, 0, 0, 1, 0, 0.5;
  TrainingSetup s = fine_setup(1e-2, 20.0);
  GramianTrainer t({surrogate(a, b, c, 2)}, s);
  for (const Mat& w : {t.wr().Wp, t.wr().Wq, t.wo().Wp, t.wo().Wq}) {
    CHECK((w - w.transpose()).norm() <= 1e-8 * (1.0 + w.norm()));
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (w + w.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("trajectory counts and cache hits") {
  Mat a(4, 4), b(4, 2), c(2, 4);
  a = -Mat::Identity(4, 4);
  b.setOnes();
  c.setOnes();
  TrainingSetup s = fine_setup(1e-1, 2.0);
  GramianTrainer t({surrogate(a, b, c, 2, true), surrogate(a, b, c, 2, true)}, s);

  (void)t.wr();
  CHECK(t.stats().input_runs == 2 * 2);  // (Ns+Nd) x K
  (void)t.wo(false);
  CHECK(t.stats().state_runs == 4 * 2);  // (Np+Nq) x K
  (void)t.wx(false);                     // reuses both sets
  CHECK(t.stats().input_runs == 4);
  CHECK(t.stats().state_runs == 8);
  (void)t.wo(true);
  CHECK(t.stats().dual_runs == 2 * 2);   // 2(Ns+Nd) total with the primal runs
  long hits = t.stats().trajectory_cache_hits;
  (void)t.wr();
  (void)t.wz(false);
  CHECK(t.stats().trajectory_cache_hits > hits);
  CHECK(t.stats().input_runs == 4);  // nothing re-simulated
}

TEST_CASE("on-disk Gramian cache skips the perturbation runs") {
  Mat a(2, 2), b(2, 1), c(1, 2);
  a << -1, 0.2, 0.1, -2;
  b << 1, 0.4;
  c << 0.8, 0.1;
  auto dir = std::filesystem::temp_directory_path() / "gasmor_gram_cache";
  std::filesystem::remove_all(dir);
  TrainingSetup s = fine_setup(1e-2, 10.0);
  s.cache_dir = dir.string();
  GramianTrainer cold({surrogate(a, b, c, 1)}, s, 0xabcd);
  GramianPair g1 = cold.wr();
  CHECK(cold.stats().input_runs == 1);
  CHECK(cold.stats().gramian_cache_hits == 0);

  GramianTrainer warm({surrogate(a, b, c, 1)}, s, 0xabcd);
  GramianPair g2 = warm.wr();
  CHECK(warm.stats().input_runs == 0);  // nothing re-simulated
  CHECK(warm.stats().gramian_cache_hits == 1);
  CHECK((g1.Wp - g2.Wp).cwiseAbs().maxCoeff() == 0.0);

  GramianTrainer other({surrogate(a, b, c, 1)}, s, 0xaaaa);  // different key
  (void)other.wr();
  CHECK(other.stats().input_runs == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("empirical Gramians match dense oracles on the linearized pipe") {
  // small endpoint model, frozen Jacobian at the steady state
  auto net = parse_net("pipe,a,b,4000,0.5,0,1e-5");
  auto ref = refine(net, 800);
  auto topo = incidence(ref.refined);
  DiscreteModel model = assemble(topo, ref, {});
  REQUIRE(model.state_dim() <= 20);
  GasState gas = ideal_gas();
  Vec sbar = Vec::Constant(1, 60.0), dbar = Vec::Constant(1, 20.0);
  SteadyState st = steady_state(model, sbar, dbar, kTheta, gas);

  LumpedSystem sys = lumped(model, kTheta, gas);
  auto [dfdp, dfdq] = eval_fq_jacobian(model, st.pbar, st.qbar, sbar, kTheta, gas);
  const int n = model.state_dim();
  Mat a_tot = Mat(sys.A);
  a_tot.bottomLeftCorner(model.nq, model.np) += Mat(dfdp);
  a_tot.bottomRightCorner(model.nq, model.nq) += Mat(Vec(dfdq).asDiagonal());

  // linearized training system around the steady state
  TrainingSystem ts;
  ts.theta = kTheta;
  ts.np = model.np;
  ts.nq = model.nq;
  ts.sys = sys;
  Vec xbar(n);
  xbar << st.pbar, st.qbar;
  Vec fbar = sys.f(xbar, (Vec(2) << sbar, dbar).finished());
  Mat jf = a_tot - Mat(sys.A);
  ts.sys.f = [fbar, jf, xbar](const Vec& x, const Vec&) { return Vec(fbar + jf * (x - xbar)); };
  ts.xbar = xbar;
  ts.ubar.resize(2);
  ts.ubar << sbar, dbar;
  ts.ybar = sys.C * xbar;
  // linearized dual: E z' = A_tot^T z + C^T u
  ts.dual = ts.sys;
  ts.dual.A = Mat(a_tot.transpose()).sparseView();
  ts.dual.B = Mat(Mat(sys.C).transpose()).sparseView();
  ts.dual.C = Mat(Mat(sys.B).transpose()).sparseView();
  ts.dual.f = [](const Vec& x, const Vec&) { return Vec(Vec::Zero(x.size())); };
  ts.dual.F = -(a_tot.transpose() * xbar + Mat(sys.C).transpose() * ts.ybar);
  ts.dual_ubar = ts.ybar;
  ts.has_dual = true;

  TrainingSetup s = fine_setup(0.1, 600.0);
  GramianTrainer t({ts}, s);

  Mat e = Mat(sys.E);
  Mat einv = e.inverse();
  Mat f = einv * a_tot;
  Mat g = einv * Mat(sys.B);
  Mat h = Mat(sys.C);

  Mat wr_true = oracles::reach_gramian(f, g);
  Mat wo_true = oracles::obs_gramian(f, h);
  Mat wx_true = oracles::cross_gramian(f, g, h);

  GramianPair wr = t.wr();
  CHECK((wr.Wp - wr_true.topLeftCorner(model.np, model.np)).norm() <=
        0.05 * wr_true.topLeftCorner(model.np, model.np).norm());
  CHECK((wr.Wq - wr_true.bottomRightCorner(model.nq, model.nq)).norm() <=
        0.05 * wr_true.bottomRightCorner(model.nq, model.nq).norm());

  GramianPair wo = t.wo(false);
  CHECK((wo.Wp - wo_true.topLeftCorner(model.np, model.np)).norm() <=
        0.05 * wo_true.topLeftCorner(model.np, model.np).norm());
  CHECK((wo.Wq - wo_true.bottomRightCorner(model.nq, model.nq)).norm() <=
        0.05 * wo_true.bottomRightCorner(model.nq, model.nq).norm());

  GramianPair wx = t.wx(false);
  CHECK((wx.Wp - wx_true.topLeftCorner(model.np, model.np)).norm() <=
        0.05 * wx_true.topLeftCorner(model.np, model.np).norm());

  // dual-based observability data reproduces the primal Gramian
  GramianPair wod = t.wo(true);
  CHECK((wod.Wp - wo.Wp).norm() <= 0.05 * wo.Wp.norm());
  CHECK((wod.Wq - wo.Wq).norm() <= 0.05 * wo.Wq.norm());
}
