#include "gasmor/solvers.hpp"

#include <cmath>

namespace gasmor {

SolverKind solver_from(const std::string& name) {
  if (name == "imex1") return SolverKind::Imex1;
  if (name == "imex2") return SolverKind::Imex2;
  if (name == "rk4") return SolverKind::Rk4;
  fail("timestep: unknown solver '" + name + "'");
}

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Imex1: return "imex1";
    case SolverKind::Imex2: return "imex2";
    case SolverKind::Rk4: return "rk4";
  }
  return "?";
}

namespace {

using Lu = Eigen::SparseLU<SpMat>;

void factor(Lu& lu, const SpMat& m, const char* what) {
  SpMat mc = m;
  mc.makeCompressed();
  lu.compute(mc);
  if (lu.info() != Eigen::Success) fail(std::string("timestep: singular ") + what + " matrix");
}

}  // namespace

Imex1Stepper::Imex1Stepper(const LumpedSystem& sys, double h, double gamma)
    : sys_(sys), h_(h), lu_(std::make_shared<Lu>()) {
  factor(*lu_, SpMat(sys.E - gamma * h * sys.A), "iteration");
}

Vec Imex1Stepper::advance(const Vec& x, const Vec& u) const {
  Vec rhs = sys_.A * x + sys_.B * u + sys_.F + sys_.f(x, u);
  return x + lu_->solve(h_ * rhs);
}

Solution solve(SolverKind kind, const LumpedSystem& sys, const InputFn& u_fn, const Vec& x0,
               double h, double tH, const SolveOptions& opts) {
  if (h <= 0 || tH <= 0) fail("timestep: needs h > 0 and tH > 0");
  const long steps = static_cast<long>(tH / h);
  const int n = sys.dim();
  const auto m_out = sys.C.rows();

  Solution sol;
  sol.t.resize(steps + 1);
  for (long k = 0; k <= steps; ++k) sol.t(k) = static_cast<double>(k) * h;
  sol.y.resize(steps + 1, m_out);
  if (opts.capture_states) sol.x.resize(steps + 1, n);

  const double t0 = now_seconds();
  Vec x = x0.size() ? x0 : Vec::Zero(n);
  if (x.size() != n) fail("timestep: initial state dimension mismatch");

  auto record = [&](long k, const Vec& xs) {
    sol.y.row(k) = (sys.C * xs + sys.y_offset).transpose();
    if (opts.capture_states) sol.x.row(k) = xs.transpose();
  };

  if (n == 0) {  // zero-order reduced models hold the anchored output
    for (long k = 0; k <= steps; ++k) record(k, x);
    sol.runtime = now_seconds() - t0;
    return sol;
  }

  Lu lu_imex, lu_e;
  const bool need_e = (kind == SolverKind::Imex2 || kind == SolverKind::Rk4);
  SpMat imex_mat;
  if (kind == SolverKind::Imex1) imex_mat = sys.E - opts.gamma * h * sys.A;
  if (kind == SolverKind::Imex2) imex_mat = sys.E - h * opts.gamma * opts.lambda * sys.A;
  if (kind != SolverKind::Rk4) factor(lu_imex, imex_mat, "iteration");
  if (need_e) factor(lu_e, sys.E, "mass");

  record(0, x);
  for (long k = 0; k < steps; ++k) {
    const double t = sol.t(k);
    if (opts.refactor_each_step) {
      if (kind != SolverKind::Rk4) factor(lu_imex, imex_mat, "iteration");
      if (need_e) factor(lu_e, sys.E, "mass");
    }
    try {
    switch (kind) {
      case SolverKind::Imex1: {
        Vec u = u_fn(t);
        Vec rhs = sys.A * x + sys.B * u + sys.F + sys.f(x, u);
        x += lu_imex.solve(h * rhs);
        break;
      }
      case SolverKind::Imex2: {
        const double g = opts.gamma, lam = opts.lambda;
        Vec u0 = u_fn(t);
        Vec u1 = u_fn(sol.t(k + 1));
        Vec bu0 = sys.B * u0 + sys.F;
        Vec f0 = sys.f(x, u0);
        Vec ex = sys.E * x;
        Vec z1 = lu_imex.solve(ex);
        Vec z2 = lu_imex.solve(ex + h * bu0 + h * f0 + (h * g * (1.0 - 2.0 * lam)) * (sys.A * z1));
        Vec bu1 = sys.B * u1 + sys.F;
        Vec sum = bu0 + f0 + g * (sys.A * z1) + bu1 + sys.f(z1, u1) + g * (sys.A * z2);
        x += lu_e.solve(0.5 * h * sum);
        break;
      }
      case SolverKind::Rk4: {
        auto phi = [&](const Vec& xs, double ts) {
          Vec u = u_fn(ts);
          return Vec(lu_e.solve(sys.A * xs + sys.B * u + sys.F + sys.f(xs, u)));
        };
        Vec k1 = phi(x, t);
        Vec k2 = phi(x + 0.5 * h * k1, t + 0.5 * h);
        Vec k3 = phi(x + 0.5 * h * k2, t + 0.5 * h);
        Vec k4 = phi(x + h * k3, t + h);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        break;
      }
    }
    } catch (const Error& e) {
      // a vector-field evaluation left the admissible set (e.g. nonpositive
      // reconstructed pressure); report it as a blow-up at this step
      sol.blew_up = true;
      sol.blow_step = k + 1;
      sol.blow_reason = e.what();
      sol.y.bottomRows(steps - k).setZero();
      if (opts.capture_states) sol.x.bottomRows(steps - k).setZero();
      break;
    }
    if (!x.allFinite()) {
      sol.blew_up = true;
      sol.blow_step = k + 1;
      sol.blow_reason = "non-finite state";
      sol.y.bottomRows(steps - k).setZero();
      if (opts.capture_states) sol.x.bottomRows(steps - k).setZero();
      break;
    }
    record(k + 1, x);
  }
  sol.runtime = now_seconds() - t0;
  return sol;
}

Solution solve_scenario(SolverKind kind, const DiscreteModel& m, const Scenario& scn, double h,
                        const GasState& gas, const Vec& x0, const SolveOptions& opts) {
  LumpedSystem sys = lumped(m, scn.params(), gas);
  InputFn u = [&scn](double t) { return input_stacked(scn, t); };
  return solve(kind, sys, u, x0, h, scn.tH, opts);
}

Solution imex1_solve(const DiscreteModel& m, const Scenario& scn, double h, double gamma,
                     const GasState& gas, const Vec& x0) {
  SolveOptions o;
  o.gamma = gamma;
  return solve_scenario(SolverKind::Imex1, m, scn, h, gas, x0, o);
}

Solution imex2_solve(const DiscreteModel& m, const Scenario& scn, double h, double gamma,
                     double lambda, const GasState& gas, const Vec& x0) {
  SolveOptions o;
  o.gamma = gamma;
  o.lambda = lambda;
  return solve_scenario(SolverKind::Imex2, m, scn, h, gas, x0, o);
}

Solution rk4_solve(const DiscreteModel& m, const Scenario& scn, double h, const GasState& gas,
                   const Vec& x0) {
  return solve_scenario(SolverKind::Rk4, m, scn, h, gas, x0, {});
}

}  // namespace gasmor
