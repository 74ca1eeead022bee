#pragma once

#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <string>

#include "gasmor/model.hpp"
#include "gasmor/scenario.hpp"

namespace gasmor {

enum class SolverKind { Imex1, Imex2, Rk4 };

SolverKind solver_from(const std::string& name);
const char* to_string(SolverKind k);

struct SolveOptions {
  double gamma = 1.0;    // implicit relaxation
  double lambda = 0.5;   // imex2 DIRK parameter (1/2: stiffly accurate SDIRK)
  bool capture_states = false;
  bool refactor_each_step = false;  // disables factorization caching (testing)
};

struct Solution {
  Vec t;   // uniform grid, floor(tH/h)+1 samples
  Mat y;   // outputs per step, (s_q then d_p) columns
  Mat x;   // states per step when captured
  bool blew_up = false;
  long blow_step = -1;
  std::string blow_reason;
  double runtime = 0;  // [s]
};

using InputFn = std::function<Vec(double t)>;

/// Fixed-step integration of E xdot = A x + B u + F + f(x,u). Factorizations
/// are computed once per run and reused across steps.
Solution solve(SolverKind kind, const LumpedSystem& sys, const InputFn& u, const Vec& x0,
               double h, double tH, const SolveOptions& opts = {});

/// Scenario-driven convenience wrappers over the full-order model.
Solution imex1_solve(const DiscreteModel& m, const Scenario& scn, double h, double gamma = 1.0,
                     const GasState& gas = {}, const Vec& x0 = Vec());
Solution imex2_solve(const DiscreteModel& m, const Scenario& scn, double h, double gamma = 1.0,
                     double lambda = 0.5, const GasState& gas = {}, const Vec& x0 = Vec());
Solution rk4_solve(const DiscreteModel& m, const Scenario& scn, double h,
                   const GasState& gas = {}, const Vec& x0 = Vec());

Solution solve_scenario(SolverKind kind, const DiscreteModel& m, const Scenario& scn, double h,
                        const GasState& gas, const Vec& x0, const SolveOptions& opts = {});

/// Single-step first-order IMEX advance with a cached factorization; used by
/// the steady-state marcher.
class Imex1Stepper {
 public:
  Imex1Stepper(const LumpedSystem& sys, double h, double gamma);
  Vec advance(const Vec& x, const Vec& u) const;

 private:
  const LumpedSystem& sys_;
  double h_;
  std::shared_ptr<Eigen::SparseLU<SpMat>> lu_;
};

}  // namespace gasmor
