#pragma once

#include "gasmor/reductors.hpp"
#include "gasmor/solvers.hpp"

namespace gasmor {

/// Full model projected through a ProjectorSeries at one truncation order.
/// The reduced state is the steady-state deviation in reduced coordinates;
/// the nonlinearity lifts to full dimension around the anchor (no
/// hyper-reduction). The constant term absorbs A*xbar + F so the reduced
/// initial condition is zero and steady inputs keep it there.
struct ReducedModel {
  int np_r = 0, nq_r = 0;
  Mat Ep0r;              // Ep_r(theta) = d0_hat(theta) * Ep0r
  Mat Eqr, Apqr, Aqpr, Bpdr, Bqsr, Csqr, Cdpr;
  Vec Fpr, Fqr;
  Mat Up, Vp, Uq, Vq;    // lift / restrict at this order
  Vec pbar, qbar;        // anchor
  Vec ybar;              // steady output offset (s_q then d_p)
  const DiscreteModel* fom = nullptr;
};

/// Congruence-project all linear blocks and bind the lifted nonlinearity.
ReducedModel project(const DiscreteModel& m, const ProjectorSeries& series, int np_r, int nq_r,
                     const Vec& pbar, const Vec& qbar);

LumpedSystem lumped(const ReducedModel& r, const Params& th, const GasState& gas);

/// Time-step the reduced system with the shared solver implementations;
/// outputs are anchored so they approximate the full-order outputs.
Solution simulate_rom(const ReducedModel& r, const Scenario& scn, SolverKind solver, double h,
                      const GasState& gas, const SolveOptions& opts = {});

/// Reduce full states to the anchored reduced coordinates (V^T deviation).
Vec restrict_state(const ReducedModel& r, const Vec& p, const Vec& q);

}  // namespace gasmor
