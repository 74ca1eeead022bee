#include "gasmor/rom.hpp"

namespace gasmor {

ReducedModel project(const DiscreteModel& m, const ProjectorSeries& series, int np_r, int nq_r,
                     const Vec& pbar, const Vec& qbar) {
  if (np_r > series.rank_p() || nq_r > series.rank_q())
    fail("rom: requested order (" + std::to_string(np_r) + "," + std::to_string(nq_r) +
         ") exceeds series rank (" + std::to_string(series.rank_p()) + "," +
         std::to_string(series.rank_q()) + ")");
  if (pbar.size() != m.np || qbar.size() != m.nq) fail("rom: anchor dimension mismatch");

  ReducedModel r;
  r.np_r = np_r;
  r.nq_r = nq_r;
  r.fom = &m;
  r.Up = series.Up.leftCols(np_r);
  r.Vp = series.Vp.leftCols(np_r);
  r.Uq = series.Uq.leftCols(nq_r);
  r.Vq = series.Vq.leftCols(nq_r);
  r.pbar = pbar;
  r.qbar = qbar;

  r.Ep0r = r.Vp.transpose() * (m.Ep0 * r.Up);
  r.Eqr = r.Vq.transpose() * m.Eq.asDiagonal() * r.Uq;
  r.Apqr = r.Vp.transpose() * (m.Apq * r.Uq);
  r.Aqpr = r.Vq.transpose() * (m.Aqp * r.Up);
  r.Bpdr = r.Vp.transpose() * m.Bpd;
  r.Bqsr = r.Vq.transpose() * m.Bqs;
  r.Csqr = m.Csq * r.Uq;
  r.Cdpr = m.Cdp * r.Up;
  r.Fpr = r.Vp.transpose() * (m.Apq * qbar + m.Fp);
  r.Fqr = r.Vq.transpose() * (m.Aqp * pbar + m.Fq);
  r.ybar.resize(m.port_dim());
  r.ybar << m.Csq * qbar, m.Cdp * pbar;
  return r;
}

LumpedSystem lumped(const ReducedModel& r, const Params& th, const GasState& gas) {
  LumpedSystem s;
  s.np = r.np_r;
  s.nq = r.nq_r;
  const int n = r.np_r + r.nq_r;
  const DiscreteModel& fom = *r.fom;
  const double d0h = d0_hat(th, gas);

  Mat e = Mat::Zero(n, n), a = Mat::Zero(n, n);
  Mat b = Mat::Zero(n, fom.port_dim()), c = Mat::Zero(fom.port_dim(), n);
  e.topLeftCorner(r.np_r, r.np_r) = d0h * r.Ep0r;
  e.bottomRightCorner(r.nq_r, r.nq_r) = r.Eqr;
  a.topRightCorner(r.np_r, r.nq_r) = r.Apqr;
  a.bottomLeftCorner(r.nq_r, r.np_r) = r.Aqpr;
  b.topRightCorner(r.np_r, fom.nd) = r.Bpdr;
  b.bottomLeftCorner(r.nq_r, fom.ns) = r.Bqsr;
  c.topRightCorner(fom.ns, r.nq_r) = r.Csqr;
  c.bottomLeftCorner(fom.nd, r.np_r) = r.Cdpr;
  s.E = e.sparseView();
  s.A = a.sparseView();
  s.B = b.sparseView();
  s.C = c.sparseView();
  s.F.resize(n);
  s.F << r.Fpr, r.Fqr;
  s.y_offset = r.ybar;

  const ReducedModel* rm = &r;
  Params theta = th;
  GasState g = gas;
  s.f = [rm, theta, g](const Vec& x, const Vec& u) {
    const DiscreteModel& m = *rm->fom;
    Vec p = rm->pbar + rm->Up * x.head(rm->np_r);
    Vec q = rm->qbar + rm->Uq * x.tail(rm->nq_r);
    Vec fq = eval_fq(m, p, q, u.head(m.ns), theta, g);
    Vec out = Vec::Zero(x.size());
    out.tail(rm->nq_r) = rm->Vq.transpose() * fq;
    return out;
  };
  return s;
}

Solution simulate_rom(const ReducedModel& r, const Scenario& scn, SolverKind solver, double h,
                      const GasState& gas, const SolveOptions& opts) {
  LumpedSystem sys = lumped(r, scn.params(), gas);
  InputFn u = [&scn](double t) { return input_stacked(scn, t); };
  return solve(solver, sys, u, Vec::Zero(r.np_r + r.nq_r), h, scn.tH, opts);
}

Vec restrict_state(const ReducedModel& r, const Vec& p, const Vec& q) {
  Vec x(r.np_r + r.nq_r);
  x.head(r.np_r) = r.Vp.transpose() * (p - r.pbar);
  x.tail(r.nq_r) = r.Vq.transpose() * (q - r.qbar);
  return x;
}

}  // namespace gasmor
