#include "gasmor/model.hpp"

#include <cmath>
#include <memory>

namespace gasmor {

namespace {
constexpr double kGravity = 9.80665;  // [m/s^2]
constexpr double kBar = 1.0e5;        // [Pa]

double cross_section(double d) { return 0.25 * M_PI * d * d; }
}  // namespace

Discretization discretization_from(const std::string& name) {
  if (name == "ode_mid") return Discretization::OdeMid;
  if (name == "ode_end") return Discretization::OdeEnd;
  fail("gasmodel: unknown discretization '" + name + "'");
}

const char* to_string(Discretization d) {
  return d == Discretization::OdeMid ? "ode_mid" : "ode_end";
}

GasState gas_state(const Vec& pbar_bar, const Params& th, CompressibilityModel variant,
                   const CriticalPoint& crit) {
  if (pbar_bar.size() == 0) fail("gasmodel: gas_state needs a nonempty pressure vector");
  if ((pbar_bar.array() <= 0).any()) fail("gasmodel: gas_state needs elementwise positive pressures");
  GasState g;
  g.p0 = pbar_bar.mean() * kBar;
  g.z0 = compressibility(variant, g.p0, th.T0, crit);
  g.d0 = 1.0 / (th.T0 * th.RS * g.z0);
  return g;
}

void compressor_inject(DiscreteModel& model, const TopologyMatrices& topo, int edge,
                       double p_target_bar) {
  if (edge < 0 || edge >= model.nq) fail("gasmodel: compressor edge index out of range");
  if (!model.is_compressor[static_cast<std::size_t>(edge)])
    fail("gasmodel: compressor_inject called on a non-compressor edge");

  // flux equation becomes qdot = p_target - p_discharge: keep only the
  // discharge (head) coupling of the row, unscaled, and load the target
  Vec row = Vec::Zero(model.np);
  for (SpMat::InnerIterator it(topo.A0R, edge) ; it; ++it) row(it.row()) = -1.0;
  if ((row.array() != 0).count() != 1)
    fail("gasmodel: compressor edge " + std::to_string(edge) + " has no internal discharge node");

  SpMat aqp = model.Aqp;
  for (int c = 0; c < aqp.outerSize(); ++c)
    for (SpMat::InnerIterator it(aqp, c); it; ++it)
      if (it.row() == edge) it.valueRef() = row(c);
  aqp.prune(0.0);
  model.Aqp = aqp;
  model.Eq(edge) = 1.0;
  model.Fq(edge) = p_target_bar;
  model.Df(edge) = 0.0;
  model.Dg(edge) = 0.0;
}

DiscreteModel assemble(const TopologyMatrices& topo, const RefinementResult& refinement,
                       const ModelConfig& config, const Vec& qbar_hint) {
  const Network& net = refinement.refined;
  const int nq = net.edge_count();
  const int np = static_cast<int>(topo.state_nodes.size());
  const int ns = static_cast<int>(topo.supply_rows.size());
  const int nd = static_cast<int>(topo.demand_cols.size());
  if (ns == 0 || nd == 0) fail("gasmodel: network needs at least one supply and one demand");
  if (qbar_hint.size() != 0 && qbar_hint.size() != nq)
    fail("gasmodel: qbar_hint dimension mismatch");

  DiscreteModel m;
  m.disc = config.disc;
  m.np = np;
  m.nq = nq;
  m.ns = ns;
  m.nd = nd;

  // per-edge tables
  Vec dp_inv(nq);  // S_k L_k
  m.Eq.resize(nq);
  m.Df.resize(nq);
  m.Dg.resize(nq);
  m.lambda = Vec::Zero(nq);
  m.is_compressor.assign(static_cast<std::size_t>(nq), 0);
  std::vector<int> compressors;
  for (int j = 0; j < nq; ++j) {
    const Edge& e = net.edges[static_cast<std::size_t>(j)];
    const double S = cross_section(e.diameter);
    dp_inv(j) = S * e.length;
    m.Eq(j) = 1.0e-5 * e.length / S;
    m.Dg(j) = 1.0e-5 * kGravity * e.incline;
    double fs = refinement.friction_scale[static_cast<std::size_t>(j)];
    if (e.kind == EdgeKind::Pipe && fs > 0) {
      double re = config.re_fallback;
      if (qbar_hint.size() > 0 && std::abs(qbar_hint(j)) > 0)
        re = std::abs(qbar_hint(j)) * e.diameter / (S * config.eta);
      double lam = friction_factor(config.friction, e.diameter, e.roughness, re);
      m.lambda(j) = lam;
      m.Df(j) = fs * lam / (2.0 * e.diameter * S);
    } else {
      m.Df(j) = 0.0;
    }
    if (e.kind == EdgeKind::Compressor) {
      m.is_compressor[static_cast<std::size_t>(j)] = 1;
      compressors.push_back(j);
    }
    if (e.kind == EdgeKind::Valve) {
      // only the open setting is supported; it behaves as a shortcut
    }
  }

  const SpMat A0t = SpMat(topo.A0.transpose());
  if (config.disc == Discretization::OdeEnd) {
    // index-1 topology: supplies feed the network through leaf edges, which
    // classify_boundary guarantees; what remains is that every non-supply
    // node is the head of some edge, otherwise Ep is singular
    m.Ep0 = topo.A0R * dp_inv.asDiagonal() * SpMat(topo.A0R.transpose());
    Vec diag = m.Ep0.diagonal();
    for (int i = 0; i < np; ++i)
      if (diag(i) <= 0)
        fail("gasmodel: endpoint topology violation, node '" +
             net.node_ids[static_cast<std::size_t>(topo.state_nodes[static_cast<std::size_t>(i)])] +
             "' heads no edge (singular Ep)");
    m.Pstar = SpMat(topo.A0R.transpose());
    m.PstarS.resize(nq, ns);
  } else {
    SpMat absA0 = topo.A0R - topo.A0L;  // |A0|
    m.Ep0 = absA0 * (0.25 * dp_inv).asDiagonal() * SpMat(absA0.transpose());
    m.Pstar = 0.5 * SpMat(absA0.transpose());
    m.PstarS = 0.5 * SpMat(topo.Bs.transpose());
  }

  m.Apq = topo.A0;
  m.Aqp = -A0t;
  // demand columns of Bd restricted to state rows, negated into the inflow balance
  SpMat bd0(np, nd);
  {
    std::vector<Eigen::Triplet<double>> tr;
    std::vector<int> row_of(static_cast<std::size_t>(topo.Bd.rows()), -1);
    for (std::size_t r = 0; r < topo.state_nodes.size(); ++r)
      row_of[static_cast<std::size_t>(topo.state_nodes[r])] = static_cast<int>(r);
    for (int c = 0; c < topo.Bd.outerSize(); ++c)
      for (SpMat::InnerIterator it(topo.Bd, c); it; ++it) {
        int r = row_of[static_cast<std::size_t>(it.row())];
        if (r >= 0) tr.emplace_back(r, c, it.value());
      }
    bd0.setFromTriplets(tr.begin(), tr.end());
  }
  m.Bpd = -bd0;
  m.Bqs = SpMat(topo.Bs.transpose());
  m.Csq = topo.Bs;
  m.Cdp = SpMat(bd0.transpose());
  m.Fp = Vec::Zero(np);
  m.Fq = Vec::Zero(nq);

  if (!compressors.empty()) {
    if (config.compressor_pressures.size() != compressors.size())
      fail("gasmodel: network has " + std::to_string(compressors.size()) +
           " compressor(s) but " + std::to_string(config.compressor_pressures.size()) +
           " discharge pressure(s) were given");
    for (std::size_t c = 0; c < compressors.size(); ++c)
      compressor_inject(m, topo, compressors[c], config.compressor_pressures[c]);
  }

  Fnv64 f;
  f.add(net.content_hash());
  f.add(refinement.dx);
  f.add(to_string(config.disc));
  f.add(to_string(config.friction));
  f.add(to_string(config.compressibility));
  f.add(config.eta);
  for (double pc : config.compressor_pressures) f.add(pc);
  m.hash = f.value();
  return m;
}

/// pstar = Pstar p + PstarS sp, the per-edge pressure reconstruction [bar].
static Vec pstar_of(const DiscreteModel& m, const Vec& p, const Vec& sp) {
  Vec ps = m.Pstar * p;
  if (m.PstarS.nonZeros() > 0) ps += m.PstarS * sp;
  return ps;
}

Vec eval_fq(const DiscreteModel& m, const Vec& p, const Vec& q, const Vec& sp, const Params& th,
            const GasState& gas) {
  const double d0h = d0_hat(th, gas);
  Vec ps = pstar_of(m, p, sp);
  Vec f = Vec::Zero(m.nq);
  for (int j = 0; j < m.nq; ++j) {
    if (m.Df(j) == 0 && m.Dg(j) == 0) continue;
    double dp = d0h * ps(j);
    if (dp <= 0)
      fail("gasmodel: nonpositive reconstructed pressure at edge " + std::to_string(j));
    f(j) = -(m.Dg(j) * dp + m.Eq(j) * m.Df(j) * std::abs(q(j)) * q(j) / dp);
  }
  return f;
}

std::pair<Vec, Vec> eval_rhs(const DiscreteModel& m, const Vec& p, const Vec& q, const Vec& sp,
                             const Vec& dq, const Params& th, const GasState& gas) {
  Vec rp = m.Apq * q + m.Bpd * dq + m.Fp;
  Vec rq = m.Aqp * p + m.Bqs * sp + m.Fq + eval_fq(m, p, q, sp, th, gas);
  return {std::move(rp), std::move(rq)};
}

std::pair<SpMat, Vec> eval_fq_jacobian(const DiscreteModel& m, const Vec& p, const Vec& q,
                                       const Vec& sp, const Params& th, const GasState& gas) {
  const double d0h = d0_hat(th, gas);
  Vec ps = pstar_of(m, p, sp);
  Vec dfdq = Vec::Zero(m.nq);
  Vec dfdps = Vec::Zero(m.nq);
  for (int j = 0; j < m.nq; ++j) {
    if (m.Df(j) == 0 && m.Dg(j) == 0) continue;
    double dp = d0h * ps(j);
    if (dp <= 0)
      fail("gasmodel: nonpositive reconstructed pressure at edge " + std::to_string(j));
    dfdq(j) = -2.0 * m.Eq(j) * m.Df(j) * std::abs(q(j)) / dp;
    // d/d(ps): gravity part -Dg*d0h, friction part +Eq*Df*|q|q*d0h/dp^2
    dfdps(j) = -m.Dg(j) * d0h + m.Eq(j) * m.Df(j) * std::abs(q(j)) * q(j) * d0h / (dp * dp);
  }
  SpMat dfdp = dfdps.asDiagonal() * m.Pstar;
  return {std::move(dfdp), std::move(dfdq)};
}

PortHamiltonianParts ph_parts(const DiscreteModel& m, const Params& th, const GasState& gas) {
  if (m.disc != Discretization::OdeEnd)
    fail("gasmodel: ph_parts requires the endpoint discretization");
  PortHamiltonianParts ph;
  const double d0h = d0_hat(th, gas);
  const int n = m.state_dim();

  std::vector<Eigen::Triplet<double>> te, tj, tg, tp;
  for (int c = 0; c < m.Ep0.outerSize(); ++c)
    for (SpMat::InnerIterator it(m.Ep0, c); it; ++it)
      te.emplace_back(static_cast<int>(it.row()), c, d0h * it.value());
  for (int j = 0; j < m.nq; ++j) te.emplace_back(m.np + j, m.np + j, m.Eq(j));
  ph.E.resize(n, n);
  ph.E.setFromTriplets(te.begin(), te.end());

  // J = [0, Apq; -Apq^T, 0] is exactly skew; compressor row surgery in Aqp
  // is carried by R via the -Fq/q summand instead
  for (int c = 0; c < m.Apq.outerSize(); ++c)
    for (SpMat::InnerIterator it(m.Apq, c); it; ++it) {
      tj.emplace_back(static_cast<int>(it.row()), m.np + c, it.value());
      tj.emplace_back(m.np + c, static_cast<int>(it.row()), -it.value());
    }
  ph.J.resize(n, n);
  ph.J.setFromTriplets(tj.begin(), tj.end());

  ph.Qdiag = Vec::Ones(n);
  ph.Qdiag.head(m.np) *= 1.0e5;
  ph.Qdiag.tail(m.nq) *= 1.0e-5;

  // G carries the supply map, P the demand map: G - P = B, (G + P)^T = C
  for (int c = 0; c < m.Bqs.outerSize(); ++c)
    for (SpMat::InnerIterator it(m.Bqs, c); it; ++it)
      tg.emplace_back(m.np + static_cast<int>(it.row()), c, it.value());
  ph.G.resize(n, m.port_dim());
  ph.G.setFromTriplets(tg.begin(), tg.end());
  for (int c = 0; c < m.Cdp.outerSize(); ++c)
    for (SpMat::InnerIterator it(m.Cdp, c); it; ++it)
      tp.emplace_back(c, m.ns + static_cast<int>(it.row()), it.value());
  ph.P.resize(n, m.port_dim());
  ph.P.setFromTriplets(tp.begin(), tp.end());

  auto model = std::make_shared<const DiscreteModel>(m);
  ph.R_qdiag = [model](const Vec& p, const Vec& q, const Params& t, const GasState& g) {
    const double dh = d0_hat(t, g);
    Vec ps = model->Pstar * p;
    Vec r = Vec::Zero(model->nq);
    for (int j = 0; j < model->nq; ++j) {
      if (model->Df(j) != 0) {
        double dp = dh * ps(j);
        if (dp <= 0) fail("gasmodel: inadmissible state in R (nonpositive pressure)");
        r(j) += model->Eq(j) * model->Df(j) * std::abs(q(j)) / dp;
      }
      if (model->Dg(j) != 0) {
        if (q(j) == 0) fail("gasmodel: R gravity summand undefined at q = 0");
        r(j) += model->Dg(j) * dh * ps(j) / q(j);
      }
      if (model->is_compressor[static_cast<std::size_t>(j)]) {
        if (q(j) == 0) fail("gasmodel: R compressor summand undefined at q = 0");
        r(j) += -model->Fq(j) / q(j);
      }
    }
    return r;
  };
  return ph;
}

DiscreteModel dual_model(const DiscreteModel& m, const Vec& pbar, const Vec& qbar,
                         const Params& th, const GasState& gas) {
  if (m.disc != Discretization::OdeEnd)
    fail("gasmodel: the dual system is only defined for the endpoint discretization");
  if (m.dual) fail("gasmodel: dual of a dual model is the primal, rebuild it instead");

  DiscreteModel d = m;
  d.dual = true;
  d.Apq = SpMat(m.Aqp.transpose());
  d.Aqp = SpMat(m.Apq.transpose());
  d.Bpd = SpMat(m.Cdp.transpose());
  d.Bqs = SpMat(m.Csq.transpose());
  d.Csq = SpMat(m.Bqs.transpose());
  d.Cdp = SpMat(m.Bpd.transpose());

  // base input of the dual is the primal steady output; pick the constant
  // load so the primal steady state is stationary for the dual as well
  Vec ybar_s = m.Csq * qbar;
  Vec ybar_d = m.Cdp * pbar;
  Vec fq = eval_fq(m, pbar, qbar, Vec::Zero(m.ns), th, gas);
  d.Fp = -(d.Apq * qbar + d.Bpd * ybar_d);
  d.Fq = -(d.Aqp * pbar + d.Bqs * ybar_s + fq);

  Fnv64 f;
  f.add(m.hash);
  f.add("dual");
  d.hash = f.value();
  return d;
}

LumpedSystem lumped(const DiscreteModel& m, const Params& th, const GasState& gas) {
  LumpedSystem s;
  s.np = m.np;
  s.nq = m.nq;
  const int n = m.state_dim();
  const double d0h = d0_hat(th, gas);

  std::vector<Eigen::Triplet<double>> te, ta, tb, tc;
  for (int c = 0; c < m.Ep0.outerSize(); ++c)
    for (SpMat::InnerIterator it(m.Ep0, c); it; ++it)
      te.emplace_back(static_cast<int>(it.row()), c, d0h * it.value());
  for (int j = 0; j < m.nq; ++j) te.emplace_back(m.np + j, m.np + j, m.Eq(j));
  s.E.resize(n, n);
  s.E.setFromTriplets(te.begin(), te.end());

  auto add_block = [](std::vector<Eigen::Triplet<double>>& t, const SpMat& blk, int r0, int c0) {
    for (int c = 0; c < blk.outerSize(); ++c)
      for (SpMat::InnerIterator it(blk, c); it; ++it)
        t.emplace_back(r0 + static_cast<int>(it.row()), c0 + c, it.value());
  };
  add_block(ta, m.Apq, 0, m.np);
  add_block(ta, m.Aqp, m.np, 0);
  s.A.resize(n, n);
  s.A.setFromTriplets(ta.begin(), ta.end());

  add_block(tb, m.Bpd, 0, m.ns);
  add_block(tb, m.Bqs, m.np, 0);
  s.B.resize(n, m.port_dim());
  s.B.setFromTriplets(tb.begin(), tb.end());

  add_block(tc, m.Csq, 0, m.np);
  add_block(tc, m.Cdp, m.ns, 0);
  s.C.resize(m.port_dim(), n);
  s.C.setFromTriplets(tc.begin(), tc.end());

  s.F.resize(n);
  s.F << m.Fp, m.Fq;
  s.y_offset = Vec::Zero(m.port_dim());

  // the closure owns a copy so the lumped view outlives its source model
  auto model = std::make_shared<const DiscreteModel>(m);
  Params theta = th;
  GasState g = gas;
  s.f = [model, theta, g](const Vec& x, const Vec& u) {
    Vec out = Vec::Zero(x.size());
    out.tail(model->nq) =
        eval_fq(*model, x.head(model->np), x.tail(model->nq), u.head(model->ns), theta, g);
    return out;
  };
  return s;
}

}  // namespace gasmor
