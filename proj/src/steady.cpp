#include "gasmor/steady.hpp"

#include <Eigen/SparseQR>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gasmor/solvers.hpp"

namespace gasmor {

namespace {

using QR = Eigen::SparseQR<SpMat, Eigen::COLAMDOrdering<int>>;

/// Least-squares and least-norm solves backed by one QR factorization of a
/// tall matrix M; reused across the pressure-correction iterations.
class TallQR {
 public:
  explicit TallQR(const SpMat& m) : rows_(m.rows()), cols_(m.cols()) {
    SpMat mc = m;
    mc.makeCompressed();
    qr_.compute(mc);
    if (qr_.info() != Eigen::Success) fail("steady: QR factorization failed");
    if (qr_.rank() < cols_)
      fail("steady: rank-deficient system (rank " + std::to_string(qr_.rank()) + " < " +
           std::to_string(cols_) + ")");
    // matrixR() keeps unsorted inner indices; densify once (desk scale)
    rt_ = Mat(qr_.matrixR()).topLeftCorner(cols_, cols_).transpose();
  }

  // min ||M x - b||
  Vec least_squares(const Vec& b) const { return qr_.solve(b); }

  // min ||x|| s.t. M^T x = c, via M P = Q R:  R^T w = P^T c, x = Q [w; 0]
  Vec least_norm(const Vec& c) const {
    Vec pc = qr_.colsPermutation().transpose() * c;
    Vec w = rt_.triangularView<Eigen::Lower>().solve(pc);
    Vec ext = Vec::Zero(rows_);
    ext.head(cols_) = w;
    return qr_.matrixQ() * ext;
  }

 private:
  QR qr_;
  Mat rt_;
  Eigen::Index rows_, cols_;
};

}  // namespace

Vec steady_flux(const DiscreteModel& model, const Vec& dbar_q) {
  if (dbar_q.size() != model.nd) fail("steady: demand vector dimension mismatch");
  TallQR qr(SpMat(model.Apq.transpose()));
  return qr.least_norm(-(model.Bpd * dbar_q));
}

double steady_residual(const DiscreteModel& model, const Vec& p, const Vec& q, const Vec& sbar_p,
                       const Vec& dbar_q, const Params& th, const GasState& gas) {
  auto [rp, rq] = eval_rhs(model, p, q, sbar_p, dbar_q, th, gas);
  double rhs = std::sqrt(rp.squaredNorm() + rq.squaredNorm());
  double x = std::sqrt(p.squaredNorm() + q.squaredNorm());
  return rhs / (1.0 + x);
}

SteadyState steady_state(const DiscreteModel& model, const Vec& sbar_p, const Vec& dbar_q,
                         const Params& th, const GasState& gas, const SteadyOptions& opts) {
  if (sbar_p.size() != model.ns) fail("steady: supply vector dimension mismatch");
  if (dbar_q.size() != model.nd) fail("steady: demand vector dimension mismatch");

  SteadyState st;

  // step 1a: linear mass-flux steady state (least-norm)
  st.qbar = steady_flux(model, dbar_q);

  // step 1b: linear pressure steady state; the factorization is recycled for
  // every correction of step 2
  TallQR qr(SpMat((-model.Aqp).eval()));
  Vec base = model.Bqs * sbar_p + model.Fq;
  Vec p = qr.least_squares(base);

  double res = steady_residual(model, p, st.qbar, sbar_p, dbar_q, th, gas);
  st.iterations = 0;

  // step 2: corrected pressure steady state, repeated until the threshold
  for (int it = 0; it < opts.max_corrections && res > opts.tol; ++it) {
    Vec fq = eval_fq(model, p, st.qbar, sbar_p, th, gas);
    Vec pn = qr.least_squares(base + fq);
    Vec ps = model.Pstar * pn;
    if (model.PstarS.nonZeros() > 0) ps += model.PstarS * sbar_p;
    for (int j = 0; j < model.nq; ++j)
      if ((model.Df(j) != 0 || model.Dg(j) != 0) && ps(j) <= 0)
        fail("steady: negative pressure during correction at edge " + std::to_string(j));
    p = pn;
    ++st.iterations;
    res = steady_residual(model, p, st.qbar, sbar_p, dbar_q, th, gas);
  }

  // cyclic or compressor networks: march with imex1 until steady
  if (res > opts.tol && opts.max_march_steps >= 0) {
    st.marched = true;
    const double h = opts.march_h;
    long budget = opts.max_march_steps > 0 ? opts.max_march_steps
                                           : static_cast<long>(2.0 * 86400.0 / h);
    LumpedSystem sys = lumped(model, th, gas);
    Vec u(model.port_dim());
    u << sbar_p, dbar_q;
    Vec x(model.state_dim());
    x << p, st.qbar;
    Imex1Stepper step(sys, h, opts.gamma);
    for (long k = 0; k < budget; ++k) {
      Vec xn = step.advance(x, u);
      if (!xn.allFinite()) fail("steady: marching blew up at step " + std::to_string(k));
      double rate = (xn - x).norm() / (h * (1.0 + xn.norm()));
      x = xn;
      if (rate <= opts.tol) break;
    }
    p = x.head(model.np);
    st.qbar = x.tail(model.nq);
    res = steady_residual(model, p, st.qbar, sbar_p, dbar_q, th, gas);
  }

  st.pbar = p;
  st.residual = res;
  st.converged = res <= std::max(opts.tol, 1e-7);  // marched equilibria carry quadrature-level residue
  if (!st.pbar.allFinite() || !st.qbar.allFinite()) fail("steady: non-finite steady state");
  return st;
}

std::string steady_cache_key(const DiscreteModel& model, const Vec& sbar_p, const Vec& dbar_q,
                             const Params& th) {
  Fnv64 f;
  f.add(model.hash);
  f.add(model.dual ? "dual" : "primal");
  f.add(th.T0);
  f.add(th.RS);
  for (Eigen::Index i = 0; i < sbar_p.size(); ++i) f.add(sbar_p(i));
  for (Eigen::Index i = 0; i < dbar_q.size(); ++i) f.add(dbar_q(i));
  return hex64(f.value());
}

bool steady_cache_load(const std::string& dir, const std::string& key, SteadyState& out) {
  if (dir.empty()) return false;
  std::ifstream in(dir + "/steady_" + key + ".bin", std::ios::binary);
  if (!in) return false;
  std::int64_t np = 0, nq = 0;
  in.read(reinterpret_cast<char*>(&np), sizeof np);
  in.read(reinterpret_cast<char*>(&nq), sizeof nq);
  if (!in || np < 0 || nq < 0) return false;
  out.pbar.resize(np);
  out.qbar.resize(nq);
  in.read(reinterpret_cast<char*>(out.pbar.data()), np * static_cast<long>(sizeof(double)));
  in.read(reinterpret_cast<char*>(out.qbar.data()), nq * static_cast<long>(sizeof(double)));
  in.read(reinterpret_cast<char*>(&out.residual), sizeof out.residual);
  out.converged = true;
  return static_cast<bool>(in);
}

void steady_cache_store(const std::string& dir, const std::string& key, const SteadyState& s) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/steady_" + key + ".bin", std::ios::binary);
  std::int64_t np = s.pbar.size(), nq = s.qbar.size();
  out.write(reinterpret_cast<const char*>(&np), sizeof np);
  out.write(reinterpret_cast<const char*>(&nq), sizeof nq);
  out.write(reinterpret_cast<const char*>(s.pbar.data()), np * static_cast<long>(sizeof(double)));
  out.write(reinterpret_cast<const char*>(s.qbar.data()), nq * static_cast<long>(sizeof(double)));
  out.write(reinterpret_cast<const char*>(&s.residual), sizeof s.residual);
}

}  // namespace gasmor
