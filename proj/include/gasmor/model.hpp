#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <vector>

#include "gasmor/gaslaw.hpp"
#include "gasmor/network.hpp"

namespace gasmor {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Global scalar parameters: mean gas temperature and specific gas constant.
struct Params {
  double T0 = 283.15;  // [K]
  double RS = 530.0;   // [J/(kg K)]
};

/// Frozen gas state derived from a steady pressure level.
struct GasState {
  double z0 = 1.0;   // mean compressibility factor
  double d0 = 0.0;   // 1/(T0*RS*z0) [s^2/m^2]
  double p0 = 0.0;   // mean steady pressure [Pa]
};

enum class Discretization { OdeMid, OdeEnd };

Discretization discretization_from(const std::string& name);
const char* to_string(Discretization d);

struct ModelConfig {
  Discretization disc = Discretization::OdeEnd;
  FrictionModel friction = FrictionModel::Schifrinson;
  CompressibilityModel compressibility = CompressibilityModel::Aga88;
  CriticalPoint crit;
  double eta = 1.0e-5;        // dynamic viscosity [Pa s] for Reynolds estimates
  double re_fallback = 1e6;   // mean Reynolds number when no flux estimate exists
  std::vector<double> compressor_pressures;  // discharge targets [bar], in edge order
};

/// Semi-discrete input-output model on the refined network.
///
/// State is (p, q) with pressures in [bar] at non-supply nodes and mass-flux
/// in [kg/s] on refined edges; inputs are (s_p [bar], d_q [kg/s]), outputs
/// (s_q [kg/s], d_p [bar]). The scale homogenization (Pa -> bar) is baked
/// into the assembled operators, which makes the linear part of the endpoint
/// model exactly skew-symmetric against the block-diagonal SPD mass matrix.
///
///   Ep(theta) pdot = Apq q + Bpd d_q + Fp
///   Eq qdot     = Aqp p + Bqs s_p + Fq + f_q(p, q, s_p, theta)
///   (s_q, d_p)  = (Csq q, Cdp p)
///
/// f_q = -(Dg*d0h*pstar + Eq*Df*|q|q/(d0h*pstar)) elementwise, with
/// d0h(theta) = 1e5/(T0*RS*z0) and pstar the per-edge pressure
/// reconstruction of the chosen discretization.
struct DiscreteModel {
  Discretization disc = Discretization::OdeEnd;
  int np = 0, nq = 0, ns = 0, nd = 0;

  SpMat Ep0;        // Ep(theta) = d0h(theta) * Ep0, SPD
  Vec Eq;           // diagonal, positive (1 on compressor rows)
  SpMat Apq, Aqp;   // linear coupling blocks
  SpMat Bpd, Bqs;   // input maps
  SpMat Csq, Cdp;   // output maps
  Vec Fp, Fq;       // constant loads (compressor targets live in Fq)

  // per-edge coefficient tables (friction scaling folded into Df)
  Vec Df;           // lambda_k/(2 d_k S_k) * friction_scale_k
  Vec Dg;           // 1e-5 * g * (h_to - h_from)
  Vec lambda;       // friction factors used (0 for frictionless kinds)
  SpMat Pstar;      // pressure reconstruction, state part
  SpMat PstarS;     // pressure reconstruction, supply-input part
  std::vector<char> is_compressor;  // per edge row

  bool dual = false;
  std::uint64_t hash = 0;

  int state_dim() const { return np + nq; }
  int port_dim() const { return ns + nd; }
};

/// Scaled inverse gas state folded into the assembled operators.
inline double d0_hat(const Params& th, const GasState& gas) {
  return 1.0e5 / (th.T0 * th.RS * gas.z0);
}

/// z0 from the mean of a steady pressure vector (bar); d0 in SI units.
GasState gas_state(const Vec& pbar_bar, const Params& th, CompressibilityModel variant,
                   const CriticalPoint& crit = {});

/// Assemble the model for either discretization. `qbar_hint` (kg/s per
/// refined edge) feeds the per-pipe mean Reynolds estimate; when empty the
/// configured fallback is used. The endpoint discretization additionally
/// checks the index-1 topology conditions.
DiscreteModel assemble(const TopologyMatrices& topo, const RefinementResult& refinement,
                       const ModelConfig& config, const Vec& qbar_hint = Vec());

/// Replace the flux equation of a compressor edge with the discharge
/// pressure drive qdot = p_c - p_discharge (rows of Aqp lose the upstream
/// coupling, Fq gains the target). Used by assemble; exposed for tests.
void compressor_inject(DiscreteModel& model, const TopologyMatrices& topo, int edge,
                       double p_target_bar);

/// Nonlinear retarding term (gravity + friction), length nq.
Vec eval_fq(const DiscreteModel& m, const Vec& p, const Vec& q, const Vec& sp,
            const Params& th, const GasState& gas);

/// Full right-hand side (rp, rq) of the semi-discrete system.
std::pair<Vec, Vec> eval_rhs(const DiscreteModel& m, const Vec& p, const Vec& q, const Vec& sp,
                             const Vec& dq, const Params& th, const GasState& gas);

/// Jacobian blocks of f_q: d f/d p (sparse nq x np) and d f/d q (diagonal).
std::pair<SpMat, Vec> eval_fq_jacobian(const DiscreteModel& m, const Vec& p, const Vec& q,
                                       const Vec& sp, const Params& th, const GasState& gas);

/// Port-Hamiltonian members of the endpoint model:
///   E xdot = (J - R(x)) x + (G - P) u,   y = (G + P)^T x,
/// with E SPD, J exactly skew-symmetric and R(x) a nonnegative diagonal
/// q-block for admissible states. Qdiag is the Pa/bar scale homogenization
/// weight; it is baked into the state units, so the reconstruction identity
/// holds without applying it. Compressor drives fold into R as -Fq/q and
/// perturb the exact identity on compressor rows.
struct PortHamiltonianParts {
  SpMat E;
  SpMat J;
  Vec Qdiag;
  SpMat G, P;
  std::function<Vec(const Vec& p, const Vec& q, const Params&, const GasState&)> R_qdiag;
};

PortHamiltonianParts ph_parts(const DiscreteModel& m, const Params& th, const GasState& gas);

/// Dual (adjoint) system of the endpoint model, packaged as a DiscreteModel
/// so every solver runs it: E zdot = A^T z + C^T u, y = B^T z, with the same
/// nonlinearity. The constant load is chosen so that the primal steady state
/// (pbar, qbar) is stationary under the base input ybar = C xbar.
DiscreteModel dual_model(const DiscreteModel& m, const Vec& pbar, const Vec& qbar,
                         const Params& th, const GasState& gas);

/// Lumped view E xdot = A x + B u + F + f(x,u), y = C x + y_offset used by
/// the time steppers; built per parameter sample.
struct LumpedSystem {
  SpMat E, A, B, C;
  Vec F;
  Vec y_offset;  // zero for full-order models
  std::function<Vec(const Vec& x, const Vec& u)> f;
  int np = 0, nq = 0;
  int dim() const { return np + nq; }
};

LumpedSystem lumped(const DiscreteModel& m, const Params& th, const GasState& gas);

}  // namespace gasmor
