#pragma once

#include <string>

#include "gasmor/model.hpp"

namespace gasmor {

struct SteadyState {
  Vec pbar;  // [bar]
  Vec qbar;  // [kg/s]
  double residual = 0;  // scaled steady RHS norm
  int iterations = 0;
  bool marched = false;
  bool converged = false;
};

struct SteadyOptions {
  double tol = 1e-9;          // scaled residual target
  int max_corrections = 10;
  long max_march_steps = 0;   // 0: two days worth of march_h steps; < 0: disabled
  double march_h = 60.0;      // [s]
  double gamma = 1.0;
};

/// Two-step algebraic steady-state approximation with fixed-point pressure
/// correction; falls back to first-order IMEX time marching for cyclic or
/// compressor networks where the correction stalls.
SteadyState steady_state(const DiscreteModel& model, const Vec& sbar_p, const Vec& dbar_q,
                         const Params& th, const GasState& gas, const SteadyOptions& opts = {});

/// Flux part alone (step 1a): least-norm solve of Apq qbar = -Bpd dbar_q.
/// Needs no friction data, so it seeds the Reynolds estimate for assembly.
Vec steady_flux(const DiscreteModel& model, const Vec& dbar_q);

/// Scaled residual norm used for the convergence decision.
double steady_residual(const DiscreteModel& model, const Vec& p, const Vec& q, const Vec& sbar_p,
                       const Vec& dbar_q, const Params& th, const GasState& gas);

// On-disk steady-state cache (optional; disabled when dir is empty).
std::string steady_cache_key(const DiscreteModel& model, const Vec& sbar_p, const Vec& dbar_q,
                             const Params& th);
bool steady_cache_load(const std::string& dir, const std::string& key, SteadyState& out);
void steady_cache_store(const std::string& dir, const std::string& key, const SteadyState& s);

}  // namespace gasmor
