#pragma once

#include <string>
#include <vector>

#include "gasmor/model.hpp"

namespace gasmor {

/// Boundary-value scenario: piecewise-constant supply pressures and demand
/// mass-fluxes over a time horizon, plus the parameter values and non-pipe
/// element settings. Parsed from key=value .ini text.
struct Scenario {
  double T0 = 283.15;  // [K]
  double RS = 530.0;   // [J/(kg K)]
  double tH = 0;       // [s]
  std::vector<double> ut;        // ascending breakpoints, ut[0] == 0
  Mat up;                        // |ut| x N_s supply pressures [bar]
  Mat uq;                        // |ut| x N_d demand fluxes [kg/s]
  std::vector<double> cp;        // compressor discharge pressures [bar]
  std::vector<std::string> vs;   // valve settings, only "open" supported

  Params params() const { return Params{T0, RS}; }
  int supply_count() const { return static_cast<int>(up.cols()); }
  int demand_count() const { return static_cast<int>(uq.cols()); }
};

/// Keys: T0, RS, tH, ut, up, uq, cp, vs. Lists are space- or comma-
/// separated; up/uq rows (one per breakpoint) are separated by ';'. Key
/// order does not matter; '#' and ';' at line start begin comments.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario(const std::string& path);

/// Left-continuous step interpolation: values of the most recent breakpoint
/// <= t. Throws outside [0, tH].
std::pair<Vec, Vec> input_at(const Scenario& scn, double t);

/// Stacked (s_p, d_q) input vector.
Vec input_stacked(const Scenario& scn, double t);

}  // namespace gasmor
