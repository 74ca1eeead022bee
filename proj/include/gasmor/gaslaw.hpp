#pragma once

#include <string>

#include "gasmor/util.hpp"

namespace gasmor {

// Darcy-Weisbach friction factor formulas. Sources:
//   nikuradse    lambda = (2*log10(d/k) + 1.138)^-2
//   schifrinson  lambda = 0.11*(k/d)^0.25
//   altshul      lambda = 0.11*(k/d + 68/Re)^0.25
//   hofer        lambda = (-2*log10((4.518/Re)*log10(Re/7) + k/(3.71*d)))^-2
//   pmt1025      lambda = 0.067*(158/Re + 2*k/d)^0.2
//   igt          lambda = 0.188*Re^-0.2
enum class FrictionModel { Hofer, Nikuradse, Altshul, Schifrinson, Pmt1025, Igt };

FrictionModel friction_model_from(const std::string& name);
const char* to_string(FrictionModel m);

/// d: pipe diameter [m], k: roughness [m], re: mean Reynolds number.
double friction_factor(FrictionModel m, double d, double k, double re);

// Compressibility factor formulas (reduced pressure p_r = p/p_c, reduced
// temperature T_r = T/T_c):
//   ideal     z = 1
//   dvgw2000  z = 1/(1 + p_r*(0.533/T_r - 0.257))
//   aga88     z = 1 + 0.257*p_r - 0.533*p_r/T_r
//   papay     z = 1 - 3.52*p_r*exp(-2.26*T_r) + 0.274*p_r^2*exp(-1.878*T_r)
enum class CompressibilityModel { Ideal, Dvgw2000, Aga88, Papay };

CompressibilityModel compressibility_model_from(const std::string& name);
const char* to_string(CompressibilityModel m);

struct CriticalPoint {
  double p_c = 46.4e5;  // [Pa]
  double t_c = 192.0;   // [K]
};

/// p [Pa], t [K]; throws when a formula extrapolates to z <= 0.
double compressibility(CompressibilityModel m, double p, double t,
                       const CriticalPoint& crit = {});

}  // namespace gasmor
