#include "gasmor/gaslaw.hpp"

#include <cmath>

namespace gasmor {

FrictionModel friction_model_from(const std::string& name) {
  if (name == "hofer") return FrictionModel::Hofer;
  if (name == "nikuradse") return FrictionModel::Nikuradse;
  if (name == "altshul") return FrictionModel::Altshul;
  if (name == "schifrinson") return FrictionModel::Schifrinson;
  if (name == "pmt1025") return FrictionModel::Pmt1025;
  if (name == "igt") return FrictionModel::Igt;
  fail("gaslaw: unknown friction model '" + name + "'");
}

const char* to_string(FrictionModel m) {
  switch (m) {
    case FrictionModel::Hofer: return "hofer";
    case FrictionModel::Nikuradse: return "nikuradse";
    case FrictionModel::Altshul: return "altshul";
    case FrictionModel::Schifrinson: return "schifrinson";
    case FrictionModel::Pmt1025: return "pmt1025";
    case FrictionModel::Igt: return "igt";
  }
  return "?";
}

double friction_factor(FrictionModel m, double d, double k, double re) {
  if (d <= 0) fail("gaslaw: friction_factor needs d > 0");
  if (k < 0) fail("gaslaw: friction_factor needs k >= 0");
  if (re <= 0) fail("gaslaw: friction_factor needs Re > 0");
  double lam = 0;
  switch (m) {
    case FrictionModel::Nikuradse: {
      if (k == 0) fail("gaslaw: nikuradse needs k > 0");
      double t = 2.0 * std::log10(d / k) + 1.138;
      lam = 1.0 / (t * t);
      break;
    }
    case FrictionModel::Schifrinson: {
      if (k == 0) fail("gaslaw: schifrinson needs k > 0");
      lam = 0.11 * std::pow(k / d, 0.25);
      break;
    }
    case FrictionModel::Altshul:
      if (k == 0 && !std::isfinite(re)) fail("gaslaw: altshul degenerate (k = 0, Re = inf)");
      lam = 0.11 * std::pow(k / d + 68.0 / re, 0.25);
      break;
    case FrictionModel::Hofer: {
      double arg = (4.518 / re) * std::log10(re / 7.0) + k / (3.71 * d);
      if (arg <= 0) fail("gaslaw: hofer argument out of range");
      double t = -2.0 * std::log10(arg);
      lam = 1.0 / (t * t);
      break;
    }
    case FrictionModel::Pmt1025:
      if (k == 0 && !std::isfinite(re)) fail("gaslaw: pmt1025 degenerate (k = 0, Re = inf)");
      lam = 0.067 * std::pow(158.0 / re + 2.0 * k / d, 0.2);
      break;
    case FrictionModel::Igt:
      if (!std::isfinite(re)) fail("gaslaw: igt needs finite Re");
      lam = 0.188 * std::pow(re, -0.2);
      break;
  }
  if (!(lam > 0) || !std::isfinite(lam)) fail("gaslaw: friction factor not positive");
  return lam;
}

CompressibilityModel compressibility_model_from(const std::string& name) {
  if (name == "ideal") return CompressibilityModel::Ideal;
  if (name == "dvgw2000") return CompressibilityModel::Dvgw2000;
  if (name == "aga88") return CompressibilityModel::Aga88;
  if (name == "papay") return CompressibilityModel::Papay;
  fail("gaslaw: unknown compressibility model '" + name + "'");
}

const char* to_string(CompressibilityModel m) {
  switch (m) {
    case CompressibilityModel::Ideal: return "ideal";
    case CompressibilityModel::Dvgw2000: return "dvgw2000";
    case CompressibilityModel::Aga88: return "aga88";
    case CompressibilityModel::Papay: return "papay";
  }
  return "?";
}

double compressibility(CompressibilityModel m, double p, double t, const CriticalPoint& crit) {
  if (p < 0) fail("gaslaw: compressibility needs p >= 0");
  if (t <= 0) fail("gaslaw: compressibility needs T > 0");
  double pr = p / crit.p_c;
  double tr = t / crit.t_c;
  double z = 1.0;
  switch (m) {
    case CompressibilityModel::Ideal:
      z = 1.0;
      break;
    case CompressibilityModel::Dvgw2000:
      z = 1.0 / (1.0 + pr * (0.533 / tr - 0.257));
      break;
    case CompressibilityModel::Aga88:
      z = 1.0 + 0.257 * pr - 0.533 * pr / tr;
      break;
    case CompressibilityModel::Papay:
      z = 1.0 - 3.52 * pr * std::exp(-2.26 * tr) + 0.274 * pr * pr * std::exp(-1.878 * tr);
      break;
  }
  if (!(z > 0) || !std::isfinite(z))
    fail("gaslaw: " + std::string(to_string(m)) + " out of validity (z <= 0 at p = " +
         std::to_string(p) + " Pa, T = " + std::to_string(t) + " K)");
  return z;
}

}  // namespace gasmor
