#pragma once

#include <map>
#include <string>

namespace gasmor {

/// Global configuration (ini key=value with optional [section] headers).
/// Scenario files carry boundary values; everything else lives here.
struct GlobalConfig {
  // [model]
  std::string model = "ode_end";
  std::string friction = "schifrinson";
  std::string compressibility = "aga88";
  double v_max = 20.0;   // [m/s]
  double eps = 0.01;     // CFL safety margin
  double eta = 1.0e-5;   // dynamic viscosity [Pa s]
  double pc = 46.4e5;    // pseudo-critical pressure [Pa]
  double tc = 192.0;     // pseudo-critical temperature [K]

  // [parameters] training/test ranges for theta = (T0, RS)
  double t0_min = 273.15, t0_max = 288.15;  // [K]
  double rs_min = 500.0, rs_max = 600.0;    // [J/(kg K)]

  // [solver]
  std::string solver = "imex1";
  double dt = 60.0;     // [s]
  double gamma = 1.0;
  double lambda = 0.5;

  // [training]
  double train_horizon = 3600.0;  // [s]
  std::string train_shape = "step";
  double input_rel = 0.01, input_abs = 0.0;
  double state_rel = 0.01, state_abs = 0.0;

  // [bench]
  int test_samples = 5;
  int order_max = 150;
  int order_step = 2;

  // [run]
  std::uint64_t seed = 1;
  int workers = 0;  // 0: hardware concurrency
  std::string cache_dir;

  /// Parse ini text over the defaults; unknown keys are rejected.
  static GlobalConfig from_ini(const std::string& text);
  static GlobalConfig from_file(const std::string& path);

  /// All resolved values for run manifests.
  std::map<std::string, std::string> as_map() const;
};

}  // namespace gasmor
