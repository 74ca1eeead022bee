#include "gasmor/config.hpp"

#include <fstream>
#include <sstream>

#include "gasmor/util.hpp"

namespace gasmor {

GlobalConfig GlobalConfig::from_ini(const std::string& text) {
  GlobalConfig c;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    auto line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("config: line without '=': '" + line + "'");
    auto key = trim(line.substr(0, eq));
    auto val = trim(line.substr(eq + 1));
    auto num = [&] { return parse_double(val, "config key '" + key + "'"); };
    if (key == "model") c.model = val;
    else if (key == "friction") c.friction = val;
    else if (key == "compressibility") c.compressibility = val;
    else if (key == "v_max" || key == "vmax") c.v_max = num();
    else if (key == "eps") c.eps = num();
    else if (key == "eta") c.eta = num();
    else if (key == "pc_bar") c.pc = num() * 1e5;
    else if (key == "tc") c.tc = num();
    else if (key == "T0_min") c.t0_min = num();
    else if (key == "T0_max") c.t0_max = num();
    else if (key == "RS_min") c.rs_min = num();
    else if (key == "RS_max") c.rs_max = num();
    else if (key == "solver") c.solver = val;
    else if (key == "dt") c.dt = num();
    else if (key == "gamma") c.gamma = num();
    else if (key == "lambda") c.lambda = num();
    else if (key == "train_horizon") c.train_horizon = num();
    else if (key == "train_shape") c.train_shape = val;
    else if (key == "input_rel") c.input_rel = num();
    else if (key == "input_abs") c.input_abs = num();
    else if (key == "state_rel") c.state_rel = num();
    else if (key == "state_abs") c.state_abs = num();
    else if (key == "test_samples") c.test_samples = static_cast<int>(num());
    else if (key == "order_max") c.order_max = static_cast<int>(num());
    else if (key == "order_step") c.order_step = static_cast<int>(num());
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(num());
    else if (key == "workers") c.workers = static_cast<int>(num());
    else if (key == "cache_dir") c.cache_dir = val;
    else fail("config: unknown key '" + key + "'");
  }
  if (c.t0_min >= c.t0_max || c.rs_min >= c.rs_max)
    fail("config: parameter ranges must be non-degenerate");
  return c;
}

GlobalConfig GlobalConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_ini(buf.str());
}

std::map<std::string, std::string> GlobalConfig::as_map() const {
  auto d = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
  };
  return {
      {"model", model},
      {"friction", friction},
      {"compressibility", compressibility},
      {"v_max", d(v_max)},
      {"eps", d(eps)},
      {"eta", d(eta)},
      {"pc_bar", d(pc / 1e5)},
      {"tc", d(tc)},
      {"T0_min", d(t0_min)},
      {"T0_max", d(t0_max)},
      {"RS_min", d(rs_min)},
      {"RS_max", d(rs_max)},
      {"solver", solver},
      {"dt", d(dt)},
      {"gamma", d(gamma)},
      {"lambda", d(lambda)},
      {"train_horizon", d(train_horizon)},
      {"train_shape", train_shape},
      {"input_rel", d(input_rel)},
      {"input_abs", d(input_abs)},
      {"state_rel", d(state_rel)},
      {"state_abs", d(state_abs)},
      {"test_samples", std::to_string(test_samples)},
      {"order_max", std::to_string(order_max)},
      {"order_step", std::to_string(order_step)},
      {"seed", std::to_string(seed)},
      {"workers", std::to_string(workers)},
      {"cache_dir", cache_dir},
  };
}

}  // namespace gasmor
