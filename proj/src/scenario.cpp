#include "gasmor/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace gasmor {

namespace {

Mat parse_rows(const std::string& value, const std::string& key) {
  auto rows = split_any(value, ";");
  if (rows.empty()) fail("scenario: key '" + key + "' has no values");
  std::vector<std::vector<double>> parsed;
  std::size_t width = 0;
  for (const auto& row : rows) {
    auto toks = split_any(row, ", \t");
    std::vector<double> vals;
    vals.reserve(toks.size());
    for (const auto& t : toks) vals.push_back(parse_double(t, "scenario key '" + key + "'"));
    if (width == 0) width = vals.size();
    if (vals.size() != width)
      fail("scenario: ragged rows in key '" + key + "'");
    parsed.push_back(std::move(vals));
  }
  Mat m(static_cast<Eigen::Index>(parsed.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < parsed.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parsed[i][j];
  return m;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    auto line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("scenario: line without '=': '" + line + "'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) fail("scenario: empty key");
    kv[key] = value;
  }

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) fail("scenario: missing key '" + key + "'");
    return it->second;
  };

  Scenario s;
  s.T0 = parse_double(require("T0"), "scenario key 'T0'");
  s.RS = parse_double(require("RS"), "scenario key 'RS'");
  s.tH = parse_double(require("tH"), "scenario key 'tH'");
  if (s.tH <= 0) fail("scenario: tH must be positive");

  for (const auto& tok : split_any(require("ut"), ", \t"))
    s.ut.push_back(parse_double(tok, "scenario key 'ut'"));
  if (s.ut.empty() || s.ut.front() != 0.0) fail("scenario: ut must start at 0");
  if (!std::is_sorted(s.ut.begin(), s.ut.end())) fail("scenario: ut must be ascending");

  s.up = parse_rows(require("up"), "up");
  s.uq = parse_rows(require("uq"), "uq");
  auto nt = static_cast<Eigen::Index>(s.ut.size());
  if (s.up.rows() != nt || s.uq.rows() != nt)
    fail("scenario: up/uq need one row per ut breakpoint");

  if (kv.count("cp"))
    for (const auto& tok : split_any(kv["cp"], ", \t"))
      s.cp.push_back(parse_double(tok, "scenario key 'cp'"));
  if (kv.count("vs")) {
    s.vs = split_any(kv["vs"], ", \t");
    for (const auto& v : s.vs)
      if (v != "open" && v != "1")
        fail("scenario: valve setting '" + v + "' unsupported (only 'open'; switching is not modeled)");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("scenario: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::pair<Vec, Vec> input_at(const Scenario& scn, double t) {
  if (t < 0 || t > scn.tH)
    fail("scenario: time " + std::to_string(t) + " outside horizon [0, " +
         std::to_string(scn.tH) + "]");
  auto it = std::upper_bound(scn.ut.begin(), scn.ut.end(), t);
  auto idx = static_cast<Eigen::Index>(std::distance(scn.ut.begin(), it)) - 1;
  return {scn.up.row(idx).transpose(), scn.uq.row(idx).transpose()};
}

Vec input_stacked(const Scenario& scn, double t) {
  auto [s, d] = input_at(scn, t);
  Vec u(s.size() + d.size());
  u << s, d;
  return u;
}

}  // namespace gasmor
