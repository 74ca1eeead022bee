#include "gasmor/network.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace gasmor {

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Pipe: return "pipe";
    case EdgeKind::Shortcut: return "shortcut";
    case EdgeKind::Compressor: return "compressor";
    case EdgeKind::Valve: return "valve";
  }
  return "?";
}

std::vector<int> Network::supply_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < node_count(); ++i)
    if (roles[static_cast<std::size_t>(i)] == NodeRole::Supply) out.push_back(i);
  return out;
}

std::vector<int> Network::demand_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < node_count(); ++i)
    if (roles[static_cast<std::size_t>(i)] == NodeRole::Demand) out.push_back(i);
  return out;
}

std::uint64_t Network::content_hash() const {
  Fnv64 f;
  for (const auto& e : edges) {
    f.add(to_string(e.kind));
    f.add(node_ids[static_cast<std::size_t>(e.from)]);
    f.add(node_ids[static_cast<std::size_t>(e.to)]);
    f.add(e.length);
    f.add(e.diameter);
    f.add(e.incline);
    f.add(e.roughness);
  }
  return f.value();
}

static EdgeKind parse_kind(const std::string& tok, int line) {
  if (tok == "pipe") return EdgeKind::Pipe;
  if (tok == "shortcut") return EdgeKind::Shortcut;
  if (tok == "compressor") return EdgeKind::Compressor;
  if (tok == "valve") return EdgeKind::Valve;
  fail("netgraph: unknown edge kind '" + tok + "' in row " + std::to_string(line));
}

Network parse_net(const std::string& text) {
  Network net;
  std::unordered_map<std::string, int> index;
  auto node_of = [&](const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    int n = net.node_count();
    index.emplace(id, n);
    net.node_ids.push_back(id);
    return n;
  };

  std::map<std::tuple<int, int, EdgeKind>, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto stripped = trim(raw);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto fields = split_any(stripped, ",");
    if (fields.size() != 7)
      fail("netgraph: malformed row " + std::to_string(line) + " (expected 7 fields, got " +
           std::to_string(fields.size()) + ")");
    Edge e;
    e.kind = parse_kind(fields[0], line);
    e.from = node_of(fields[1]);
    e.to = node_of(fields[2]);
    const std::string ctx = "netgraph row " + std::to_string(line);
    e.length = parse_double(fields[3], ctx);
    e.diameter = parse_double(fields[4], ctx);
    e.incline = parse_double(fields[5], ctx);
    e.roughness = parse_double(fields[6], ctx);
    if (e.from == e.to)
      fail("netgraph: self-loop at node '" + fields[1] + "' in row " + std::to_string(line));
    if (e.kind == EdgeKind::Pipe && (e.length <= 0 || e.diameter <= 0))
      fail("netgraph: pipe with nonpositive length or diameter in row " + std::to_string(line));
    if (e.diameter <= 0)
      fail("netgraph: nonpositive diameter in row " + std::to_string(line));
    if (e.roughness < 0)
      fail("netgraph: negative roughness in row " + std::to_string(line));
    auto key = std::make_tuple(e.from, e.to, e.kind);
    if (seen.count(key))
      fail("netgraph: duplicate " + std::string(to_string(e.kind)) + " edge '" + fields[1] +
           "' -> '" + fields[2] + "' in row " + std::to_string(line));
    seen[key] = line;
    net.edges.push_back(e);
  }
  if (net.edges.empty()) fail("netgraph: no edges");
  return classify_boundary(std::move(net));
}

Network classify_boundary(Network net) {
  const int n = net.node_count();
  std::vector<int> in_deg(static_cast<std::size_t>(n), 0), out_deg(static_cast<std::size_t>(n), 0);
  for (const auto& e : net.edges) {
    ++out_deg[static_cast<std::size_t>(e.from)];
    ++in_deg[static_cast<std::size_t>(e.to)];
  }

  // connectivity over the underlying undirected graph
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& e : net.edges) {
    adj[static_cast<std::size_t>(e.from)].push_back(e.to);
    adj[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  visited[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)])
      if (!visited[static_cast<std::size_t>(w)]) {
        visited[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  if (reached != n) fail("netgraph: graph is disconnected (" + std::to_string(n - reached) +
                         " nodes unreachable)");

  net.roles.assign(static_cast<std::size_t>(n), NodeRole::Internal);
  for (int i = 0; i < n; ++i) {
    int deg = in_deg[static_cast<std::size_t>(i)] + out_deg[static_cast<std::size_t>(i)];
    if (deg == 0) fail("netgraph: isolated node '" + net.node_ids[static_cast<std::size_t>(i)] + "'");
    if (deg != 1) continue;
    net.roles[static_cast<std::size_t>(i)] =
        out_deg[static_cast<std::size_t>(i)] == 1 ? NodeRole::Supply : NodeRole::Demand;
  }
  return net;
}

double nominal_length(double dt, double v_max, double eps) {
  if (dt <= 0 || v_max <= 0) fail("netgraph: nominal_length needs dt > 0 and v_max > 0");
  if (eps < 0 || eps >= 1) fail("netgraph: nominal_length needs eps in [0,1)");
  return (1.0 - eps) * v_max * dt;
}

RefinementResult refine(const Network& net, double dx) {
  if (dx <= 0) fail("netgraph: refine needs dx > 0");
  if (!net.classified()) fail("netgraph: refine needs a classified network");

  RefinementResult res;
  res.dx = dx;
  Network& out = res.refined;
  out.node_ids = net.node_ids;
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < out.node_count(); ++i) index.emplace(out.node_ids[static_cast<std::size_t>(i)], i);

  auto push_edge = [&](EdgeKind kind, int from, int to, double diameter, double incline,
                       double roughness, double fscale, int orig) {
    Edge e;
    e.kind = kind;
    e.from = from;
    e.to = to;
    e.length = dx;
    e.diameter = diameter;
    e.incline = incline;
    e.roughness = roughness;
    out.edges.push_back(e);
    res.friction_scale.push_back(fscale);
    res.virtual_of.push_back(orig);
  };

  for (int j = 0; j < net.edge_count(); ++j) {
    const Edge& e = net.edges[static_cast<std::size_t>(j)];
    if (e.kind != EdgeKind::Pipe) {
      // non-pipe elements become single frictionless level segments
      push_edge(e.kind, e.from, e.to, e.diameter, 0.0, e.roughness, 0.0, j);
      continue;
    }
    long full = static_cast<long>(e.length / dx);
    double rem = e.length - static_cast<double>(full) * dx;
    // guard against L being an exact multiple up to roundoff
    if (rem < 1e-9 * dx && full > 0) rem = 0;
    long segs = full + (rem > 0 ? 1 : 0);
    if (segs == 0) segs = 1;  // degenerate zero-remainder short pipe cannot occur (length > 0)

    int prev = e.from;
    for (long s = 0; s < segs; ++s) {
      bool last = (s == segs - 1);
      int next;
      if (last) {
        next = e.to;
      } else {
        std::string id = net.node_ids[static_cast<std::size_t>(e.from)] + "." +
                         net.node_ids[static_cast<std::size_t>(e.to)] + "." + std::to_string(s + 1);
        if (index.count(id)) fail("netgraph: virtual node id collision '" + id + "'");
        next = out.node_count();
        index.emplace(id, next);
        out.node_ids.push_back(id);
      }
      double sub_len = (s < full) ? dx : rem;       // original length represented
      if (full == 0) sub_len = e.length;            // single short segment
      double fscale = sub_len / dx;
      push_edge(EdgeKind::Pipe, prev, next, e.diameter, e.incline * (sub_len / e.length),
                e.roughness, fscale, j);
      prev = next;
    }
  }

  out.roles.assign(static_cast<std::size_t>(out.node_count()), NodeRole::Internal);
  for (int i = 0; i < net.node_count(); ++i)
    out.roles[static_cast<std::size_t>(i)] = net.roles[static_cast<std::size_t>(i)];
  return res;
}

TopologyMatrices incidence(const Network& net) {
  if (!net.classified()) fail("netgraph: incidence needs a classified network");
  const int n = net.node_count();
  const int m = net.edge_count();

  TopologyMatrices t;
  std::vector<Eigen::Triplet<double>> ta, tar, tal;
  ta.reserve(static_cast<std::size_t>(2 * m));
  for (int j = 0; j < m; ++j) {
    const Edge& e = net.edges[static_cast<std::size_t>(j)];
    ta.emplace_back(e.from, j, -1.0);
    ta.emplace_back(e.to, j, 1.0);
    tal.emplace_back(e.from, j, -1.0);
    tar.emplace_back(e.to, j, 1.0);
  }
  t.A.resize(n, m);
  t.A.setFromTriplets(ta.begin(), ta.end());
  t.AR.resize(n, m);
  t.AR.setFromTriplets(tar.begin(), tar.end());
  t.AL.resize(n, m);
  t.AL.setFromTriplets(tal.begin(), tal.end());

  std::vector<int> row_of(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (net.roles[static_cast<std::size_t>(i)] == NodeRole::Supply) {
      t.supply_rows.push_back(i);
    } else {
      row_of[static_cast<std::size_t>(i)] = static_cast<int>(t.state_nodes.size());
      t.state_nodes.push_back(i);
    }
    if (net.roles[static_cast<std::size_t>(i)] == NodeRole::Demand) t.demand_cols.push_back(i);
  }
  const int n0 = static_cast<int>(t.state_nodes.size());
  const int ns = static_cast<int>(t.supply_rows.size());
  const int nd = static_cast<int>(t.demand_cols.size());

  std::vector<Eigen::Triplet<double>> t0, t0r, t0l, tbs;
  std::vector<int> srow_of(static_cast<std::size_t>(n), -1);
  for (int s = 0; s < ns; ++s) srow_of[static_cast<std::size_t>(t.supply_rows[static_cast<std::size_t>(s)])] = s;
  for (int j = 0; j < m; ++j) {
    const Edge& e = net.edges[static_cast<std::size_t>(j)];
    int rf = row_of[static_cast<std::size_t>(e.from)];
    int rt = row_of[static_cast<std::size_t>(e.to)];
    if (rf >= 0) {
      t0.emplace_back(rf, j, -1.0);
      t0l.emplace_back(rf, j, -1.0);
    } else {
      tbs.emplace_back(srow_of[static_cast<std::size_t>(e.from)], j, 1.0);
    }
    if (rt >= 0) {
      t0.emplace_back(rt, j, 1.0);
      t0r.emplace_back(rt, j, 1.0);
    }
    // supply nodes are never edge heads (leaf with outgoing edge)
  }
  t.A0.resize(n0, m);
  t.A0.setFromTriplets(t0.begin(), t0.end());
  t.A0R.resize(n0, m);
  t.A0R.setFromTriplets(t0r.begin(), t0r.end());
  t.A0L.resize(n0, m);
  t.A0L.setFromTriplets(t0l.begin(), t0l.end());
  t.Bs.resize(ns, m);
  t.Bs.setFromTriplets(tbs.begin(), tbs.end());

  std::vector<Eigen::Triplet<double>> tbd;
  for (int d = 0; d < nd; ++d) tbd.emplace_back(t.demand_cols[static_cast<std::size_t>(d)], d, 1.0);
  t.Bd.resize(n, nd);
  t.Bd.setFromTriplets(tbd.begin(), tbd.end());
  return t;
}

}  // namespace gasmor
