#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <string>
#include <vector>

#include "gasmor/util.hpp"

namespace gasmor {

enum class EdgeKind { Pipe, Shortcut, Compressor, Valve };

const char* to_string(EdgeKind k);

struct Edge {
  EdgeKind kind = EdgeKind::Pipe;
  int from = -1;      // node index
  int to = -1;
  double length = 0;     // [m]
  double diameter = 0;   // [m]
  double incline = 0;    // height difference h_to - h_from [m]
  double roughness = 0;  // [m]
};

enum class NodeRole { Internal, Supply, Demand };

/// Directed multigraph with boundary classification. Node and edge order is
/// first appearance in the source file, so derived matrix layouts are
/// reproducible byte for byte.
struct Network {
  std::vector<std::string> node_ids;
  std::vector<Edge> edges;
  std::vector<NodeRole> roles;  // empty until classify_boundary ran

  int node_count() const { return static_cast<int>(node_ids.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  bool classified() const { return !roles.empty(); }

  std::vector<int> supply_nodes() const;
  std::vector<int> demand_nodes() const;

  /// Content hash over the edge list (kinds, endpoints, geometry).
  std::uint64_t content_hash() const;
};

/// Parse a .net file: CSV, no header, one edge per row with 7 fields
/// (kind, from, to, length, diameter, incline, roughness); '#' starts a
/// comment line. Boundary classification is applied before returning.
Network parse_net(const std::string& text);

/// Mark leaves with a single outgoing edge as supply, leaves with a single
/// incoming edge as demand, everything else internal. Rejects isolated nodes
/// and disconnected graphs.
Network classify_boundary(Network net);

/// CFL-nominal segment length dx = (1 - eps) * v_max * dt.
double nominal_length(double dt, double v_max, double eps);

struct RefinementResult {
  Network refined;                   // all edges exactly nominal length
  std::vector<double> friction_scale;  // per refined edge, in (0,1]; 0 for frictionless kinds
  std::vector<int> virtual_of;         // refined edge -> original edge index
  double dx = 0;
};

/// Subdivide pipes into virtual segments of length dx. Long pipes become
/// floor(L/dx) full segments plus one rounded-up remainder segment whose
/// friction is scaled by remainder/dx; short pipes become a single segment
/// with friction scaled by L/dx. Shortcuts, compressors and open valves pass
/// through as single frictionless nominal-length segments. Incline is
/// apportioned proportionally to the represented original sub-length.
RefinementResult refine(const Network& net, double dx);

using SpMat = Eigen::SparseMatrix<double>;

/// Incidence matrix family. Signs follow A(i,j) = -1 when edge j leaves node
/// i and +1 when it enters. B_s(s,j) = 1 when edge j leaves supply s;
/// B_d(i,d) = 1 when node i is demand d.
struct TopologyMatrices {
  SpMat A;    // |N| x |E|
  SpMat A0;   // supply rows removed
  SpMat AR, AL;      // A = AR + AL, AR in {0,1}, AL in {-1,0}
  SpMat A0R, A0L;
  SpMat Bs;   // |N_S| x |E|
  SpMat Bd;   // |N| x |N_D|
  std::vector<int> state_nodes;   // row -> node index for A0 (non-supply, in node order)
  std::vector<int> supply_rows;   // row -> node index for Bs
  std::vector<int> demand_cols;   // col -> node index for Bd
};

TopologyMatrices incidence(const Network& net);

}  // namespace gasmor
