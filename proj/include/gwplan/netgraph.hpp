// Per-time-step link graphs over users, satellites and gateways.
//
// A snapshot lists every *candidate* link at one step: user links (user ->
// satellite), inter-satellite links (+Grid mesh), feeder links (satellite ->
// gateway) and terrestrial links (gateway full mesh). Which links are
// actually used is decided by the optimization model, not here.

#ifndef GWPLAN_NETGRAPH_HPP_
#define GWPLAN_NETGRAPH_HPP_

#include <string>
#include <vector>

#include "gwplan/orbital.hpp"
#include "gwplan/scenario.hpp"

namespace gwplan {

enum class NodeKind { kUser, kSatellite, kGateway };
enum class EdgeKind { kUserLink, kInterSatellite, kFeeder, kTerrestrial };

const char* to_string(NodeKind kind);
const char* to_string(EdgeKind kind);

struct NodeRef {
  NodeKind kind = NodeKind::kUser;
  int index = 0;
  bool operator==(const NodeRef&) const = default;
};

std::string to_string(const NodeRef& node);  // "U3", "S12", "G0"

struct Edge {
  int id = 0;
  EdgeKind kind = EdgeKind::kUserLink;
  NodeRef u;  // start node
  NodeRef v;  // end node
  double distance_km = 0.0;
  double latency_s = 0.0;
  bool bidirectional = false;
  // Edges sharing a group share one capacity budget. Equal to the id of the
  // undirected edge the directed copy came from.
  int capacity_group = 0;
};

// Signal speeds: vacuum for radio and optical space links, 2c/3 in fiber.
double link_speed_ms(EdgeKind kind);
double link_latency_s(EdgeKind kind, double distance_km);

class SnapshotGraph {
 public:
  SnapshotGraph(int t, int num_users, int num_satellites, int num_gateways,
                std::vector<Edge> edges, bool directed);

  int t() const { return t_; }
  int num_users() const { return num_users_; }
  int num_satellites() const { return num_satellites_; }
  int num_gateways() const { return num_gateways_; }
  int num_nodes() const { return num_users_ + num_satellites_ + num_gateways_; }
  bool directed() const { return directed_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int id) const { return edges_.at(id); }

  // Dense index over all nodes: users, then satellites, then gateways.
  int node_index(const NodeRef& node) const;

  // Edge ids leaving / entering a node, in edge-id order.
  const std::vector<int>& out_edges(const NodeRef& node) const {
    return out_.at(node_index(node));
  }
  const std::vector<int>& in_edges(const NodeRef& node) const {
    return in_.at(node_index(node));
  }

  int count(EdgeKind kind) const;

  std::string to_json() const;

 private:
  int t_;
  int num_users_, num_satellites_, num_gateways_;
  std::vector<Edge> edges_;
  bool directed_;
  std::vector<std::vector<int>> out_, in_;
};

SnapshotGraph build_snapshot(const Scenario& scenario, const Ephemeris& eph, int t);
std::vector<SnapshotGraph> build_all(const Scenario& scenario, const Ephemeris& eph);

// Replaces each bidirectional edge by two directed edges in the same
// capacity group; user and feeder links are copied unchanged.
SnapshotGraph directed_expansion(const SnapshotGraph& graph);

}  // namespace gwplan

#endif  // GWPLAN_NETGRAPH_HPP_
