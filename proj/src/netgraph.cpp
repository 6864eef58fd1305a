#include "gwplan/netgraph.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>

#include <fmt/format.h>
#include "json.hpp"

namespace gwplan {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kUser: return "user";
    case NodeKind::kSatellite: return "satellite";
    case NodeKind::kGateway: return "gateway";
  }
  return "?";
}

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kUserLink: return "UL";
    case EdgeKind::kInterSatellite: return "ISL";
    case EdgeKind::kFeeder: return "FL";
    case EdgeKind::kTerrestrial: return "TL";
  }
  return "?";
}

std::string to_string(const NodeRef& node) {
  static constexpr char kPrefix[] = {'U', 'S', 'G'};
  return fmt::format("{}{}", kPrefix[static_cast<int>(node.kind)], node.index);
}

double link_speed_ms(EdgeKind kind) {
  return kind == EdgeKind::kTerrestrial ? 2.0 * kSpeedOfLightMs / 3.0 : kSpeedOfLightMs;
}

double link_latency_s(EdgeKind kind, double distance_km) {
  // d / (2c/3) written as 1.5 * d / c so that fiber and vacuum latencies
  // keep an exact 3:2 ratio in floating point.
  const double vacuum = distance_km * 1000.0 / kSpeedOfLightMs;
  return kind == EdgeKind::kTerrestrial ? 1.5 * vacuum : vacuum;
}

SnapshotGraph::SnapshotGraph(int t, int num_users, int num_satellites,
                             int num_gateways, std::vector<Edge> edges, bool directed)
    : t_(t),
      num_users_(num_users),
      num_satellites_(num_satellites),
      num_gateways_(num_gateways),
      edges_(std::move(edges)),
      directed_(directed),
      out_(num_nodes()),
      in_(num_nodes()) {
  for (const Edge& e : edges_) {
    out_[node_index(e.u)].push_back(e.id);
    in_[node_index(e.v)].push_back(e.id);
  }
}

int SnapshotGraph::node_index(const NodeRef& node) const {
  switch (node.kind) {
    case NodeKind::kUser: return node.index;
    case NodeKind::kSatellite: return num_users_ + node.index;
    case NodeKind::kGateway: return num_users_ + num_satellites_ + node.index;
  }
  return -1;
}

int SnapshotGraph::count(EdgeKind kind) const {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(),
                    [kind](const Edge& e) { return e.kind == kind; }));
}

std::string SnapshotGraph::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["t"] = t_;
  j["directed"] = directed_;
  j["nodes"] = {{"users", num_users_},
                {"satellites", num_satellites_},
                {"gateways", num_gateways_}};
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : edges_) {
    edges.push_back({{"id", e.id},
                     {"kind", to_string(e.kind)},
                     {"u", to_string(e.u)},
                     {"v", to_string(e.v)},
                     {"distance_km", e.distance_km},
                     {"latency_s", e.latency_s},
                     {"capacity_group", e.capacity_group}});
  }
  return j.dump(1);
}

namespace {

class EdgeList {
 public:
  void add(EdgeKind kind, NodeRef u, NodeRef v, double distance_km, bool bidirectional) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({id, kind, u, v, distance_km, link_latency_s(kind, distance_km),
                      bidirectional, id});
  }
  std::vector<Edge> take() { return std::move(edges_); }

 private:
  std::vector<Edge> edges_;
};

NodeRef user(int i) { return {NodeKind::kUser, i}; }
NodeRef sat(int j) { return {NodeKind::kSatellite, j}; }
NodeRef gateway(int l) { return {NodeKind::kGateway, l}; }

}  // namespace

SnapshotGraph build_snapshot(const Scenario& scenario, const Ephemeris& eph, int t) {
  const auto& spec = scenario.constellation;
  const int num_sats = spec.num_satellites();
  const int planes = spec.planes, per_plane = spec.sats_per_plane;
  const auto& pos = eph.step(t);
  EdgeList edges;

  for (const auto& d : scenario.traffic) {
    const EcefPosition site = ground_ecef(d.lat_deg, d.lon_deg);
    for (int j = 0; j < num_sats; ++j) {
      if (elevation_angle(site, pos[j]) >= d.min_elevation_deg)
        edges.add(EdgeKind::kUserLink, user(d.id), sat(j), distance_km(site, pos[j]),
                  false);
    }
  }

  // Intra-orbit: ring over the plane's slots, always present.
  for (int p = 0; p < planes; ++p) {
    std::set<std::pair<int, int>> ring;
    for (int k = 0; k < per_plane; ++k) {
      const int next = (k + 1) % per_plane;
      if (next != k) ring.insert(std::minmax(k, next));
    }
    for (const auto& [a, b] : ring) {
      const int ja = eph.index(p, a), jb = eph.index(p, b);
      edges.add(EdgeKind::kInterSatellite, sat(ja), sat(jb), distance_km(pos[ja], pos[jb]),
                true);
    }
  }

  // Inter-orbit: for each pair of adjacent planes, greedily match the closest
  // line-of-sight satellites (ties to lower indices). Each satellite has one
  // terminal per neighboring plane, so it gets at most one partner there.
  std::set<std::pair<int, int>> plane_pairs;
  for (int p = 0; p < planes; ++p) {
    const int q = (p + 1) % planes;
    if (q != p) plane_pairs.insert(std::minmax(p, q));
  }
  for (const auto& [p, q] : plane_pairs) {
    std::vector<std::tuple<double, int, int>> candidates;
    for (int a = 0; a < per_plane; ++a) {
      for (int b = 0; b < per_plane; ++b) {
        const int ja = eph.index(p, a), jb = eph.index(q, b);
        if (line_of_sight(pos[ja], pos[jb], scenario.isl_grazing_altitude_km))
          candidates.emplace_back(distance_km(pos[ja], pos[jb]), ja, jb);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<bool> taken(num_sats, false);
    std::vector<std::pair<int, int>> matched;
    for (const auto& [dist, ja, jb] : candidates) {
      if (taken[ja] || taken[jb]) continue;
      taken[ja] = taken[jb] = true;
      matched.emplace_back(ja, jb);
    }
    std::sort(matched.begin(), matched.end());
    for (const auto& [ja, jb] : matched)
      edges.add(EdgeKind::kInterSatellite, sat(ja), sat(jb), distance_km(pos[ja], pos[jb]),
                true);
  }

  for (int j = 0; j < num_sats; ++j) {
    for (const auto& g : scenario.gateways) {
      const EcefPosition site = ground_ecef(g.lat_deg, g.lon_deg);
      if (elevation_angle(site, pos[j]) >= g.min_elevation_deg)
        edges.add(EdgeKind::kFeeder, sat(j), gateway(g.id), distance_km(site, pos[j]),
                  false);
    }
  }

  const auto& gws = scenario.gateways;
  for (std::size_t a = 0; a < gws.size(); ++a) {
    for (std::size_t b = a + 1; b < gws.size(); ++b) {
      edges.add(EdgeKind::kTerrestrial, gateway(gws[a].id), gateway(gws[b].id),
                haversine_km(gws[a].lat_deg, gws[a].lon_deg, gws[b].lat_deg,
                             gws[b].lon_deg),
                true);
    }
  }

  return SnapshotGraph(t, scenario.num_users(), num_sats, scenario.num_gateways(),
                       edges.take(), /*directed=*/false);
}

std::vector<SnapshotGraph> build_all(const Scenario& scenario, const Ephemeris& eph) {
  std::vector<SnapshotGraph> graphs;
  graphs.reserve(scenario.time.steps);
  for (int t = 1; t <= scenario.time.steps; ++t)
    graphs.push_back(build_snapshot(scenario, eph, t));
  return graphs;
}

SnapshotGraph directed_expansion(const SnapshotGraph& graph) {
  if (graph.directed()) return graph;
  std::vector<Edge> out;
  out.reserve(graph.edges().size() * 2);
  for (const Edge& e : graph.edges()) {
    Edge forward = e;
    forward.id = static_cast<int>(out.size());
    forward.bidirectional = false;
    forward.capacity_group = e.id;
    out.push_back(forward);
    if (e.bidirectional) {
      Edge reverse = forward;
      reverse.id = static_cast<int>(out.size());
      std::swap(reverse.u, reverse.v);
      out.push_back(reverse);
    }
  }
  return SnapshotGraph(graph.t(), graph.num_users(), graph.num_satellites(),
                       graph.num_gateways(), std::move(out), /*directed=*/true);
}

}  // namespace gwplan
