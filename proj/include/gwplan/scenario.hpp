// Problem instance for joint gateway placement and routing: constellation,
// gateway candidates, traffic demands, link capacities, cost weights and the
// planning time grid.
//
// A Scenario is immutable once loaded. Every constructor path goes through
// validate(), so holding a Scenario means holding a valid one.

#ifndef GWPLAN_SCENARIO_HPP_
#define GWPLAN_SCENARIO_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwplan {

// Malformed scenario document (syntax, missing keys, wrong value types).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed document that violates an invariant. field() names the
// offending field using the document's dotted key path, e.g. "weights.sum"
// or "gateways[3].lat".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ConstellationSpec {
  int planes = 6;
  int sats_per_plane = 10;
  double altitude_km = 800.0;
  double inclination_deg = 55.0;
  double eccentricity = 0.0;
  double raan_first_deg = 30.0;
  double raan_spacing_deg = 60.0;
  double phasing_deg = 6.0;  // per-plane in-plane offset

  int num_satellites() const { return planes * sats_per_plane; }
  bool operator==(const ConstellationSpec&) const = default;
};

struct GatewaySite {
  int id = 0;
  std::string name;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double min_elevation_deg = 5.0;
  bool operator==(const GatewaySite&) const = default;
};

struct TrafficDemand {
  int id = 0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double rate_mbps = 50.0;
  int destination = 0;  // gateway id
  double min_elevation_deg = 10.0;
  bool operator==(const TrafficDemand&) const = default;
};

// Terrestrial links are uncapacitated, so there is no field for them.
struct LinkCapacities {
  double user_mbps = 250.0;
  double isl_mbps = 1000.0;
  double feeder_mbps = 500.0;
  bool operator==(const LinkCapacities&) const = default;
};

struct CostWeights {
  double w_gateway = 0.5;
  double w_flow = 0.4;
  double w_latency = 0.1;
  double latency_norm_s = 0.1;
  bool operator==(const CostWeights&) const = default;
};

// Steps are 1-based: step t happens at epoch + (t - 1) * step_s.
struct TimeGrid {
  std::string epoch = "2024-01-01T00:00:00Z";
  double step_s = 60.0;
  int steps = 31;

  double seconds_at(int t) const { return (t - 1) * step_s; }
  bool operator==(const TimeGrid&) const = default;
};

struct Scenario {
  ConstellationSpec constellation;
  std::vector<GatewaySite> gateways;
  std::vector<TrafficDemand> traffic;
  LinkCapacities capacities;
  CostWeights weights;
  TimeGrid time;
  double big_m = 1000.0;
  double isl_grazing_altitude_km = 80.0;

  int num_gateways() const { return static_cast<int>(gateways.size()); }
  int num_users() const { return static_cast<int>(traffic.size()); }
  bool operator==(const Scenario&) const = default;
};

// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& scenario);
void validate(const CostWeights& weights);

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);
std::string write_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// Hex SHA-256 of the canonical serialization.
std::string scenario_digest(const Scenario& scenario);

// Default planning instance: 6x10 constellation at 800 km, 20 users in two
// clusters (Luxembourg and Tokyo), 10 candidate gateways, 31 one-minute steps.
// The gateway coordinates are placeholder sites spread over North America,
// Europe, East Asia, Africa, South Asia, Australia, South America, the Middle
// East, Scandinavia and the Pacific.
Scenario default_scenario();

// Shape knobs for reduced copies of the default scenario. Users are split
// evenly between the two clusters; destinations are assigned round-robin over
// the retained gateways, the second cluster continuing where the first one
// stopped.
struct ReferenceShape {
  int planes = 6;
  int sats_per_plane = 10;
  int users_per_cluster = 10;
  int gateways = 10;
  int steps = 31;
};
Scenario reference_scenario(const ReferenceShape& shape);

// Desk-scale instance used for trend reproduction: 6 users, 4x6 satellites,
// 6 gateways, 4 steps.
Scenario desk_scenario();

}  // namespace gwplan

#endif  // GWPLAN_SCENARIO_HPP_
