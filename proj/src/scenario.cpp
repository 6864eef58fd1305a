#include "gwplan/scenario.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace gwplan {
namespace {

// NaN-safe range checks: every comparison against NaN is false.
bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }
bool positive(double v) { return v > 0.0 && std::isfinite(v); }

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

// ---------------------------------------------------------------------------
// Reading.

class Section {
 public:
  Section(YAML::Node node, std::string path)
      : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsMap())
      throw ParseError(fmt::format("{}: expected a mapping", path_));
  }

  bool has(const std::string& key) const { return node_ && node_[key]; }

  template <typename T>
  T get(const std::string& key) const {
    if (!has(key))
      throw ParseError(fmt::format("{}.{}: missing required key", path_, key));
    return convert<T>(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? convert<T>(key) : fallback;
  }

  // Unknown keys are almost always typos; refuse them.
  void reject_unknown(std::initializer_list<const char*> known) const {
    if (!node_) return;
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key))
        throw ParseError(fmt::format("{}.{}: unknown key", path_, key));
    }
  }

 private:
  template <typename T>
  T convert(const std::string& key) const {
    try {
      return node_[key].as<T>();
    } catch (const YAML::Exception&) {
      throw ParseError(fmt::format("{}.{}: wrong value type", path_, key));
    }
  }

  const YAML::Node node_;
  std::string path_;
};

YAML::Node sequence(const YAML::Node& root, const char* key) {
  const YAML::Node node = root[key];
  if (!node) throw ParseError(fmt::format("{}: missing required section", key));
  if (node.IsNull()) return YAML::Node(YAML::NodeType::Sequence);
  if (!node.IsSequence())
    throw ParseError(fmt::format("{}: expected a sequence", key));
  return node;
}

Section required_map(const YAML::Node& root, const char* key) {
  if (!root[key])
    throw ParseError(fmt::format("{}: missing required section", key));
  return Section(root[key], key);
}

Scenario from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw ParseError("document: expected a mapping at top level");
  {
    const std::set<std::string> sections = {"constellation", "gateways", "traffic",
                                            "capacities",    "weights",  "time",
                                            "solver"};
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!sections.contains(key))
        throw ParseError(fmt::format("{}: unknown section", key));
    }
  }

  Scenario s;

  const Section con = required_map(root, "constellation");
  con.reject_unknown({"planes", "sats_per_plane", "altitude_km", "inclination_deg",
                      "eccentricity", "raan_first_deg", "raan_spacing_deg",
                      "phasing_deg", "isl_grazing_altitude_km"});
  auto& c = s.constellation;
  c.planes = con.get<int>("planes");
  c.sats_per_plane = con.get<int>("sats_per_plane");
  c.altitude_km = con.get<double>("altitude_km");
  c.inclination_deg = con.get<double>("inclination_deg");
  c.eccentricity = con.get<double>("eccentricity", 0.0);
  c.raan_first_deg = con.get<double>("raan_first_deg", 30.0);
  // Walker-delta style spacing unless overridden. Guard the divisions; bad
  // counts are reported by validate().
  const int p = c.planes > 0 ? c.planes : 1;
  const int k = c.sats_per_plane > 0 ? c.sats_per_plane : 1;
  c.raan_spacing_deg = con.get<double>("raan_spacing_deg", 360.0 / p);
  c.phasing_deg = con.get<double>("phasing_deg", 360.0 / (p * k));
  s.isl_grazing_altitude_km = con.get<double>("isl_grazing_altitude_km", 80.0);

  const YAML::Node gws = sequence(root, "gateways");
  for (std::size_t n = 0; n < gws.size(); ++n) {
    const Section g(gws[n], fmt::format("gateways[{}]", n));
    g.reject_unknown({"id", "name", "lat", "lon", "min_elev"});
    GatewaySite site;
    site.id = g.get<int>("id");
    site.name = g.get<std::string>("name", fmt::format("gw{}", site.id));
    site.lat_deg = g.get<double>("lat");
    site.lon_deg = g.get<double>("lon");
    site.min_elevation_deg = g.get<double>("min_elev", 5.0);
    s.gateways.push_back(std::move(site));
  }

  const YAML::Node users = sequence(root, "traffic");
  for (std::size_t n = 0; n < users.size(); ++n) {
    const Section u(users[n], fmt::format("traffic[{}]", n));
    u.reject_unknown({"id", "lat", "lon", "rate_mbps", "destination", "min_elev"});
    TrafficDemand d;
    d.id = u.get<int>("id");
    d.lat_deg = u.get<double>("lat");
    d.lon_deg = u.get<double>("lon");
    d.rate_mbps = u.get<double>("rate_mbps");
    d.destination = u.get<int>("destination");
    d.min_elevation_deg = u.get<double>("min_elev", 10.0);
    s.traffic.push_back(d);
  }

  const Section cap = required_map(root, "capacities");
  cap.reject_unknown({"user_mbps", "isl_mbps", "feeder_mbps"});
  s.capacities.user_mbps = cap.get<double>("user_mbps");
  s.capacities.isl_mbps = cap.get<double>("isl_mbps");
  s.capacities.feeder_mbps = cap.get<double>("feeder_mbps");

  const Section w = required_map(root, "weights");
  w.reject_unknown({"w_g", "w_f", "w_l", "latency_norm_s"});
  s.weights.w_gateway = w.get<double>("w_g");
  s.weights.w_flow = w.get<double>("w_f");
  s.weights.w_latency = w.get<double>("w_l");
  s.weights.latency_norm_s = w.get<double>("latency_norm_s", 0.1);

  const Section t = required_map(root, "time");
  t.reject_unknown({"epoch", "step_s", "steps"});
  s.time.epoch = t.get<std::string>("epoch", s.time.epoch);
  s.time.step_s = t.get<double>("step_s");
  s.time.steps = t.get<int>("steps");

  const Section sol(root["solver"], "solver");
  sol.reject_unknown({"big_m"});
  // The Big-M equals the ISL capacity unless set explicitly.
  s.big_m = sol.get<double>("big_m", s.capacities.isl_mbps);
  return s;
}

// ---------------------------------------------------------------------------
// Writing. Numbers go out in shortest round-trip form so that a write/load
// cycle reproduces every double bit-for-bit.

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

void validate(const CostWeights& w) {
  require(w.w_gateway >= 0.0, "weights.w_g", "must be >= 0");
  require(w.w_flow >= 0.0, "weights.w_f", "must be >= 0");
  require(w.w_latency >= 0.0, "weights.w_l", "must be >= 0");
  const double sum = w.w_gateway + w.w_flow + w.w_latency;
  require(std::abs(sum - 1.0) <= 1e-9, "weights.sum",
          fmt::format("w_g + w_f + w_l must equal 1 (got {})", sum));
  require(positive(w.latency_norm_s), "weights.latency_norm_s", "must be > 0");
}

void validate(const Scenario& s) {
  const auto& c = s.constellation;
  require(c.planes >= 1, "constellation.planes", "must be >= 1");
  require(c.sats_per_plane >= 1, "constellation.sats_per_plane", "must be >= 1");
  require(positive(c.altitude_km), "constellation.altitude_km", "must be > 0");
  require(in_range(c.inclination_deg, 0.0, 180.0), "constellation.inclination_deg",
          "must be in [0, 180]");
  require(c.eccentricity == 0.0, "constellation.eccentricity",
          "only circular orbits (eccentricity 0) are supported");
  require(std::isfinite(c.raan_first_deg), "constellation.raan_first_deg",
          "must be finite");
  require(std::isfinite(c.raan_spacing_deg), "constellation.raan_spacing_deg",
          "must be finite");
  require(std::isfinite(c.phasing_deg), "constellation.phasing_deg", "must be finite");
  require(s.isl_grazing_altitude_km >= 0.0 &&
              s.isl_grazing_altitude_km < c.altitude_km,
          "constellation.isl_grazing_altitude_km",
          "must be in [0, altitude_km)");

  for (std::size_t n = 0; n < s.gateways.size(); ++n) {
    const auto& g = s.gateways[n];
    const auto field = [n](const char* key) {
      return fmt::format("gateways[{}].{}", n, key);
    };
    require(g.id == static_cast<int>(n), field("id"),
            "gateway ids must be unique and dense 0..N_g-1 in order");
    require(in_range(g.lat_deg, -90.0, 90.0), field("lat"), "must be in [-90, 90]");
    require(in_range(g.lon_deg, -180.0, 180.0), field("lon"), "must be in [-180, 180]");
    require(in_range(g.min_elevation_deg, 0.0, 90.0), field("min_elev"),
            "must be in [0, 90]");
  }

  for (std::size_t n = 0; n < s.traffic.size(); ++n) {
    const auto& d = s.traffic[n];
    const auto field = [n](const char* key) {
      return fmt::format("traffic[{}].{}", n, key);
    };
    require(d.id == static_cast<int>(n), field("id"),
            "traffic ids must be unique and dense 0..N_u-1 in order");
    require(in_range(d.lat_deg, -90.0, 90.0), field("lat"), "must be in [-90, 90]");
    require(in_range(d.lon_deg, -180.0, 180.0), field("lon"), "must be in [-180, 180]");
    require(positive(d.rate_mbps), field("rate_mbps"), "must be > 0");
    require(d.destination >= 0 && d.destination < s.num_gateways(),
            field("destination"), "must reference an existing gateway id");
    require(in_range(d.min_elevation_deg, 0.0, 90.0), field("min_elev"),
            "must be in [0, 90]");
  }

  require(positive(s.capacities.user_mbps), "capacities.user_mbps", "must be > 0");
  require(positive(s.capacities.isl_mbps), "capacities.isl_mbps", "must be > 0");
  require(positive(s.capacities.feeder_mbps), "capacities.feeder_mbps", "must be > 0");

  validate(s.weights);

  require(s.time.step_s > 0.0 && std::isfinite(s.time.step_s), "time.step_s",
          "must be > 0");
  require(s.time.steps >= 1, "time.steps", "must be >= 1");
  require(!s.time.epoch.empty(), "time.epoch", "must not be empty");

  // A Big-M below the ISL capacity would silently cap every link flow.
  require(std::isfinite(s.big_m) && s.big_m >= s.capacities.isl_mbps, "solver.big_m",
          "must be >= capacities.isl_mbps");
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(fmt::format("malformed document: {}", e.what()));
  }
  Scenario s = from_yaml(root);
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("{}: cannot open", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string write_scenario(const Scenario& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  const auto& c = s.constellation;
  out << YAML::Key << "constellation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "planes" << YAML::Value << c.planes;
  out << YAML::Key << "sats_per_plane" << YAML::Value << c.sats_per_plane;
  out << YAML::Key << "altitude_km" << YAML::Value << num(c.altitude_km);
  out << YAML::Key << "inclination_deg" << YAML::Value << num(c.inclination_deg);
  out << YAML::Key << "eccentricity" << YAML::Value << num(c.eccentricity);
  out << YAML::Key << "raan_first_deg" << YAML::Value << num(c.raan_first_deg);
  out << YAML::Key << "raan_spacing_deg" << YAML::Value << num(c.raan_spacing_deg);
  out << YAML::Key << "phasing_deg" << YAML::Value << num(c.phasing_deg);
  out << YAML::Key << "isl_grazing_altitude_km" << YAML::Value
      << num(s.isl_grazing_altitude_km);
  out << YAML::EndMap;

  out << YAML::Key << "gateways" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : s.gateways) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << g.id;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << g.name;
    out << YAML::Key << "lat" << YAML::Value << num(g.lat_deg);
    out << YAML::Key << "lon" << YAML::Value << num(g.lon_deg);
    out << YAML::Key << "min_elev" << YAML::Value << num(g.min_elevation_deg);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "traffic" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : s.traffic) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << d.id;
    out << YAML::Key << "lat" << YAML::Value << num(d.lat_deg);
    out << YAML::Key << "lon" << YAML::Value << num(d.lon_deg);
    out << YAML::Key << "rate_mbps" << YAML::Value << num(d.rate_mbps);
    out << YAML::Key << "destination" << YAML::Value << d.destination;
    out << YAML::Key << "min_elev" << YAML::Value << num(d.min_elevation_deg);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "capacities" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "user_mbps" << YAML::Value << num(s.capacities.user_mbps);
  out << YAML::Key << "isl_mbps" << YAML::Value << num(s.capacities.isl_mbps);
  out << YAML::Key << "feeder_mbps" << YAML::Value << num(s.capacities.feeder_mbps);
  out << YAML::EndMap;

  out << YAML::Key << "weights" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "w_g" << YAML::Value << num(s.weights.w_gateway);
  out << YAML::Key << "w_f" << YAML::Value << num(s.weights.w_flow);
  out << YAML::Key << "w_l" << YAML::Value << num(s.weights.w_latency);
  out << YAML::Key << "latency_norm_s" << YAML::Value << num(s.weights.latency_norm_s);
  out << YAML::EndMap;

  out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "epoch" << YAML::Value << YAML::DoubleQuoted << s.time.epoch;
  out << YAML::Key << "step_s" << YAML::Value << num(s.time.step_s);
  out << YAML::Key << "steps" << YAML::Value << s.time.steps;
  out << YAML::EndMap;

  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "big_m" << YAML::Value << num(s.big_m);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot write", path.string()));
  out << write_scenario(scenario);
}

std::string scenario_digest(const Scenario& scenario) {
  const std::string text = write_scenario(scenario);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

Scenario reference_scenario(const ReferenceShape& shape) {
  Scenario s;
  auto& c = s.constellation;
  c.planes = shape.planes;
  c.sats_per_plane = shape.sats_per_plane;
  c.altitude_km = 800.0;
  c.inclination_deg = 55.0;
  c.eccentricity = 0.0;
  c.raan_first_deg = 30.0;
  c.raan_spacing_deg = 360.0 / shape.planes;
  c.phasing_deg = 360.0 / (shape.planes * shape.sats_per_plane);

  // Placeholder candidate sites. Ordered so that every prefix stays spread
  // over both user clusters' hemispheres.
  struct Site {
    const char* name;
    double lat, lon;
  };
  static constexpr Site kSites[] = {
      {"north-america", 39.04, -77.49},  {"southern-europe", 41.90, 12.50},
      {"east-asia", 37.57, 126.98},      {"central-africa", -4.32, 15.31},
      {"south-asia", 19.08, 72.88},      {"australia", -31.95, 115.86},
      {"south-america", -23.55, -46.63}, {"middle-east", 25.20, 55.27},
      {"scandinavia", 59.91, 10.75},     {"pacific", 21.31, -157.86},
  };
  constexpr int kMaxSites = static_cast<int>(std::size(kSites));
  if (shape.gateways < 1 || shape.gateways > kMaxSites)
    throw ValidationError("gateways", fmt::format("reference shape supports 1..{} gateways",
                                                  kMaxSites));
  for (int n = 0; n < shape.gateways; ++n) {
    s.gateways.push_back(
        {n, kSites[n].name, kSites[n].lat, kSites[n].lon, /*min_elevation_deg=*/5.0});
  }

  struct Cluster {
    double lat, lon;
  };
  static constexpr Cluster kClusters[] = {{49.63, 6.16}, {35.71, 139.49}};
  int id = 0;
  for (int group = 0; group < 2; ++group) {
    for (int k = 0; k < shape.users_per_cluster; ++k) {
      TrafficDemand d;
      d.id = id++;
      d.lat_deg = kClusters[group].lat;
      d.lon_deg = kClusters[group].lon;
      d.rate_mbps = 50.0;
      d.destination = (k + group * shape.users_per_cluster) % shape.gateways;
      d.min_elevation_deg = 10.0;
      s.traffic.push_back(d);
    }
  }

  s.capacities = {250.0, 1000.0, 500.0};
  s.weights = {0.5, 0.4, 0.1, 0.1};
  s.time.step_s = 60.0;
  s.time.steps = shape.steps;
  s.big_m = s.capacities.isl_mbps;
  s.isl_grazing_altitude_km = 80.0;
  validate(s);
  return s;
}

Scenario default_scenario() { return reference_scenario(ReferenceShape{}); }

Scenario desk_scenario() {
  return reference_scenario({.planes = 4,
                             .sats_per_plane = 6,
                             .users_per_cluster = 3,
                             .gateways = 6,
                             .steps = 4});
}

}  // namespace gwplan
