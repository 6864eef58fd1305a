// Circular-orbit constellation propagation and spherical-Earth geodesy.
//
// The Earth is a sphere of radius kEarthRadiusKm rotating at kEarthRotation
// rad/s, with Greenwich aligned to the inertial x axis at the scenario epoch.
// No oblateness, no perturbations: link latency only needs distances.

#ifndef GWPLAN_ORBITAL_HPP_
#define GWPLAN_ORBITAL_HPP_

#include <cmath>
#include <filesystem>
#include <vector>

#include "gwplan/scenario.hpp"

namespace gwplan {

inline constexpr double kEarthRadiusKm = 6378.137;
inline constexpr double kEarthMuKm3s2 = 398600.4418;
inline constexpr double kEarthRotationRadS = 7.2921159e-5;
inline constexpr double kSpeedOfLightMs = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Earth-centered Earth-fixed position in kilometers.
struct EcefPosition {
  double x = 0.0, y = 0.0, z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool operator==(const EcefPosition&) const = default;
};

inline EcefPosition operator-(const EcefPosition& a, const EcefPosition& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline double dot(const EcefPosition& a, const EcefPosition& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double distance_km(const EcefPosition& a, const EcefPosition& b) {
  return (a - b).norm();
}

struct SatelliteId {
  int plane = 0;
  int slot = 0;
};

// Positions indexed [t - 1][sat], sat = plane * K + slot.
class Ephemeris {
 public:
  Ephemeris(ConstellationSpec spec, std::vector<std::vector<EcefPosition>> positions)
      : spec_(spec), positions_(std::move(positions)) {}

  int steps() const { return static_cast<int>(positions_.size()); }
  int num_satellites() const { return spec_.num_satellites(); }
  const ConstellationSpec& spec() const { return spec_; }

  // t is 1-based.
  const EcefPosition& at(int t, int sat) const { return positions_.at(t - 1).at(sat); }
  const std::vector<EcefPosition>& step(int t) const { return positions_.at(t - 1); }

  SatelliteId id(int sat) const {
    return {sat / spec_.sats_per_plane, sat % spec_.sats_per_plane};
  }
  int index(int plane, int slot) const { return plane * spec_.sats_per_plane + slot; }

  // CSV with header t,sat_id,plane,slot,x_km,y_km,z_km.
  void write_csv(const std::filesystem::path& path) const;

 private:
  ConstellationSpec spec_;
  std::vector<std::vector<EcefPosition>> positions_;
};

double orbital_radius_km(const ConstellationSpec& spec);
double orbital_period_s(const ConstellationSpec& spec);

// Satellite position at `seconds` after the epoch.
EcefPosition satellite_ecef(const ConstellationSpec& spec, int plane, int slot,
                            double seconds);

Ephemeris propagate(const ConstellationSpec& spec, const TimeGrid& grid);

EcefPosition ground_ecef(double lat_deg, double lon_deg);

// Angle between the local horizontal plane at `site` and the site->sat
// vector; negative below the horizon.
double elevation_angle(const EcefPosition& site, const EcefPosition& sat);

// True iff segment a-b stays at least kEarthRadiusKm + grazing_altitude_km
// away from the Earth's center.
bool line_of_sight(const EcefPosition& a, const EcefPosition& b,
                   double grazing_altitude_km);

double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

}  // namespace gwplan

#endif  // GWPLAN_ORBITAL_HPP_
