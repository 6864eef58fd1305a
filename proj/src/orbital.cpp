#include "gwplan/orbital.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <fmt/os.h>

namespace gwplan {

double orbital_radius_km(const ConstellationSpec& spec) {
  return kEarthRadiusKm + spec.altitude_km;
}

double orbital_period_s(const ConstellationSpec& spec) {
  const double a = orbital_radius_km(spec);
  return 2.0 * kPi * std::sqrt(a * a * a / kEarthMuKm3s2);
}

EcefPosition satellite_ecef(const ConstellationSpec& spec, int plane, int slot,
                            double seconds) {
  const double a = orbital_radius_km(spec);
  const double mean_motion = std::sqrt(kEarthMuKm3s2 / (a * a * a));
  const double raan = deg2rad(spec.raan_first_deg + plane * spec.raan_spacing_deg);
  const double inc = deg2rad(spec.inclination_deg);
  // Argument of latitude: equal in-plane spacing plus the per-plane phasing.
  const double u = 2.0 * kPi * slot / spec.sats_per_plane +
                   deg2rad(plane * spec.phasing_deg) + mean_motion * seconds;

  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(raan), so = std::sin(raan);
  const double ci = std::cos(inc), si = std::sin(inc);
  const double xi = a * (co * cu - so * su * ci);
  const double yi = a * (so * cu + co * su * ci);
  const double zi = a * (su * si);

  // Inertial -> Earth-fixed: rotate by -theta about z.
  const double theta = kEarthRotationRadS * seconds;
  const double ct = std::cos(theta), st = std::sin(theta);
  return {ct * xi + st * yi, -st * xi + ct * yi, zi};
}

Ephemeris propagate(const ConstellationSpec& spec, const TimeGrid& grid) {
  std::vector<std::vector<EcefPosition>> positions(grid.steps);
  for (int t = 1; t <= grid.steps; ++t) {
    auto& step = positions[t - 1];
    step.reserve(spec.num_satellites());
    for (int p = 0; p < spec.planes; ++p)
      for (int k = 0; k < spec.sats_per_plane; ++k)
        step.push_back(satellite_ecef(spec, p, k, grid.seconds_at(t)));
  }
  return Ephemeris(spec, std::move(positions));
}

void Ephemeris::write_csv(const std::filesystem::path& path) const {
  auto out = fmt::output_file(path.string());
  out.print("t,sat_id,plane,slot,x_km,y_km,z_km\n");
  for (int t = 1; t <= steps(); ++t) {
    for (int s = 0; s < num_satellites(); ++s) {
      const auto& p = at(t, s);
      const auto id = this->id(s);
      out.print("{},{},{},{},{},{},{}\n", t, s, id.plane, id.slot, p.x, p.y, p.z);
    }
  }
}

EcefPosition ground_ecef(double lat_deg, double lon_deg) {
  const double lat = deg2rad(lat_deg), lon = deg2rad(lon_deg);
  return {kEarthRadiusKm * std::cos(lat) * std::cos(lon),
          kEarthRadiusKm * std::cos(lat) * std::sin(lon),
          kEarthRadiusKm * std::sin(lat)};
}

double elevation_angle(const EcefPosition& site, const EcefPosition& sat) {
  // On a sphere the local vertical is the radial direction.
  // atan2 stays accurate near the zenith where asin does not.
  const EcefPosition d = sat - site;
  const EcefPosition cross{d.y * site.z - d.z * site.y, d.z * site.x - d.x * site.z,
                           d.x * site.y - d.y * site.x};
  return rad2deg(std::atan2(dot(d, site), cross.norm()));
}

bool line_of_sight(const EcefPosition& a, const EcefPosition& b,
                   double grazing_altitude_km) {
  const double limit = kEarthRadiusKm + grazing_altitude_km;
  const EcefPosition d = b - a;
  const double len2 = dot(d, d);
  // Closest point of the segment to the origin.
  double s = len2 > 0.0 ? -dot(a, d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const EcefPosition closest{a.x + s * d.x, a.y + s * d.y, a.z + s * d.z};
  return closest.norm() >= limit;
}

double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg,
                    double lon2_deg) {
  const double p1 = deg2rad(lat1_deg), p2 = deg2rad(lat2_deg);
  const double dp = p2 - p1, dl = deg2rad(lon2_deg - lon1_deg);
  const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace gwplan
