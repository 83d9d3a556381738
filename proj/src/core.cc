#include "odmts/core.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace odmts {

namespace {

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Planar helpers in (lon, lat) degree space; zones are small enough that the
// projection does not change containment.
double cross(LatLon o, LatLon a, LatLon b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool on_segment(LatLon p, LatLon a, LatLon b) {
  constexpr double eps = 1e-12;
  if (std::abs(cross(a, b, p)) > eps) {
    return false;
  }
  return p.lat >= std::min(a.lat, b.lat) - eps && p.lat <= std::max(a.lat, b.lat) + eps &&
         p.lon >= std::min(a.lon, b.lon) - eps && p.lon <= std::max(a.lon, b.lon) + eps;
}

int sign(double x) { return (x > 1e-15) - (x < -1e-15); }

bool segments_intersect(LatLon a, LatLon b, LatLon c, LatLon d) {
  int const d1 = sign(cross(c, d, a));
  int const d2 = sign(cross(c, d, b));
  int const d3 = sign(cross(a, b, c));
  int const d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) {
    return true;
  }
  return (d1 == 0 && on_segment(a, c, d)) || (d2 == 0 && on_segment(b, c, d)) ||
         (d3 == 0 && on_segment(c, a, b)) || (d4 == 0 && on_segment(d, a, b));
}

std::vector<LatLon> open_ring(std::span<LatLon const> ring) {
  std::vector<LatLon> r(ring.begin(), ring.end());
  if (r.size() > 1 && r.front() == r.back()) {
    r.pop_back();
  }
  return r;
}

}  // namespace

double haversine_m(LatLon a, LatLon b) {
  double const phi1 = deg2rad(a.lat);
  double const phi2 = deg2rad(b.lat);
  double const dphi = deg2rad(b.lat - a.lat);
  double const dlambda = deg2rad(b.lon - a.lon);
  double const h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

LatLon destination_point(LatLon origin, double bearing_deg, double distance_m) {
  double const delta = distance_m / kEarthRadiusM;
  double const theta = deg2rad(bearing_deg);
  double const phi1 = deg2rad(origin.lat);
  double const lambda1 = deg2rad(origin.lon);
  double const phi2 =
      std::asin(std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta));
  double const lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  return {rad2deg(phi2), rad2deg(lambda2)};
}

Zone const& ServiceArea::zone(std::string_view id) const {
  auto const it = zones.find(std::string{id});
  if (it == zones.end()) {
    throw Error("UnknownZone", "unknown zone " + std::string{id});
  }
  return it->second;
}

VirtualStop const* ServiceArea::find_stop(std::string_view id) const {
  auto const it = stops.find(std::string{id});
  return it == stops.end() ? nullptr : &it->second;
}

VirtualStop const& ServiceArea::stop(std::string_view id) const {
  auto const* s = find_stop(id);
  if (s == nullptr) {
    throw Error("UnknownStop", "unknown stop " + std::string{id});
  }
  return *s;
}

std::vector<VirtualStop const*> ServiceArea::stops_in_zone(std::string_view zone_id) const {
  std::vector<VirtualStop const*> out;
  for (auto const& [id, s] : stops) {
    if (s.zone_id == zone_id) {
      out.push_back(&s);
    }
  }
  return out;
}

void ServiceArea::validate() const {
  for (auto const& [id, z] : zones) {
    if (z.boundary.size() < 3) {
      throw Error("ZoneInvalid", "zone " + id + " has fewer than 3 boundary vertices");
    }
    if (!is_simple_polygon(z.boundary)) {
      throw Error("ZoneInvalid", "zone " + id + " boundary self-intersects");
    }
    if (z.fleet_size < 1) {
      throw Error("ZoneInvalid", "zone " + id + " fleet_size must be at least 1");
    }
  }
  for (auto const& [id, s] : stops) {
    auto const z = zones.find(s.zone_id);
    if (z == zones.end()) {
      throw Error("UnknownZone", "stop " + id + " references unknown zone " + s.zone_id);
    }
    if (!point_in_zone(s.location, z->second)) {
      throw Error("StopOutsideZone", "stop " + id + " lies outside zone " + s.zone_id);
    }
    if (s.is_rail_station && s.kind != StopKind::ExistingTransitStop) {
      throw Error("StopInvalid", "rail station " + id + " must be an existing transit stop");
    }
  }
}

std::string_view to_string(RequestViolation v) {
  switch (v) {
    case RequestViolation::CrossZone: return "CrossZone";
    case RequestViolation::GroupTooLarge: return "GroupTooLarge";
    case RequestViolation::EmptyGroup: return "EmptyGroup";
    case RequestViolation::DegenerateTrip: return "DegenerateTrip";
    case RequestViolation::UnknownStop: return "UnknownStop";
  }
  return "?";
}

std::optional<RequestViolation> validate_request(Request const& req, ServiceArea const& area) {
  auto const* o = area.find_stop(req.origin_stop);
  auto const* d = area.find_stop(req.destination_stop);
  if (o == nullptr || d == nullptr) {
    return RequestViolation::UnknownStop;
  }
  if (req.origin_stop == req.destination_stop) {
    return RequestViolation::DegenerateTrip;
  }
  if (req.group_size > kMaxGroupSize) {
    return RequestViolation::GroupTooLarge;
  }
  if (req.group_size < 1) {
    return RequestViolation::EmptyGroup;
  }
  if (o->zone_id != d->zone_id || o->zone_id != req.zone_id) {
    return RequestViolation::CrossZone;
  }
  return std::nullopt;
}

bool point_in_zone(LatLon p, Zone const& z) {
  auto const ring = open_ring(z.boundary);
  auto const n = ring.size();
  if (n < 3) {
    return false;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    auto const a = ring[i];
    auto const b = ring[j];
    if (on_segment(p, a, b)) {
      return true;
    }
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      double const x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

bool is_simple_polygon(std::span<LatLon const> ring_in) {
  auto const ring = open_ring(ring_in);
  auto const n = ring.size();
  if (n < 3) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool const adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        continue;
      }
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

bool wrong_location_check(Vehicle& v, ServiceArea const& area) {
  if (!v.reported_stop) {
    throw Error("MissingReportedStop", "vehicle " + v.id + " has no reported stop");
  }
  auto const& stop = area.stop(*v.reported_stop);
  bool const wrong = haversine_m(v.gps, stop.location) > kWrongLocationThresholdM;
  if (wrong) {
    v.status = VehicleStatus::wrong_location();
  }
  return wrong;
}

std::string_view to_string(StopKind k) {
  return k == StopKind::ExistingTransitStop ? "ExistingTransitStop" : "ReachOnlyStop";
}

std::string_view to_string(Channel c) { return c == Channel::App ? "App" : "PhoneCall"; }

std::string_view to_string(LegAction a) { return a == LegAction::Pickup ? "Pickup" : "Dropoff"; }

std::string_view to_string(RequestPhase p) {
  switch (p) {
    case RequestPhase::Submitted: return "Submitted";
    case RequestPhase::Assigned: return "Assigned";
    case RequestPhase::Waiting: return "Waiting";
    case RequestPhase::Riding: return "Riding";
    case RequestPhase::Served: return "Served";
    case RequestPhase::CanceledByRider: return "CanceledByRider";
    case RequestPhase::NoShow: return "NoShow";
  }
  return "?";
}

StopKind parse_stop_kind(std::string_view s) {
  if (s == "ExistingTransitStop") return StopKind::ExistingTransitStop;
  if (s == "ReachOnlyStop") return StopKind::ReachOnlyStop;
  throw Error("ParseError", "unknown stop kind " + std::string{s});
}

Channel parse_channel(std::string_view s) {
  if (s == "App" || s == "app") return Channel::App;
  if (s == "PhoneCall" || s == "phone" || s == "phone_call") return Channel::PhoneCall;
  throw Error("ParseError", "unknown channel " + std::string{s});
}

}  // namespace odmts
