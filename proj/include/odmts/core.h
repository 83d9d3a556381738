#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace odmts {

// Integer seconds from scenario start. Day d of a scenario spans
// [d * kSecondsPerDay, (d + 1) * kSecondsPerDay); time 0 is midnight.
using Seconds = std::int64_t;

constexpr Seconds kSecondsPerDay = 86400;
constexpr Seconds kServiceStart = 6 * 3600;
constexpr Seconds kServiceEnd = 19 * 3600;

constexpr int hour_of_day(Seconds t) {
  auto const in_day = ((t % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay;
  return static_cast<int>(in_day / 3600);
}

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(LatLon const&, LatLon const&) = default;
};

constexpr double kEarthRadiusM = 6'371'000.0;

// Great-circle distance in meters (haversine, spherical earth).
double haversine_m(LatLon a, LatLon b);

// Point at the given distance and initial bearing (degrees clockwise from
// north) from `origin` along a great circle.
LatLon destination_point(LatLon origin, double bearing_deg, double distance_m);

// Base error for everything the library reports. `code()` is a stable
// machine-readable identifier such as "CrossZone" or "UnknownStopPair".
class Error : public std::runtime_error {
public:
  Error(std::string code, std::string const& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  std::string const& code() const noexcept { return code_; }

private:
  std::string code_;
};

// Raised for unreadable or missing files; the CLI maps it to exit code 2.
class IoError : public Error {
public:
  explicit IoError(std::string const& message) : Error("IoError", message) {}
};

enum class Phase { Phase1, Phase2 };

struct Zone {
  std::string id;
  std::string name;
  std::vector<LatLon> boundary;  // closed ring; last vertex need not repeat the first
  Phase phase = Phase::Phase1;
  int fleet_size = 1;
};

enum class StopKind { ExistingTransitStop, ReachOnlyStop };

struct VirtualStop {
  std::string id;
  std::string zone_id;
  LatLon location;
  StopKind kind = StopKind::ReachOnlyStop;
  bool is_idle_location = false;
  bool is_rail_station = false;
};

enum class StatusTop { Regular, WithRiders, WrongLocation };
enum class RegularSub { Idling, WaitingForDeparture, WaitingForPassengers, DrivingWithoutPassengers };

// Monitor-app status. The sub-status exists exactly when the top status is
// Regular; the named constructors are the only way to build one.
class VehicleStatus {
public:
  VehicleStatus() = default;
  static VehicleStatus regular(RegularSub sub) { return VehicleStatus{StatusTop::Regular, sub}; }
  static VehicleStatus with_riders() { return VehicleStatus{StatusTop::WithRiders, std::nullopt}; }
  static VehicleStatus wrong_location() { return VehicleStatus{StatusTop::WrongLocation, std::nullopt}; }

  StatusTop top() const { return top_; }
  std::optional<RegularSub> regular_sub() const { return sub_; }
  friend bool operator==(VehicleStatus const&, VehicleStatus const&) = default;

private:
  VehicleStatus(StatusTop top, std::optional<RegularSub> sub) : top_(top), sub_(sub) {}
  StatusTop top_ = StatusTop::Regular;
  std::optional<RegularSub> sub_ = RegularSub::Idling;
};

enum class LegAction { Pickup, Dropoff };

struct PlanLeg {
  std::string request_id;
  LegAction action = LegAction::Pickup;
  std::string stop_id;
  Seconds planned_arrival = 0;
  int group_size = 1;
  friend bool operator==(PlanLeg const&, PlanLeg const&) = default;
};

constexpr int kDefaultCapacity = 8;

struct Vehicle {
  std::string id;
  std::string zone_id;
  int capacity = kDefaultCapacity;
  VehicleStatus status;
  LatLon gps;
  std::optional<std::string> reported_stop;
  std::vector<PlanLeg> plan;
};

enum class Channel { App, PhoneCall };

enum class RequestPhase { Submitted, Assigned, Waiting, Riding, Served, CanceledByRider, NoShow };

struct RequestState {
  RequestPhase phase = RequestPhase::Submitted;
  std::optional<std::string> assigned_vehicle;
  std::optional<Seconds> board_time;
  std::optional<Seconds> alight_time;
  std::optional<Seconds> cancel_time;

  bool terminal() const {
    return phase == RequestPhase::Served || phase == RequestPhase::CanceledByRider ||
           phase == RequestPhase::NoShow;
  }
};

constexpr int kMaxGroupSize = 4;

struct Request {
  std::string id;
  std::string rider_id;
  std::string zone_id;
  std::string origin_stop;
  std::string destination_stop;
  int group_size = 1;
  Seconds submit_time = 0;
  Channel channel = Channel::App;
  // Rider-initiated cancellation time, when the input schedules one.
  std::optional<Seconds> cancel_time;
  RequestState state;
};

// Zones and stops indexed by id.
struct ServiceArea {
  std::map<std::string, Zone> zones;
  std::map<std::string, VirtualStop> stops;

  Zone const& zone(std::string_view id) const;
  VirtualStop const& stop(std::string_view id) const;
  VirtualStop const* find_stop(std::string_view id) const;
  std::vector<VirtualStop const*> stops_in_zone(std::string_view zone_id) const;

  // Checks zone and stop invariants; throws Error on the first violation.
  void validate() const;
};

enum class RequestViolation { CrossZone, GroupTooLarge, EmptyGroup, DegenerateTrip, UnknownStop };

std::string_view to_string(RequestViolation v);

// Empty when the request satisfies every rule; otherwise the first violation
// found, checked in the order UnknownStop, DegenerateTrip, group size, CrossZone.
std::optional<RequestViolation> validate_request(Request const& req, ServiceArea const& area);

// Ray casting with the boundary counted as inside.
bool point_in_zone(LatLon p, Zone const& z);

// True when no two non-adjacent edges of the ring intersect.
bool is_simple_polygon(std::span<LatLon const> ring);

constexpr double kWrongLocationThresholdM = 400.0;

// Compares the vehicle's GPS fix against its reported stop. A distance above
// 400 m flags the vehicle and sets its status to WrongLocation.
bool wrong_location_check(Vehicle& v, ServiceArea const& area);

std::string_view to_string(StopKind k);
std::string_view to_string(Channel c);
std::string_view to_string(LegAction a);
std::string_view to_string(RequestPhase p);
StopKind parse_stop_kind(std::string_view s);
Channel parse_channel(std::string_view s);

}  // namespace odmts
