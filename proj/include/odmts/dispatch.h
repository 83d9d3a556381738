#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odmts/core.h"
#include "odmts/travel.h"

namespace odmts {

struct DispatchParams {
  double stretch_factor = 1.5;
  double ride_weight = 0.5;
  Seconds reaction_allowance_s = 19;  // budgeted before each instruction is acted on
  Seconds dwell_s = 30;
  Seconds rebalance_period_s = 0;  // 0 disables rebalancing
};

struct OnboardRider {
  std::string request_id;
  int group_size = 1;
  Seconds board_time = 0;
  Seconds direct_ride_s = 0;
};

// What the dispatcher needs to know about one shuttle. Routes are predicted
// from (start_stop, start_time): the stop where the vehicle next becomes free
// to act on an instruction, and when.
struct VehicleSnapshot {
  std::string id;
  std::string zone_id;
  int capacity = kDefaultCapacity;
  bool available = true;  // signed in, not removed, accepting work
  std::string start_stop;
  Seconds start_time = 0;
  bool needs_instruction = true;  // first leg waits for the reaction allowance
  std::size_t locked_legs = 0;    // leading plan legs insertions may not precede
  std::vector<OnboardRider> onboard;
  std::vector<PlanLeg> plan;

  int onboard_load() const;
};

struct Assignment {
  std::string request_id;
  std::string vehicle_id;
  std::vector<PlanLeg> plan;  // full plan after insertion, arrivals filled in
  Seconds predicted_wait = 0;
  Seconds predicted_ride = 0;
  double objective = 0.0;
  std::size_t pickup_index = 0;
  std::size_t dropoff_index = 0;
};

// Ride time when nothing else is on the route: pickup dwell, one reaction
// allowance, and the direct drive.
Seconds direct_ride_s(std::string_view origin, std::string_view destination, TravelProvider const& provider,
                      DispatchParams const& params);

struct RouteEvaluation {
  bool feasible = true;
  std::vector<Seconds> arrivals;  // per leg
  std::map<std::string, Seconds> ride;     // predicted ride per request with a dropoff in the plan
  std::map<std::string, Seconds> dropoff;  // predicted dropoff arrival per request
  std::map<std::string, Seconds> pickup;   // predicted pickup arrival per request still waiting
};

// Walks `legs` from the snapshot's start. Infeasible when the load exceeds
// capacity at any prefix or a dropoff precedes its pickup.
RouteEvaluation evaluate_route(VehicleSnapshot const& v, std::span<PlanLeg const> legs, TravelProvider const& provider,
                               DispatchParams const& params);

// Best insertion of `req` into the snapshot's plan, or empty when none is
// feasible.
std::optional<Assignment> best_insertion(Request const& req, VehicleSnapshot const& v, TravelProvider const& provider,
                                         DispatchParams const& params, Seconds now);

// Evaluates every feasible (pickup, dropoff) insertion into every available
// vehicle of the request's zone and keeps the minimum of
//   predicted_wait + ride_weight x (delay added to other requests' dropoffs).
// Ties go to the lowest vehicle id, then the earliest positions. Empty means
// the request is queued. Vehicles are evaluated in parallel.
std::optional<Assignment> assign(Request const& req, std::span<VehicleSnapshot const> fleet,
                                 TravelProvider const& provider, DispatchParams const& params, Seconds now);

// Single-threaded reference for assign().
std::optional<Assignment> assign_serial(Request const& req, std::span<VehicleSnapshot const> fleet,
                                        TravelProvider const& provider, DispatchParams const& params, Seconds now);

struct CancelOutcome {
  std::optional<std::string> vehicle_id;
  bool plan_emptied = false;  // the vehicle should be relocated to an idle stop
};

// Removes the request's legs from its vehicle and marks it CanceledByRider.
// Queued (Submitted) requests are simply marked.
CancelOutcome handle_cancel(std::string_view request_id, std::map<std::string, Request>& requests,
                            std::span<VehicleSnapshot> fleet, Seconds now);

// Idle-flagged stop of the vehicle's zone closest by drive time to
// `current_stop`; ties go to the lowest stop id.
std::string idle_relocation_target(VehicleSnapshot const& v, ServiceArea const& area,
                                   TravelProvider const& provider);

struct IdleVehicle {
  std::string id;
  std::string stop;
};

struct RebalanceCommand {
  std::string vehicle_id;
  std::string target_stop;
  friend bool operator==(RebalanceCommand const&, RebalanceCommand const&) = default;
};

// Sum over forecast stops of weight x drive time from the closest vehicle.
double weighted_pickup_time(std::span<std::string const> vehicle_stops, std::map<std::string, double> const& weights,
                            TravelProvider const& provider);

// Greedy repositioning of idle vehicles onto idle stops: repeatedly applies
// the single move with the largest strict reduction of the weighted pickup
// time, one command per vehicle at most. Issues nothing while the zone has
// queued requests.
std::vector<RebalanceCommand> rebalance(std::span<IdleVehicle const> idle, std::span<std::string const> idle_stops,
                                        std::map<std::string, double> const& weights, TravelProvider const& provider,
                                        bool zone_has_queued_requests = false);

}  // namespace odmts
