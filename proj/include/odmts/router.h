#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "odmts/core.h"

namespace odmts {

enum class RouteMode { Bus, Rail };

struct TransitStop {
  std::string id;
  LatLon location;
};

struct StopTime {
  std::string stop_id;
  Seconds arrival = 0;
  Seconds departure = 0;
};

struct TransitTrip {
  std::string id;
  std::string route_id;
  RouteMode mode = RouteMode::Bus;
  std::vector<StopTime> stop_times;  // ordered by sequence
};

// Schedule-based fixed-route network: a three-file CSV subset
// (stops.csv, trips.csv, stop_times.csv).
struct FixedRouteFeed {
  std::vector<TransitStop> stops;
  std::vector<TransitTrip> trips;

  // Throws on unknown stop references or non-increasing stop times.
  void validate() const;

  static FixedRouteFeed load(std::string const& dir);
  static FixedRouteFeed from_csv_text(std::string const& stops_csv, std::string const& trips_csv,
                                      std::string const& stop_times_csv);
};

enum class Regime { AdjustedDeparture, SameDeparture };

std::string_view to_string(Regime r);

enum class LegKind { Walk, Transit, Shuttle };

struct ItineraryLeg {
  LegKind kind = LegKind::Walk;
  Seconds start = 0;
  Seconds end = 0;
  std::string from;  // stop id, or "origin"/"destination"
  std::string to;
  std::string trip_id;  // Transit legs only
};

struct Itinerary {
  std::vector<ItineraryLeg> legs;
  Seconds departure = 0;  // when the rider leaves the origin
  Seconds arrival = 0;
  Seconds total_duration = 0;
  Seconds initial_wait = 0;  // wait at the first boarding stop

  bool uses_transit() const;
};

struct RouterOptions {
  double walk_speed_mps = 1.4;
  double max_walk_m = 1500.0;
  Seconds transfer_buffer_s = 0;
  Seconds horizon_s = 3 * 3600;
};

Seconds walk_seconds(double meters, double speed_mps);

// Earliest-arrival router over a time-expanded view of the feed (connection
// scan). Walking legs: origin to a boarding stop, alighting stop to another
// boarding stop, alighting stop to the destination; each at most
// max_walk_m. A direct origin-destination walk is always an option.
class FixedRouteRouter {
public:
  FixedRouteRouter(FixedRouteFeed feed, RouterOptions opts = {});

  // Empty when nothing arrives within the horizon.
  std::optional<Itinerary> itinerary(LatLon origin, LatLon destination, Seconds depart, Regime regime) const;

  // Arrival time only, leaving the origin no earlier than `depart`.
  std::optional<Seconds> earliest_arrival(LatLon origin, LatLon destination, Seconds depart) const;

  FixedRouteFeed const& feed() const { return feed_; }
  RouterOptions const& options() const { return opts_; }

private:
  struct Connection {
    std::size_t from;
    std::size_t to;
    Seconds dep;
    Seconds arr;
    std::size_t trip;
  };
  struct Footpath {
    std::size_t to;
    Seconds seconds;
  };
  struct Search;

  Search scan(LatLon origin, LatLon destination, Seconds depart) const;
  Itinerary reconstruct(Search const& s, Seconds depart) const;

  FixedRouteFeed feed_;
  RouterOptions opts_;
  std::unordered_map<std::string, std::size_t> stop_index_;
  std::vector<Connection> connections_;
  std::vector<std::vector<Footpath>> footpaths_;
};

std::optional<Itinerary> fixed_route_itinerary(LatLon origin, LatLon destination, Seconds depart,
                                               FixedRouteFeed const& feed, Regime regime,
                                               double walk_speed_mps = 1.4);

}  // namespace odmts
