#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "odmts/core.h"
#include "odmts/event_log.h"
#include "odmts/router.h"
#include "odmts/travel.h"

namespace odmts {

// ---------------------------------------------------------------------------
// Trips reconstructed from a log

enum class TripOutcome { Open, Served, CanceledByRider, NoShow, EndOfService };
std::string_view to_string(TripOutcome o);

struct Trip {
  std::string request_id;
  std::string rider_id;
  std::string zone_id;
  std::string origin;
  std::string destination;
  int group_size = 1;
  Seconds submit_time = 0;
  std::optional<std::string> vehicle_id;
  std::optional<Seconds> board_time;
  std::optional<Seconds> alight_time;
  std::optional<Seconds> cancel_time;  // Canceled or NoShowReported
  TripOutcome outcome = TripOutcome::Open;

  bool served() const { return outcome == TripOutcome::Served; }
  // Rider-side cancellations: rider cancels and no-shows.
  bool is_cancellation() const {
    return outcome == TripOutcome::CanceledByRider || outcome == TripOutcome::NoShow;
  }
};

// One trip per RequestSubmitted, in submission order.
std::vector<Trip> reconstruct_trips(EventLog const& log);

// ---------------------------------------------------------------------------
// Cancellations

enum class CancellationCategory { ExactReturn, OtherReturn, RepeatedCancellations, NoReturn };
std::string_view to_string(CancellationCategory c);

inline constexpr std::array<int, 3> kThetaMinutes{15, 30, 60};

// Looks at the rider's requests submitted in [cancel_time, cancel_time + θ].
// The earliest of them that was served decides a return (Exact when its O-D
// matches, Other otherwise); without one, any further cancellation in the
// window makes it Repeated; else NoReturn.
CancellationCategory classify_cancellation(Trip const& canceled, std::span<Trip const> rider_history,
                                           int theta_min);

struct CancellationTable {
  // counts[θ][category]
  std::map<int, std::map<CancellationCategory, std::size_t>> counts;
  std::size_t total = 0;
};

CancellationTable cancellation_table(std::span<Trip const> trips,
                                     std::span<int const> thetas = kThetaMinutes);

// ---------------------------------------------------------------------------
// Survey mode hierarchy

enum class ModeCategory { Transit = 1, Auto, Active, Other, WouldNotMakeTrip };
std::string_view to_string(ModeCategory c);

// Case-insensitive; a few spelling variants are accepted. Throws UnknownMode.
ModeCategory mode_category(std::string_view mode);
// Highest-priority category among the chosen modes. Throws UnknownMode or
// EmptyResponse.
ModeCategory classify_mode_response(std::span<std::string const> modes);

// ---------------------------------------------------------------------------
// Service quality

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // population
  std::size_t n = 0;
};
MeanSd mean_sd(std::span<double const> xs);

struct HourQuality {
  MeanSd wait;
  MeanSd ride;
  MeanSd total;
};

// Served trips grouped by submit hour 6..18. Hours without trips are absent.
std::map<int, HourQuality> service_quality_profile(std::span<Trip const> trips);

enum class StopType { RailStation, BusStop, ReachOnly };
std::string_view to_string(StopType t);
StopType stop_type(VirtualStop const& s);

struct ShareTable {
  // (zone, hour) -> fractions indexed by StopType
  std::map<std::pair<std::string, int>, std::array<double, 3>> cells;
};

struct MultimodalShare {
  ShareTable origins;
  ShareTable destinations;
};

// Served trips by zone and submit hour. Throws UnknownStop.
MultimodalShare multimodal_share(std::span<Trip const> trips, ServiceArea const& area);

struct SharedMileage {
  double serving_m = 0.0;  // at least one request aboard
  double shared_m = 0.0;   // at least two distinct requests aboard
  double fraction() const { return serving_m > 0.0 ? shared_m / serving_m : 0.0; }
};

SharedMileage shared_mileage(EventLog const& log);
double shared_mileage_fraction(EventLog const& log);

// ---------------------------------------------------------------------------
// Fleet hours

struct FleetAccountingInput {
  int fleet_size = 0;
  int days = 0;
  double hours_per_day = 13.0;
  Seconds day_start_s = kServiceStart;
};

struct FleetAccounting {
  double planned_h = 0.0;
  double online_h = 0.0;
  double pct = 0.0;
  // Hours during which exactly k vehicles were online, over the service
  // windows of `days` consecutive days starting at the first logged day.
  std::map<int, double> histogram_h;
  std::map<std::string, std::map<int, double>> zone_histogram_h;
  std::map<std::string, double> zone_online_h;
};

// Throws UnpairedSignIn when sign-ins and sign-outs do not alternate.
FleetAccounting fleet_accounting(EventLog const& log, FleetAccountingInput const& in);

// ---------------------------------------------------------------------------
// Cost

struct CostModelInput {
  double cost_per_vehicle_hour = 0.0;
  int fleet_size = 0;
  double service_hours = 13.0;
  int riders_served = 0;
};

// Unrounded $/rider. Throws ZeroRiders or CostInvalid.
double cost_per_rider(CostModelInput const& in);
// Half-up rounding to cents for presentation.
double round_cents(double dollars);

struct CostTableSpec {
  std::vector<double> rates;
  std::vector<int> fleets;
  std::vector<int> riders;
  double service_hours = 13.0;
};

// Parses "lo:hi:step" (inclusive) into rates.
std::vector<double> parse_rate_range(std::string_view spec);

// Wide CSV: cost_per_vehicle_hour, then riders_<R>_fleet_<F> per column.
std::string cost_table_csv(CostTableSpec const& spec);

// ---------------------------------------------------------------------------
// Distances

struct DistanceStats {
  MeanSd km;
  double mode_km = 0.0;  // center of the fullest 0.1 km bin, ties to the lower
};

// Direct driving distance of served trips, per zone.
std::map<std::string, DistanceStats> distance_stats(std::span<Trip const> trips, TravelProvider const& provider);
DistanceStats distance_stats(std::span<double const> km);

// ---------------------------------------------------------------------------
// Fixed-route comparison

struct TripComparison {
  std::string request_id;
  std::string zone_id;
  Seconds reach_total_s = 0;
  std::optional<Seconds> fixed_total_s;  // empty: no fixed-route option
};

struct ZoneComparison {
  std::size_t trips = 0;
  std::size_t no_option = 0;
  MeanSd fixed_s;
  MeanSd reach_s;
  double better_fraction = 0.0;  // over trips with an option, strict
};

struct FixedRouteComparison {
  std::vector<TripComparison> trips;
  std::map<std::string, ZoneComparison> zones;
  ZoneComparison overall;
};

// Served trips only. A trip has no fixed-route option when the router finds
// nothing within its horizon or only the direct walk at the trip's own
// departure time. Trips are evaluated in parallel.
FixedRouteComparison compare_fixed_routes(std::span<Trip const> trips, ServiceArea const& area,
                                          FixedRouteRouter const& router, Regime regime);
FixedRouteComparison compare_fixed_routes_serial(std::span<Trip const> trips, ServiceArea const& area,
                                                 FixedRouteRouter const& router, Regime regime);

}  // namespace odmts
