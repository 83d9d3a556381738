#pragma once

// Independent reference computations used by the tests. None of these call
// the library's algorithm under test; they only share its data types.

#include <optional>
#include <span>
#include <vector>

#include "odmts/dispatch.h"
#include "odmts/lifecycle.h"
#include "odmts/router.h"

namespace oracle {

using odmts::Seconds;

// Exhaustive dispatch: every ordering of (plan legs + new pickup + new
// dropoff) that keeps the existing legs in order, the locked prefix first,
// and pickup before dropoff, on every eligible vehicle. Returns the minimum
// objective, or empty when nothing is feasible.
std::optional<double> best_objective(odmts::Request const& req, std::span<odmts::VehicleSnapshot const> fleet,
                                     odmts::TravelProvider const& provider, odmts::DispatchParams const& params,
                                     Seconds now);

// Exhaustive path enumeration over trip segments (each trip used at most
// once) with the router's walking rules. Returns the earliest arrival or
// empty when nothing arrives within the horizon.
std::optional<Seconds> earliest_arrival(odmts::FixedRouteFeed const& feed, odmts::RouterOptions const& opts,
                                        odmts::LatLon origin, odmts::LatLon destination, Seconds depart);

// Lognormal parameters matching a target median and mean.
struct LogNormalFit {
  double mu;
  double sigma;
};
LogNormalFit lognormal_fit(double median, double mean);

}  // namespace oracle
