#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace oracle {

using namespace odmts;

namespace {

struct Eval {
  bool ok = true;
  std::map<std::string, Seconds> pickup;
  std::map<std::string, Seconds> dropoff;
  std::map<std::string, Seconds> ride;
};

Eval walk_route(VehicleSnapshot const& v, std::vector<PlanLeg> const& legs, TravelProvider const& provider,
                DispatchParams const& p) {
  Eval e;
  std::map<std::string, Seconds> boarded;
  int load = 0;
  for (auto const& r : v.onboard) {
    boarded[r.request_id] = r.board_time;
    load += r.group_size;
  }
  e.ok = load <= v.capacity;
  Seconds clock = v.start_time;
  std::string here = v.start_stop;
  bool first = true;
  for (auto const& leg : legs) {
    if (!first || v.needs_instruction) clock += p.reaction_allowance_s;
    first = false;
    clock += provider.drive_time(here, leg.stop_id);
    here = leg.stop_id;
    if (leg.action == LegAction::Pickup) {
      load += leg.group_size;
      e.ok = e.ok && load <= v.capacity;
      boarded[leg.request_id] = clock;
      e.pickup[leg.request_id] = clock;
    } else {
      auto const b = boarded.find(leg.request_id);
      if (b == boarded.end()) {
        e.ok = false;
      } else {
        e.ride[leg.request_id] = clock - b->second;
        e.dropoff[leg.request_id] = clock;
      }
      load -= leg.group_size;
    }
    clock += p.dwell_s;
  }
  return e;
}

std::optional<double> best_for_vehicle(Request const& req, VehicleSnapshot const& v, TravelProvider const& provider,
                                       DispatchParams const& p, Seconds now) {
  auto const direct = [&](std::string const& o, std::string const& d) {
    return static_cast<double>(p.dwell_s + p.reaction_allowance_s + provider.drive_time(o, d));
  };
  auto const base = walk_route(v, v.plan, provider, p);
  std::map<std::string, double> limit;
  for (auto const& r : v.onboard) limit[r.request_id] = p.stretch_factor * static_cast<double>(r.direct_ride_s);
  for (auto const& a : v.plan) {
    if (a.action != LegAction::Pickup) continue;
    for (auto const& b : v.plan) {
      if (b.action == LegAction::Dropoff && b.request_id == a.request_id) {
        limit[a.request_id] = p.stretch_factor * direct(a.stop_id, b.stop_id);
      }
    }
  }
  for (auto& [id, l] : limit) {
    if (base.ride.contains(id)) l = std::max(l, static_cast<double>(base.ride.at(id)));
  }

  std::size_t const total = v.plan.size() + 2;
  std::optional<double> best;
  // Choose the final positions of the new pickup and dropoff; the existing
  // legs fill the remaining slots in their original order.
  for (std::size_t pp = 0; pp < total; ++pp) {
    if (pp < v.locked_legs) continue;
    for (std::size_t dd = pp + 1; dd < total; ++dd) {
      std::vector<PlanLeg> legs;
      std::size_t next = 0;
      for (std::size_t slot = 0; slot < total; ++slot) {
        if (slot == pp) {
          legs.push_back({req.id, LegAction::Pickup, req.origin_stop, 0, req.group_size});
        } else if (slot == dd) {
          legs.push_back({req.id, LegAction::Dropoff, req.destination_stop, 0, req.group_size});
        } else {
          legs.push_back(v.plan[next++]);
        }
      }
      auto const e = walk_route(v, legs, provider, p);
      if (!e.ok) continue;
      if (static_cast<double>(e.ride.at(req.id)) > p.stretch_factor * direct(req.origin_stop, req.destination_stop)) {
        continue;
      }
      bool within = true;
      for (auto const& [id, l] : limit) {
        if (e.ride.contains(id) && static_cast<double>(e.ride.at(id)) > l) within = false;
      }
      if (!within) continue;
      double delay = 0.0;
      for (auto const& [id, t] : base.dropoff) delay += static_cast<double>(e.dropoff.at(id) - t);
      double const wait = static_cast<double>(std::max<Seconds>(0, e.pickup.at(req.id) - now));
      double const obj = wait + p.ride_weight * delay;
      if (!best || obj < *best) best = obj;
    }
  }
  return best;
}

}  // namespace

std::optional<double> best_objective(Request const& req, std::span<VehicleSnapshot const> fleet,
                                     TravelProvider const& provider, DispatchParams const& params, Seconds now) {
  std::optional<double> best;
  for (auto const& v : fleet) {
    if (!v.available || v.zone_id != req.zone_id) continue;
    auto const o = best_for_vehicle(req, v, provider, params, now);
    if (o && (!best || *o < *best)) best = o;
  }
  return best;
}

namespace {

struct PathSearch {
  FixedRouteFeed const& feed;
  RouterOptions const& opts;
  LatLon destination;
  Seconds horizon_end;
  std::map<std::string, LatLon> where;
  Seconds best = std::numeric_limits<Seconds>::max();

  Seconds walk(LatLon a, LatLon b) const { return walk_seconds(haversine_m(a, b), opts.walk_speed_mps); }
  bool walkable(LatLon a, LatLon b) const { return haversine_m(a, b) <= opts.max_walk_m; }

  void from_stop(std::string const& stop, Seconds ready, std::vector<bool>& used) {
    for (std::size_t t = 0; t < feed.trips.size(); ++t) {
      if (used[t]) continue;
      auto const& st = feed.trips[t].stop_times;
      for (std::size_t k = 0; k + 1 < st.size(); ++k) {
        if (st[k].stop_id != stop || st[k].departure < ready) continue;
        used[t] = true;
        for (std::size_t m = k + 1; m < st.size(); ++m) {
          if (st[m - 1].departure > horizon_end) break;
          Seconds const arr = st[m].arrival;
          LatLon const at = where.at(st[m].stop_id);
          if (walkable(at, destination)) best = std::min(best, arr + walk(at, destination));
          from_stop(st[m].stop_id, arr + opts.transfer_buffer_s, used);
          for (auto const& s : feed.stops) {
            if (s.id != st[m].stop_id && walkable(at, s.location)) {
              from_stop(s.id, arr + walk(at, s.location) + opts.transfer_buffer_s, used);
            }
          }
        }
        used[t] = false;
      }
    }
  }
};

}  // namespace

std::optional<Seconds> earliest_arrival(FixedRouteFeed const& feed, RouterOptions const& opts, LatLon origin,
                                        LatLon destination, Seconds depart) {
  if (origin == destination) return depart;
  PathSearch s{feed, opts, destination, depart + opts.horizon_s, {}};
  for (auto const& stop : feed.stops) s.where[stop.id] = stop.location;
  s.best = depart + s.walk(origin, destination);
  std::vector<bool> used(feed.trips.size(), false);
  for (auto const& stop : feed.stops) {
    if (s.walkable(origin, stop.location)) {
      s.from_stop(stop.id, depart + s.walk(origin, stop.location), used);
    }
  }
  if (s.best - depart > opts.horizon_s) return std::nullopt;
  return s.best;
}

LogNormalFit lognormal_fit(double median, double mean) {
  return {std::log(median), std::sqrt(2.0 * std::log(mean / median))};
}

}  // namespace oracle
