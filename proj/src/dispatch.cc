#include "odmts/dispatch.h"

#include <algorithm>
#include <exception>
#include <limits>
#include <numeric>

namespace odmts {

int VehicleSnapshot::onboard_load() const {
  return std::accumulate(onboard.begin(), onboard.end(), 0,
                         [](int acc, OnboardRider const& r) { return acc + r.group_size; });
}

Seconds direct_ride_s(std::string_view origin, std::string_view destination, TravelProvider const& provider,
                      DispatchParams const& params) {
  return params.dwell_s + params.reaction_allowance_s + provider.drive_time(origin, destination);
}

RouteEvaluation evaluate_route(VehicleSnapshot const& v, std::span<PlanLeg const> legs, TravelProvider const& provider,
                               DispatchParams const& params) {
  RouteEvaluation ev;
  ev.arrivals.reserve(legs.size());
  int load = v.onboard_load();
  std::map<std::string, Seconds> board;
  for (auto const& r : v.onboard) {
    board[r.request_id] = r.board_time;
  }
  if (load > v.capacity) {
    ev.feasible = false;
  }
  Seconds t = v.start_time;
  std::string_view pos = v.start_stop;
  for (std::size_t k = 0; k < legs.size(); ++k) {
    auto const& leg = legs[k];
    Seconds const depart = t + ((k > 0 || v.needs_instruction) ? params.reaction_allowance_s : 0);
    Seconds const arrival = depart + provider.drive_time(pos, leg.stop_id);
    ev.arrivals.push_back(arrival);
    if (leg.action == LegAction::Pickup) {
      load += leg.group_size;
      if (load > v.capacity) {
        ev.feasible = false;
      }
      board[leg.request_id] = arrival;
      ev.pickup[leg.request_id] = arrival;
    } else {
      auto const b = board.find(leg.request_id);
      if (b == board.end()) {
        ev.feasible = false;
      } else {
        ev.ride[leg.request_id] = arrival - b->second;
        ev.dropoff[leg.request_id] = arrival;
        board.erase(b);
      }
      load -= leg.group_size;
    }
    t = arrival + params.dwell_s;
    pos = leg.stop_id;
  }
  return ev;
}

std::optional<Assignment> best_insertion(Request const& req, VehicleSnapshot const& v, TravelProvider const& provider,
                                         DispatchParams const& params, Seconds now) {
  auto const base = evaluate_route(v, v.plan, provider, params);

  // Ride bound per existing request: the larger of the stretch limit and its
  // current prediction, so an insertion never worsens an already-late rider.
  std::map<std::string, double> ride_limit;
  for (auto const& r : v.onboard) {
    ride_limit[r.request_id] = params.stretch_factor * static_cast<double>(r.direct_ride_s);
  }
  std::map<std::string, std::string> pickup_stop;
  for (auto const& leg : v.plan) {
    if (leg.action == LegAction::Pickup) {
      pickup_stop[leg.request_id] = leg.stop_id;
    } else if (auto const p = pickup_stop.find(leg.request_id); p != pickup_stop.end()) {
      ride_limit[leg.request_id] =
          params.stretch_factor * static_cast<double>(direct_ride_s(p->second, leg.stop_id, provider, params));
    }
  }
  for (auto& [id, limit] : ride_limit) {
    if (auto const r = base.ride.find(id); r != base.ride.end()) {
      limit = std::max(limit, static_cast<double>(r->second));
    }
  }
  double const new_limit =
      params.stretch_factor * static_cast<double>(direct_ride_s(req.origin_stop, req.destination_stop, provider, params));

  std::optional<Assignment> best;
  auto const n = v.plan.size();
  std::vector<PlanLeg> candidate;
  candidate.reserve(n + 2);
  for (std::size_t i = std::min(v.locked_legs, n); i <= n; ++i) {
    for (std::size_t j = i; j <= n; ++j) {
      candidate.clear();
      candidate.insert(candidate.end(), v.plan.begin(), v.plan.begin() + static_cast<std::ptrdiff_t>(i));
      candidate.push_back({req.id, LegAction::Pickup, req.origin_stop, 0, req.group_size});
      candidate.insert(candidate.end(), v.plan.begin() + static_cast<std::ptrdiff_t>(i),
                       v.plan.begin() + static_cast<std::ptrdiff_t>(j));
      candidate.push_back({req.id, LegAction::Dropoff, req.destination_stop, 0, req.group_size});
      candidate.insert(candidate.end(), v.plan.begin() + static_cast<std::ptrdiff_t>(j), v.plan.end());

      auto const ev = evaluate_route(v, candidate, provider, params);
      if (!ev.feasible) {
        continue;
      }
      auto const new_ride = ev.ride.at(req.id);
      if (static_cast<double>(new_ride) > new_limit) {
        continue;
      }
      bool ok = true;
      double delay = 0.0;
      for (auto const& [id, limit] : ride_limit) {
        auto const r = ev.ride.find(id);
        if (r == ev.ride.end()) {
          continue;
        }
        if (static_cast<double>(r->second) > limit) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        continue;
      }
      for (auto const& [id, t] : base.dropoff) {
        delay += static_cast<double>(ev.dropoff.at(id) - t);
      }
      Seconds const wait = std::max<Seconds>(0, ev.pickup.at(req.id) - now);
      double const objective = static_cast<double>(wait) + params.ride_weight * delay;
      if (!best || objective < best->objective) {
        Assignment a;
        a.request_id = req.id;
        a.vehicle_id = v.id;
        a.plan = candidate;
        for (std::size_t k = 0; k < a.plan.size(); ++k) {
          a.plan[k].planned_arrival = ev.arrivals[k];
        }
        a.predicted_wait = wait;
        a.predicted_ride = new_ride;
        a.objective = objective;
        a.pickup_index = i;
        a.dropoff_index = j + 1;
        best = std::move(a);
      }
    }
  }
  return best;
}

namespace {

bool eligible(Request const& req, VehicleSnapshot const& v) { return v.available && v.zone_id == req.zone_id; }

// Strict "a is preferred over b" under the documented tie-breaking.
bool better(Assignment const& a, Assignment const& b) {
  if (a.objective != b.objective) {
    return a.objective < b.objective;
  }
  if (a.vehicle_id != b.vehicle_id) {
    return a.vehicle_id < b.vehicle_id;
  }
  if (a.pickup_index != b.pickup_index) {
    return a.pickup_index < b.pickup_index;
  }
  return a.dropoff_index < b.dropoff_index;
}

}  // namespace

std::optional<Assignment> assign_serial(Request const& req, std::span<VehicleSnapshot const> fleet,
                                        TravelProvider const& provider, DispatchParams const& params, Seconds now) {
  std::optional<Assignment> best;
  for (auto const& v : fleet) {
    if (!eligible(req, v)) {
      continue;
    }
    auto a = best_insertion(req, v, provider, params, now);
    if (a && (!best || better(*a, *best))) {
      best = std::move(a);
    }
  }
  return best;
}

std::optional<Assignment> assign(Request const& req, std::span<VehicleSnapshot const> fleet,
                                 TravelProvider const& provider, DispatchParams const& params, Seconds now) {
  std::vector<std::optional<Assignment>> per_vehicle(fleet.size());
  std::vector<std::exception_ptr> errors(fleet.size());
  auto const n = static_cast<std::int64_t>(fleet.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    auto const idx = static_cast<std::size_t>(k);
    if (!eligible(req, fleet[idx])) {
      continue;
    }
    try {
      per_vehicle[idx] = best_insertion(req, fleet[idx], provider, params, now);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto const& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  std::optional<Assignment> best;
  for (auto& a : per_vehicle) {
    if (a && (!best || better(*a, *best))) {
      best = std::move(a);
    }
  }
  return best;
}

CancelOutcome handle_cancel(std::string_view request_id, std::map<std::string, Request>& requests,
                            std::span<VehicleSnapshot> fleet, Seconds now) {
  auto const it = requests.find(std::string{request_id});
  if (it == requests.end()) {
    throw Error("UnknownRequest", "unknown request " + std::string{request_id});
  }
  auto& req = it->second;
  if (req.state.terminal()) {
    throw Error("AlreadyTerminal", "request " + req.id + " is already " + std::string{to_string(req.state.phase)});
  }
  if (req.state.phase == RequestPhase::Riding) {
    throw Error("AlreadyBoarded", "request " + req.id + " is already on board");
  }
  CancelOutcome out;
  if (req.state.assigned_vehicle) {
    for (auto& v : fleet) {
      if (v.id != *req.state.assigned_vehicle) {
        continue;
      }
      auto const before = v.plan.size();
      std::size_t removed_locked = 0;
      for (std::size_t k = 0; k < std::min(v.locked_legs, v.plan.size()); ++k) {
        removed_locked += v.plan[k].request_id == req.id;
      }
      std::erase_if(v.plan, [&](PlanLeg const& l) { return l.request_id == req.id; });
      v.locked_legs -= std::min(v.locked_legs, removed_locked);
      out.vehicle_id = v.id;
      out.plan_emptied = before > 0 && v.plan.empty() && v.onboard.empty();
      break;
    }
  }
  req.state.phase = RequestPhase::CanceledByRider;
  req.state.cancel_time = now;
  return out;
}

std::string idle_relocation_target(VehicleSnapshot const& v, ServiceArea const& area, TravelProvider const& provider) {
  if (!v.plan.empty()) {
    throw Error("PlanNotEmpty", "vehicle " + v.id + " still has planned legs");
  }
  std::optional<std::pair<Seconds, std::string>> best;
  for (auto const* s : area.stops_in_zone(v.zone_id)) {
    if (!s->is_idle_location) {
      continue;
    }
    std::pair<Seconds, std::string> cand{provider.drive_time(v.start_stop, s->id), s->id};
    if (!best || cand < *best) {
      best = std::move(cand);
    }
  }
  if (!best) {
    throw Error("NoIdleStopInZone", "zone " + v.zone_id + " has no idle location");
  }
  return best->second;
}

double weighted_pickup_time(std::span<std::string const> vehicle_stops, std::map<std::string, double> const& weights,
                            TravelProvider const& provider) {
  if (vehicle_stops.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  double total = 0.0;
  for (auto const& [stop, w] : weights) {
    if (w <= 0.0) {
      continue;
    }
    Seconds nearest = std::numeric_limits<Seconds>::max();
    for (auto const& vs : vehicle_stops) {
      nearest = std::min(nearest, provider.drive_time(vs, stop));
    }
    total += w * static_cast<double>(nearest);
  }
  return total;
}

std::vector<RebalanceCommand> rebalance(std::span<IdleVehicle const> idle_in, std::span<std::string const> idle_stops,
                                        std::map<std::string, double> const& weights, TravelProvider const& provider,
                                        bool zone_has_queued_requests) {
  for (auto const& [stop, w] : weights) {
    if (w < 0.0) {
      throw Error("ForecastInvalid", "negative forecast weight at " + stop);
    }
  }
  std::vector<RebalanceCommand> commands;
  if (zone_has_queued_requests || idle_in.empty() || idle_stops.empty()) {
    return commands;
  }
  std::vector<IdleVehicle> idle(idle_in.begin(), idle_in.end());
  std::sort(idle.begin(), idle.end(), [](auto const& a, auto const& b) { return a.id < b.id; });
  std::vector<std::string> positions;
  std::vector<bool> moved(idle.size(), false);
  for (auto const& v : idle) {
    positions.push_back(v.stop);
  }
  std::vector<std::string> targets(idle_stops.begin(), idle_stops.end());
  std::sort(targets.begin(), targets.end());

  constexpr double kMinGain = 1e-9;
  double current = weighted_pickup_time(positions, weights, provider);
  while (true) {
    std::optional<std::size_t> best_vehicle;
    std::string best_target;
    double best_value = current;
    for (std::size_t k = 0; k < idle.size(); ++k) {
      if (moved[k]) {
        continue;
      }
      auto const original = positions[k];
      for (auto const& t : targets) {
        if (t == original) {
          continue;
        }
        positions[k] = t;
        double const value = weighted_pickup_time(positions, weights, provider);
        if (value < best_value - kMinGain) {
          best_value = value;
          best_vehicle = k;
          best_target = t;
        }
      }
      positions[k] = original;
    }
    if (!best_vehicle || best_value >= current - kMinGain) {
      break;
    }
    positions[*best_vehicle] = best_target;
    moved[*best_vehicle] = true;
    current = best_value;
    commands.push_back({idle[*best_vehicle].id, best_target});
  }
  return commands;
}

}  // namespace odmts
