#include "odmts/router.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "odmts/csv.h"

namespace odmts {

namespace {

constexpr Seconds kInf = std::numeric_limits<Seconds>::max() / 4;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

RouteMode parse_route_mode(std::string const& s) {
  if (s == "Bus" || s == "bus") return RouteMode::Bus;
  if (s == "Rail" || s == "rail") return RouteMode::Rail;
  throw Error("ParseError", "unknown route mode " + s);
}

FixedRouteFeed feed_from_tables(csv::Table const& stops, csv::Table const& trips, csv::Table const& stop_times) {
  FixedRouteFeed feed;
  for (std::size_t i = 0; i < stops.rows(); ++i) {
    feed.stops.push_back({stops.get(i, "stop_id"), {stops.get_double(i, "lat"), stops.get_double(i, "lon")}});
  }
  std::unordered_map<std::string, std::size_t> trip_index;
  for (std::size_t i = 0; i < trips.rows(); ++i) {
    TransitTrip t;
    t.id = trips.get(i, "trip_id");
    t.route_id = trips.get(i, "route_id");
    t.mode = parse_route_mode(trips.get(i, "mode"));
    if (!trip_index.emplace(t.id, feed.trips.size()).second) {
      throw Error("DuplicateId", "duplicate trip id " + t.id);
    }
    feed.trips.push_back(std::move(t));
  }
  std::vector<std::vector<std::pair<std::int64_t, StopTime>>> by_trip(feed.trips.size());
  for (std::size_t i = 0; i < stop_times.rows(); ++i) {
    auto const& trip_id = stop_times.get(i, "trip_id");
    auto const it = trip_index.find(trip_id);
    if (it == trip_index.end()) {
      throw Error("UnknownTrip", "stop_times references unknown trip " + trip_id);
    }
    by_trip[it->second].emplace_back(
        stop_times.get_int(i, "seq"),
        StopTime{stop_times.get(i, "stop_id"), stop_times.get_int(i, "arrival_s"), stop_times.get_int(i, "departure_s")});
  }
  for (std::size_t t = 0; t < by_trip.size(); ++t) {
    auto& rows = by_trip[t];
    std::stable_sort(rows.begin(), rows.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
    for (auto& [seq, st] : rows) {
      feed.trips[t].stop_times.push_back(std::move(st));
    }
  }
  feed.validate();
  return feed;
}

}  // namespace

std::string_view to_string(Regime r) {
  return r == Regime::AdjustedDeparture ? "AdjustedDeparture" : "SameDeparture";
}

bool Itinerary::uses_transit() const {
  return std::any_of(legs.begin(), legs.end(), [](auto const& l) { return l.kind == LegKind::Transit; });
}

Seconds walk_seconds(double meters, double speed_mps) {
  return static_cast<Seconds>(std::llround(meters / speed_mps));
}

void FixedRouteFeed::validate() const {
  std::unordered_map<std::string, std::size_t> ids;
  for (auto const& s : stops) {
    if (!ids.emplace(s.id, 0).second) {
      throw Error("DuplicateId", "duplicate transit stop " + s.id);
    }
  }
  for (auto const& t : trips) {
    Seconds last = std::numeric_limits<Seconds>::min();
    for (auto const& st : t.stop_times) {
      if (!ids.contains(st.stop_id)) {
        throw Error("UnknownStop", "trip " + t.id + " references unknown stop " + st.stop_id);
      }
      if (st.arrival > st.departure || st.arrival <= last) {
        throw Error("FeedInvalid", "trip " + t.id + " stop times are not strictly increasing at " + st.stop_id);
      }
      last = st.departure;
    }
  }
}

FixedRouteFeed FixedRouteFeed::load(std::string const& dir) {
  namespace fs = std::filesystem;
  fs::path const base{dir};
  if (!fs::is_directory(base)) {
    throw IoError("feed directory not found: " + dir);
  }
  return feed_from_tables(csv::Table::load((base / "stops.csv").string()),
                          csv::Table::load((base / "trips.csv").string()),
                          csv::Table::load((base / "stop_times.csv").string()));
}

FixedRouteFeed FixedRouteFeed::from_csv_text(std::string const& stops_csv, std::string const& trips_csv,
                                             std::string const& stop_times_csv) {
  return feed_from_tables(csv::Table::parse(stops_csv, "stops.csv"), csv::Table::parse(trips_csv, "trips.csv"),
                          csv::Table::parse(stop_times_csv, "stop_times.csv"));
}

struct FixedRouteRouter::Search {
  struct ReadyPred {
    bool access = true;
    std::size_t from_stop = kNone;  // alighting stop for transfers
    Seconds alight_time = 0;
    Seconds walk = 0;
  };
  struct VehiclePred {
    std::size_t board_conn = kNone;
    std::size_t alight_conn = kNone;
  };

  Seconds depart = 0;
  std::vector<Seconds> ready;
  std::vector<ReadyPred> ready_pred;
  std::vector<Seconds> vehicle_arrival;
  std::vector<VehiclePred> vehicle_pred;
  std::vector<Seconds> access_walk;
  std::vector<Seconds> egress_walk;  // kInf when out of range
  Seconds direct_walk = kInf;
  Seconds best = kInf;
  std::size_t best_stop = kNone;  // kNone: direct walk
};

FixedRouteRouter::FixedRouteRouter(FixedRouteFeed feed, RouterOptions opts) : feed_(std::move(feed)), opts_(opts) {
  if (!(opts_.walk_speed_mps > 0.0)) {
    throw Error("RouterInvalid", "walk speed must be positive");
  }
  feed_.validate();
  for (std::size_t i = 0; i < feed_.stops.size(); ++i) {
    stop_index_.emplace(feed_.stops[i].id, i);
  }
  for (std::size_t t = 0; t < feed_.trips.size(); ++t) {
    auto const& st = feed_.trips[t].stop_times;
    for (std::size_t k = 0; k + 1 < st.size(); ++k) {
      connections_.push_back(
          {stop_index_.at(st[k].stop_id), stop_index_.at(st[k + 1].stop_id), st[k].departure, st[k + 1].arrival, t});
    }
  }
  std::stable_sort(connections_.begin(), connections_.end(), [](Connection const& a, Connection const& b) {
    return a.dep != b.dep ? a.dep < b.dep : a.trip < b.trip;
  });
  auto const n = feed_.stops.size();
  footpaths_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        continue;
      }
      double const m = haversine_m(feed_.stops[i].location, feed_.stops[j].location);
      if (m <= opts_.max_walk_m) {
        footpaths_[i].push_back({j, walk_seconds(m, opts_.walk_speed_mps)});
      }
    }
  }
}

FixedRouteRouter::Search FixedRouteRouter::scan(LatLon origin, LatLon destination, Seconds depart) const {
  auto const n = feed_.stops.size();
  Search s;
  s.depart = depart;
  s.ready.assign(n, kInf);
  s.ready_pred.assign(n, {});
  s.vehicle_arrival.assign(n, kInf);
  s.vehicle_pred.assign(n, {});
  s.access_walk.assign(n, kInf);
  s.egress_walk.assign(n, kInf);

  s.direct_walk = walk_seconds(haversine_m(origin, destination), opts_.walk_speed_mps);
  s.best = depart + s.direct_walk;

  for (std::size_t i = 0; i < n; ++i) {
    double const a = haversine_m(origin, feed_.stops[i].location);
    if (a <= opts_.max_walk_m) {
      s.access_walk[i] = walk_seconds(a, opts_.walk_speed_mps);
      s.ready[i] = depart + s.access_walk[i];
    }
    double const e = haversine_m(feed_.stops[i].location, destination);
    if (e <= opts_.max_walk_m) {
      s.egress_walk[i] = walk_seconds(e, opts_.walk_speed_mps);
    }
  }

  std::vector<std::size_t> trip_board(feed_.trips.size(), kNone);
  auto const first = std::lower_bound(connections_.begin(), connections_.end(), depart,
                                      [](Connection const& c, Seconds t) { return c.dep < t; });
  Seconds const horizon_end = depart + opts_.horizon_s;
  for (auto it = first; it != connections_.end(); ++it) {
    auto const& c = *it;
    if (c.dep >= s.best || c.dep > horizon_end) {
      break;
    }
    auto const ci = static_cast<std::size_t>(it - connections_.begin());
    if (trip_board[c.trip] == kNone) {
      if (s.ready[c.from] > c.dep) {
        continue;
      }
      trip_board[c.trip] = ci;
    }
    if (c.arr >= s.vehicle_arrival[c.to]) {
      continue;
    }
    s.vehicle_arrival[c.to] = c.arr;
    s.vehicle_pred[c.to] = {trip_board[c.trip], ci};
    if (s.egress_walk[c.to] < kInf && c.arr + s.egress_walk[c.to] < s.best) {
      s.best = c.arr + s.egress_walk[c.to];
      s.best_stop = c.to;
    }
    Seconds const here = c.arr + opts_.transfer_buffer_s;
    if (here < s.ready[c.to]) {
      s.ready[c.to] = here;
      s.ready_pred[c.to] = {false, c.to, c.arr, 0};
    }
    for (auto const& fp : footpaths_[c.to]) {
      Seconds const t = c.arr + fp.seconds + opts_.transfer_buffer_s;
      if (t < s.ready[fp.to]) {
        s.ready[fp.to] = t;
        s.ready_pred[fp.to] = {false, c.to, c.arr, fp.seconds};
      }
    }
  }
  return s;
}

Itinerary FixedRouteRouter::reconstruct(Search const& s, Seconds depart) const {
  Itinerary it;
  it.departure = depart;
  it.arrival = s.best;
  it.total_duration = s.best - depart;
  if (s.best_stop == kNone) {
    it.legs.push_back({LegKind::Walk, depart, depart + s.direct_walk, "origin", "destination", {}});
    return it;
  }
  std::vector<ItineraryLeg> rev;
  auto stop = s.best_stop;
  rev.push_back({LegKind::Walk, s.vehicle_arrival[stop], s.vehicle_arrival[stop] + s.egress_walk[stop],
                 feed_.stops[stop].id, "destination", {}});
  while (true) {
    auto const& vp = s.vehicle_pred[stop];
    auto const& board = connections_[vp.board_conn];
    auto const& alight = connections_[vp.alight_conn];
    rev.push_back({LegKind::Transit, board.dep, alight.arr, feed_.stops[board.from].id, feed_.stops[alight.to].id,
                   feed_.trips[board.trip].id});
    auto const& rp = s.ready_pred[board.from];
    if (rp.access) {
      rev.push_back({LegKind::Walk, depart, depart + s.access_walk[board.from], "origin",
                     feed_.stops[board.from].id, {}});
      break;
    }
    if (rp.from_stop != board.from) {
      rev.push_back({LegKind::Walk, rp.alight_time, rp.alight_time + rp.walk, feed_.stops[rp.from_stop].id,
                     feed_.stops[board.from].id, {}});
    }
    stop = rp.from_stop;
  }
  it.legs.assign(rev.rbegin(), rev.rend());
  auto const first_transit = std::find_if(it.legs.begin(), it.legs.end(),
                                          [](auto const& l) { return l.kind == LegKind::Transit; });
  it.initial_wait = first_transit->start - it.legs.front().end;
  return it;
}

std::optional<Seconds> FixedRouteRouter::earliest_arrival(LatLon origin, LatLon destination, Seconds depart) const {
  if (origin == destination) {
    return depart;
  }
  auto const s = scan(origin, destination, depart);
  if (s.best - depart > opts_.horizon_s) {
    return std::nullopt;
  }
  return s.best;
}

std::optional<Itinerary> FixedRouteRouter::itinerary(LatLon origin, LatLon destination, Seconds depart,
                                                     Regime regime) const {
  if (origin == destination) {
    Itinerary it;
    it.departure = it.arrival = depart;
    return it;
  }
  auto const same = scan(origin, destination, depart);
  if (same.best - depart > opts_.horizon_s) {
    return std::nullopt;
  }
  if (regime == Regime::SameDeparture) {
    return reconstruct(same, depart);
  }

  // Latest departure that still reaches the destination by the same arrival.
  // Every option's latest start is a boarding departure minus the access walk,
  // or the arrival minus the direct walk; arrival is monotone in departure.
  Seconds const target = same.best;
  std::vector<Seconds> candidates{depart};
  if (target - same.direct_walk >= depart) {
    candidates.push_back(target - same.direct_walk);
  }
  for (auto const& c : connections_) {
    if (same.access_walk[c.from] < kInf && c.dep - same.access_walk[c.from] >= depart && c.dep < target) {
      candidates.push_back(c.dep - same.access_walk[c.from]);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0;  // arrives by target
  std::size_t hi = candidates.size();
  while (hi - lo > 1) {
    auto const mid = lo + (hi - lo) / 2;
    if (scan(origin, destination, candidates[mid]).best <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  auto const latest = candidates[lo];
  auto adjusted = reconstruct(scan(origin, destination, latest), latest);
  return adjusted;
}

std::optional<Itinerary> fixed_route_itinerary(LatLon origin, LatLon destination, Seconds depart,
                                               FixedRouteFeed const& feed, Regime regime, double walk_speed_mps) {
  RouterOptions opts;
  opts.walk_speed_mps = walk_speed_mps;
  return FixedRouteRouter{feed, opts}.itinerary(origin, destination, depart, regime);
}

}  // namespace odmts
