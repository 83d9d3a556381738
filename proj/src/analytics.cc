#include "odmts/analytics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "odmts/csv.h"

namespace odmts {

std::string_view to_string(TripOutcome o) {
  switch (o) {
    case TripOutcome::Open: return "Open";
    case TripOutcome::Served: return "Served";
    case TripOutcome::CanceledByRider: return "CanceledByRider";
    case TripOutcome::NoShow: return "NoShow";
    case TripOutcome::EndOfService: return "EndOfService";
  }
  return "?";
}

std::vector<Trip> reconstruct_trips(EventLog const& log) {
  std::vector<Trip> trips;
  std::map<std::string, std::size_t> index;
  auto find = [&](EventRecord const& e) -> Trip* {
    if (!e.request_id) return nullptr;
    auto const it = index.find(*e.request_id);
    return it == index.end() ? nullptr : &trips[it->second];
  };
  for (auto const& e : log) {
    if (e.kind == EventKind::RequestSubmitted && e.request_id) {
      Trip t;
      t.request_id = *e.request_id;
      t.rider_id = e.rider_id.value_or(t.request_id);
      t.submit_time = e.time;
      t.zone_id = e.payload.value("zone", "");
      t.origin = e.payload.value("origin", "");
      t.destination = e.payload.value("destination", "");
      t.group_size = e.payload.value("group_size", 1);
      index[t.request_id] = trips.size();
      trips.push_back(std::move(t));
      continue;
    }
    Trip* t = find(e);
    if (t == nullptr) continue;
    switch (e.kind) {
      case EventKind::Assigned: t->vehicle_id = e.vehicle_id; break;
      case EventKind::Boarded: t->board_time = e.time; break;
      case EventKind::Alighted:
        t->alight_time = e.time;
        t->outcome = TripOutcome::Served;
        break;
      case EventKind::Canceled:
        t->cancel_time = e.time;
        t->outcome = e.payload.value("reason", "rider") == "end_of_service" ? TripOutcome::EndOfService
                                                                           : TripOutcome::CanceledByRider;
        break;
      case EventKind::NoShowReported:
        t->cancel_time = e.time;
        t->outcome = TripOutcome::NoShow;
        break;
      default: break;
    }
  }
  return trips;
}

// --- cancellations ---------------------------------------------------------

std::string_view to_string(CancellationCategory c) {
  switch (c) {
    case CancellationCategory::ExactReturn: return "ExactReturn";
    case CancellationCategory::OtherReturn: return "OtherReturn";
    case CancellationCategory::RepeatedCancellations: return "RepeatedCancellations";
    case CancellationCategory::NoReturn: return "NoReturn";
  }
  return "?";
}

CancellationCategory classify_cancellation(Trip const& canceled, std::span<Trip const> rider_history, int theta_min) {
  Seconds const t0 = canceled.cancel_time.value_or(canceled.submit_time);
  Seconds const t1 = t0 + Seconds{theta_min} * 60;
  Trip const* first_served = nullptr;
  bool further_cancel = false;
  for (auto const& t : rider_history) {
    if (t.request_id == canceled.request_id || t.rider_id != canceled.rider_id) continue;
    if (t.submit_time < t0 || t.submit_time > t1) continue;
    if (t.served()) {
      if (first_served == nullptr || t.submit_time < first_served->submit_time) {
        first_served = &t;
      }
    } else if (t.is_cancellation()) {
      further_cancel = true;
    }
  }
  if (first_served != nullptr) {
    bool const same_od = first_served->origin == canceled.origin && first_served->destination == canceled.destination;
    return same_od ? CancellationCategory::ExactReturn : CancellationCategory::OtherReturn;
  }
  return further_cancel ? CancellationCategory::RepeatedCancellations : CancellationCategory::NoReturn;
}

CancellationTable cancellation_table(std::span<Trip const> trips, std::span<int const> thetas) {
  std::map<std::string, std::vector<Trip>> by_rider;
  for (auto const& t : trips) {
    by_rider[t.rider_id].push_back(t);
  }
  CancellationTable table;
  for (int const theta : thetas) {
    auto& row = table.counts[theta];
    for (auto c : {CancellationCategory::ExactReturn, CancellationCategory::OtherReturn,
                   CancellationCategory::RepeatedCancellations, CancellationCategory::NoReturn}) {
      row[c] = 0;
    }
  }
  for (auto const& t : trips) {
    if (!t.is_cancellation()) continue;
    ++table.total;
    auto const& history = by_rider.at(t.rider_id);
    for (int const theta : thetas) {
      ++table.counts[theta][classify_cancellation(t, history, theta)];
    }
  }
  return table;
}

// --- survey modes ------------------------------------------------------------

std::string_view to_string(ModeCategory c) {
  switch (c) {
    case ModeCategory::Transit: return "Transit";
    case ModeCategory::Auto: return "Auto";
    case ModeCategory::Active: return "Active";
    case ModeCategory::Other: return "Other";
    case ModeCategory::WouldNotMakeTrip: return "WouldNotMakeTrip";
  }
  return "?";
}

namespace {

// Lowercase, alphanumerics only: "Taxi / Uber / Lyft" -> "taxiuberlyft".
std::string mode_key(std::string_view s) {
  std::string out;
  for (char const c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::map<std::string, ModeCategory> const& mode_table() {
  static auto const table = [] {
    std::map<std::string, ModeCategory> m;
    auto add = [&](std::initializer_list<char const*> names, ModeCategory c) {
      for (auto const* n : names) m[mode_key(n)] = c;
    };
    add({"MARTA Bus", "Bus", "MARTA Rail", "Rail", "Train", "MARTA Mobility", "Mobility"}, ModeCategory::Transit);
    add({"Drive myself", "Ride with someone", "Taxi/Uber/Lyft", "Taxi", "Uber", "Lyft"}, ModeCategory::Auto);
    add({"Walk", "E-Scooter", "Scooter", "Bike", "Bicycle"}, ModeCategory::Active);
    add({"Other", "Others"}, ModeCategory::Other);
    add({"Would not make the trip", "Would not make trip"}, ModeCategory::WouldNotMakeTrip);
    return m;
  }();
  return table;
}

}  // namespace

ModeCategory mode_category(std::string_view mode) {
  auto const it = mode_table().find(mode_key(mode));
  if (it == mode_table().end()) {
    throw Error("UnknownMode", "unknown travel mode '" + std::string{mode} + "'");
  }
  return it->second;
}

ModeCategory classify_mode_response(std::span<std::string const> modes) {
  if (modes.empty()) {
    throw Error("EmptyResponse", "a survey response needs at least one mode");
  }
  auto best = ModeCategory::WouldNotMakeTrip;
  for (auto const& m : modes) {
    best = std::min(best, mode_category(m));
  }
  return best;
}

// --- service quality ---------------------------------------------------------

MeanSd mean_sd(std::span<double const> xs) {
  MeanSd r;
  r.n = xs.size();
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double const x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double const x : xs) ss += (x - r.mean) * (x - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(xs.size()));
  return r;
}

std::map<int, HourQuality> service_quality_profile(std::span<Trip const> trips) {
  struct Acc {
    std::vector<double> wait, ride, total;
  };
  std::map<int, Acc> acc;
  for (auto const& t : trips) {
    if (!t.served() || !t.board_time || !t.alight_time) continue;
    int const h = hour_of_day(t.submit_time);
    if (h < 6 || h > 18) continue;
    auto& a = acc[h];
    a.wait.push_back(static_cast<double>(*t.board_time - t.submit_time));
    a.ride.push_back(static_cast<double>(*t.alight_time - *t.board_time));
    a.total.push_back(static_cast<double>(*t.alight_time - t.submit_time));
  }
  std::map<int, HourQuality> out;
  for (auto const& [h, a] : acc) {
    out[h] = {mean_sd(a.wait), mean_sd(a.ride), mean_sd(a.total)};
  }
  return out;
}

std::string_view to_string(StopType t) {
  switch (t) {
    case StopType::RailStation: return "RailStation";
    case StopType::BusStop: return "BusStop";
    case StopType::ReachOnly: return "ReachOnly";
  }
  return "?";
}

StopType stop_type(VirtualStop const& s) {
  if (s.is_rail_station) return StopType::RailStation;
  return s.kind == StopKind::ExistingTransitStop ? StopType::BusStop : StopType::ReachOnly;
}

MultimodalShare multimodal_share(std::span<Trip const> trips, ServiceArea const& area) {
  std::map<std::pair<std::string, int>, std::array<double, 3>> o_counts, d_counts;
  auto type_of = [&](std::string const& id) {
    auto const* s = area.find_stop(id);
    if (s == nullptr) throw Error("UnknownStop", "trip references unknown stop " + id);
    return static_cast<std::size_t>(stop_type(*s));
  };
  for (auto const& t : trips) {
    if (!t.served()) continue;
    std::pair key{t.zone_id, hour_of_day(t.submit_time)};
    o_counts[key][type_of(t.origin)] += 1.0;
    d_counts[key][type_of(t.destination)] += 1.0;
  }
  auto normalize = [](auto const& counts) {
    ShareTable table;
    for (auto const& [key, c] : counts) {
      double const n = c[0] + c[1] + c[2];
      table.cells[key] = {c[0] / n, c[1] / n, c[2] / n};
    }
    return table;
  };
  return {normalize(o_counts), normalize(d_counts)};
}

SharedMileage shared_mileage(EventLog const& log) {
  SharedMileage m;
  for (auto const& e : log) {
    if (e.kind != EventKind::DriverResponded) continue;
    double const meters = e.payload.value("meters", 0.0);
    std::set<std::string> aboard;
    if (auto const it = e.payload.find("onboard"); it != e.payload.end()) {
      for (auto const& id : *it) aboard.insert(id.get<std::string>());
    }
    if (!aboard.empty()) m.serving_m += meters;
    if (aboard.size() >= 2) m.shared_m += meters;
  }
  return m;
}

double shared_mileage_fraction(EventLog const& log) { return shared_mileage(log).fraction(); }

// --- fleet hours -------------------------------------------------------------

FleetAccounting fleet_accounting(EventLog const& log, FleetAccountingInput const& in) {
  struct Interval {
    std::string zone;
    Seconds from, to;
  };
  std::vector<Interval> intervals;
  std::map<std::string, std::pair<Seconds, std::string>> open;
  std::map<std::string, std::string> zone_of;
  std::optional<Seconds> first_time;
  for (auto const& e : log) {
    if (e.kind != EventKind::SignIn && e.kind != EventKind::SignOut) continue;
    if (!e.vehicle_id) throw Error("UnpairedSignIn", "sign event without a vehicle");
    auto const& v = *e.vehicle_id;
    if (!first_time) first_time = e.time;
    if (e.kind == EventKind::SignIn) {
      if (open.contains(v)) throw Error("UnpairedSignIn", "vehicle " + v + " signed in twice");
      std::string zone = e.payload.value("zone", "");
      zone_of[v] = zone;
      open[v] = {e.time, zone};
    } else {
      auto const it = open.find(v);
      if (it == open.end()) throw Error("UnpairedSignIn", "vehicle " + v + " signed out without signing in");
      intervals.push_back({it->second.second, it->second.first, e.time});
      open.erase(it);
    }
  }
  if (!open.empty()) {
    throw Error("UnpairedSignIn", "vehicle " + open.begin()->first + " never signed out");
  }

  FleetAccounting out;
  out.planned_h = static_cast<double>(in.days) * in.fleet_size * in.hours_per_day;
  Seconds online_s = 0;
  for (auto const& iv : intervals) {
    online_s += iv.to - iv.from;
    out.zone_online_h[iv.zone] += static_cast<double>(iv.to - iv.from) / 3600.0;
  }
  out.online_h = static_cast<double>(online_s) / 3600.0;
  out.pct = out.planned_h > 0.0 ? 100.0 * out.online_h / out.planned_h : 0.0;

  // Sweep the service windows, counting vehicles online.
  Seconds const first_day = first_time ? *first_time / kSecondsPerDay : 0;
  auto const window_len = static_cast<Seconds>(std::llround(in.hours_per_day * 3600.0));
  auto sweep = [&](std::optional<std::string> const& zone) {
    std::map<int, double> hist;
    for (int d = 0; d < in.days; ++d) {
      Seconds const w0 = (first_day + d) * kSecondsPerDay + in.day_start_s;
      Seconds const w1 = w0 + window_len;
      std::vector<std::pair<Seconds, int>> deltas;
      for (auto const& iv : intervals) {
        if (zone && iv.zone != *zone) continue;
        Seconds const a = std::max(iv.from, w0);
        Seconds const b = std::min(iv.to, w1);
        if (a < b) {
          deltas.emplace_back(a, +1);
          deltas.emplace_back(b, -1);
        }
      }
      std::sort(deltas.begin(), deltas.end());
      int k = 0;
      Seconds t = w0;
      for (auto const& [at, dk] : deltas) {
        if (at > t) hist[k] += static_cast<double>(at - t) / 3600.0;
        t = at;
        k += dk;
      }
      if (w1 > t) hist[k] += static_cast<double>(w1 - t) / 3600.0;
    }
    return hist;
  };
  out.histogram_h = sweep(std::nullopt);
  std::set<std::string> zones;
  for (auto const& [v, z] : zone_of) zones.insert(z);
  for (auto const& z : zones) out.zone_histogram_h[z] = sweep(z);
  return out;
}

// --- cost ------------------------------------------------------------------

double cost_per_rider(CostModelInput const& in) {
  if (in.riders_served <= 0) {
    throw Error("ZeroRiders", "riders_served must be positive");
  }
  if (!(in.cost_per_vehicle_hour > 0.0) || in.fleet_size <= 0 || !(in.service_hours > 0.0)) {
    throw Error("CostInvalid", "cost inputs must be positive");
  }
  return in.cost_per_vehicle_hour * in.service_hours * in.fleet_size / in.riders_served;
}

double round_cents(double dollars) { return std::floor(dollars * 100.0 + 0.5 + 1e-9) / 100.0; }

std::vector<double> parse_rate_range(std::string_view spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto const colon = spec.find(':', start);
    auto const end = colon == std::string_view::npos ? spec.size() : colon;
    parts.push_back(csv::to_double(spec.substr(start, end - start), "rates"));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw Error("ParseError", "rates must be lo:hi:step with lo <= hi and step > 0");
  }
  std::vector<double> rates;
  auto const n = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (int k = 0; k <= n; ++k) rates.push_back(parts[0] + k * parts[2]);
  return rates;
}

std::string cost_table_csv(CostTableSpec const& spec) {
  std::ostringstream os;
  os << "cost_per_vehicle_hour";
  for (int const r : spec.riders) {
    for (int const f : spec.fleets) os << ",riders_" << r << "_fleet_" << f;
  }
  os << '\n';
  char buf[32];
  for (double const rate : spec.rates) {
    std::snprintf(buf, sizeof buf, "%g", rate);
    os << buf;
    for (int const r : spec.riders) {
      for (int const f : spec.fleets) {
        std::snprintf(buf, sizeof buf, "%.2f", round_cents(cost_per_rider({rate, f, spec.service_hours, r})));
        os << ',' << buf;
      }
    }
    os << '\n';
  }
  return os.str();
}

// --- distances ---------------------------------------------------------------

DistanceStats distance_stats(std::span<double const> km) {
  DistanceStats s;
  s.km = mean_sd(km);
  std::map<long long, std::size_t> bins;
  for (double const x : km) ++bins[static_cast<long long>(std::floor(x * 10.0 + 0.5 + 1e-9))];
  std::size_t best = 0;
  for (auto const& [bin, n] : bins) {
    if (n > best) {  // map order: ties keep the lower bin
      best = n;
      s.mode_km = static_cast<double>(bin) / 10.0;
    }
  }
  return s;
}

std::map<std::string, DistanceStats> distance_stats(std::span<Trip const> trips, TravelProvider const& provider) {
  std::map<std::string, std::vector<double>> km;
  for (auto const& t : trips) {
    if (t.served()) km[t.zone_id].push_back(provider.drive_distance(t.origin, t.destination) / 1000.0);
  }
  std::map<std::string, DistanceStats> out;
  for (auto const& [zone, xs] : km) out[zone] = distance_stats(xs);
  return out;
}

// --- fixed-route comparison ----------------------------------------------------

namespace {

TripComparison compare_one(Trip const& t, ServiceArea const& area, FixedRouteRouter const& router, Regime regime) {
  TripComparison c{t.request_id, t.zone_id, *t.alight_time - t.submit_time, std::nullopt};
  auto const* o = area.find_stop(t.origin);
  auto const* d = area.find_stop(t.destination);
  if (o == nullptr || d == nullptr) {
    throw Error("UnknownStop", "trip " + t.request_id + " references an unknown stop");
  }
  auto const same = router.itinerary(o->location, d->location, t.submit_time, Regime::SameDeparture);
  if (!same || !same->uses_transit()) {
    return c;
  }
  if (regime == Regime::SameDeparture) {
    c.fixed_total_s = same->total_duration;
  } else {
    auto const adj = router.itinerary(o->location, d->location, t.submit_time, Regime::AdjustedDeparture);
    c.fixed_total_s = adj ? std::min(adj->total_duration, same->total_duration) : same->total_duration;
  }
  return c;
}

FixedRouteComparison summarize(std::vector<TripComparison> trips) {
  FixedRouteComparison out;
  struct Acc {
    std::vector<double> fixed, reach;
    std::size_t better = 0;
  };
  std::map<std::string, Acc> acc;
  Acc all;
  auto fold = [](ZoneComparison& z, Acc const& a) {
    z.fixed_s = mean_sd(a.fixed);
    z.reach_s = mean_sd(a.reach);
    z.better_fraction = a.fixed.empty() ? 0.0 : static_cast<double>(a.better) / static_cast<double>(a.fixed.size());
  };
  for (auto const& c : trips) {
    auto& z = out.zones[c.zone_id];
    ++z.trips;
    ++out.overall.trips;
    if (!c.fixed_total_s) {
      ++z.no_option;
      ++out.overall.no_option;
      continue;
    }
    for (Acc* a : {&acc[c.zone_id], &all}) {
      a->fixed.push_back(static_cast<double>(*c.fixed_total_s));
      a->reach.push_back(static_cast<double>(c.reach_total_s));
      a->better += c.reach_total_s < *c.fixed_total_s ? 1 : 0;
    }
  }
  for (auto& [zone, z] : out.zones) fold(z, acc[zone]);
  fold(out.overall, all);
  out.trips = std::move(trips);
  return out;
}

std::vector<Trip const*> served_trips(std::span<Trip const> trips) {
  std::vector<Trip const*> out;
  for (auto const& t : trips) {
    if (t.served() && t.alight_time) out.push_back(&t);
  }
  return out;
}

}  // namespace

FixedRouteComparison compare_fixed_routes(std::span<Trip const> trips, ServiceArea const& area,
                                          FixedRouteRouter const& router, Regime regime) {
  auto const served = served_trips(trips);
  std::vector<TripComparison> out(served.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(served.size()); ++k) {
    try {
      out[k] = compare_one(*served[k], area, router, regime);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(std::move(out));
}

FixedRouteComparison compare_fixed_routes_serial(std::span<Trip const> trips, ServiceArea const& area,
                                                 FixedRouteRouter const& router, Regime regime) {
  std::vector<TripComparison> out;
  for (auto const* t : served_trips(trips)) out.push_back(compare_one(*t, area, router, regime));
  return summarize(std::move(out));
}

}  // namespace odmts
