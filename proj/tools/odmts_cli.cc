// odmts: simulate, analyze, compare-fixed, cost-table, validate.
// Exit codes: 0 ok, 1 validation error (one JSON line on stderr), 2 I/O failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "odmts/analytics.h"
#include "odmts/csv.h"
#include "odmts/io.h"
#include "odmts/router.h"
#include "odmts/scenario.h"
#include "odmts/simulator.h"

namespace fs = std::filesystem;
using namespace odmts;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<Seconds> dwell_s;
  std::optional<double> stretch_factor;
  std::optional<Seconds> removal_threshold_s;
};

void apply(Overrides const& o, Scenario& s) {
  if (o.seed) s.seed = *o.seed;
  if (o.dwell_s) s.dispatch.dwell_s = *o.dwell_s;
  if (o.stretch_factor) s.dispatch.stretch_factor = *o.stretch_factor;
  if (o.removal_threshold_s) s.removal = RemovalPolicy{{{*o.removal_threshold_s, 0}}};
}

void ensure_dir(std::string const& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_file(fs::path const& path, std::string const& text) {
  std::ofstream out{path, std::ios::binary};
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int cmd_validate(std::string const& scenario_path) {
  auto const s = Scenario::load(scenario_path);
  s.validate();
  std::cout << nlohmann::json{{"ok", true},
                              {"zones", s.area.zones.size()},
                              {"stops", s.area.stops.size()},
                              {"vehicles", s.vehicles.size()},
                              {"requests", s.requests.size()}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_simulate(std::string const& scenario_path, std::string const& out_path, std::string const& summary_path,
                 Overrides const& o) {
  auto s = Scenario::load(scenario_path);
  apply(o, s);
  auto const result = run(s);
  auto const parent = fs::path{out_path}.parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  result.log.save(out_path);
  if (!summary_path.empty()) write_file(summary_path, result.summary.to_json().dump(2) + "\n");
  std::cout << result.summary.to_json().dump() << '\n';
  return 0;
}

struct AnalyzeArgs {
  std::string events;
  std::string stops;
  std::string report = "report";
  std::string feed;
  std::string matrix;
  double walk_speed = 1.4;
  int fleet_size = 0;
  int days = 0;
  double hours_per_day = 13.0;
  double speed_mps = 10.0;
  double detour = 1.3;
};

nlohmann::json comparison_json(FixedRouteComparison const& c) {
  auto zone = [](ZoneComparison const& z) {
    return nlohmann::json{{"trips", z.trips},
                          {"no_option", z.no_option},
                          {"fixed_mean_s", z.fixed_s.mean},
                          {"fixed_sd_s", z.fixed_s.sd},
                          {"reach_mean_s", z.reach_s.mean},
                          {"reach_sd_s", z.reach_s.sd},
                          {"better_fraction", z.better_fraction}};
  };
  nlohmann::json j{{"overall", zone(c.overall)}, {"zones", nlohmann::json::object()}};
  for (auto const& [id, z] : c.zones) j["zones"][id] = zone(z);
  return j;
}

std::string comparison_csv(FixedRouteComparison const& same, FixedRouteComparison const& adjusted) {
  std::ostringstream os;
  os << "request_id,zone,reach_total_s,fixed_same_s,fixed_adjusted_s\n";
  for (std::size_t k = 0; k < same.trips.size(); ++k) {
    auto const& a = same.trips[k];
    auto const& b = adjusted.trips[k];
    os << a.request_id << ',' << a.zone_id << ',' << a.reach_total_s << ','
       << (a.fixed_total_s ? std::to_string(*a.fixed_total_s) : "") << ','
       << (b.fixed_total_s ? std::to_string(*b.fixed_total_s) : "") << '\n';
  }
  return os.str();
}

int cmd_compare(std::string const& events, std::string const& stops, std::string const& feed_dir,
                std::string const& report, double walk_speed) {
  auto const log = EventLog::load(events);
  auto const area = load_service_area(stops);
  FixedRouteRouter router{FixedRouteFeed::load(feed_dir), RouterOptions{.walk_speed_mps = walk_speed}};
  auto const trips = reconstruct_trips(log);
  auto const same = compare_fixed_routes(trips, area, router, Regime::SameDeparture);
  auto const adjusted = compare_fixed_routes(trips, area, router, Regime::AdjustedDeparture);
  nlohmann::json j{{"SameDeparture", comparison_json(same)}, {"AdjustedDeparture", comparison_json(adjusted)}};
  ensure_dir(report);
  write_file(fs::path{report} / "fixed_route.csv", comparison_csv(same, adjusted));
  write_file(fs::path{report} / "fixed_route.json", j.dump(2) + "\n");
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_analyze(AnalyzeArgs const& a) {
  auto const log = EventLog::load(a.events);
  auto const area = load_service_area(a.stops);
  auto const provider = a.matrix.empty() ? TravelProvider::synthetic_grid(area, a.speed_mps, a.detour)
                                         : TravelProvider::load_matrix_csv(a.matrix);
  auto const trips = reconstruct_trips(log);
  ensure_dir(a.report);
  fs::path const dir{a.report};
  nlohmann::json summary;

  std::size_t served = 0;
  for (auto const& t : trips) served += t.served() ? 1 : 0;
  summary["requests"] = trips.size();
  summary["served"] = served;

  {
    std::ostringstream os;
    os << "hour,trips,wait_mean_s,wait_sd_s,ride_mean_s,ride_sd_s,total_mean_s,total_sd_s\n";
    for (auto const& [h, q] : service_quality_profile(trips)) {
      os << h << ',' << q.wait.n << ',' << fmt(q.wait.mean) << ',' << fmt(q.wait.sd) << ',' << fmt(q.ride.mean) << ','
         << fmt(q.ride.sd) << ',' << fmt(q.total.mean) << ',' << fmt(q.total.sd) << '\n';
    }
    write_file(dir / "service_quality.csv", os.str());
  }
  {
    auto const table = cancellation_table(trips);
    std::ostringstream os;
    os << "theta_min,ExactReturn,OtherReturn,RepeatedCancellations,NoReturn,total\n";
    nlohmann::json j;
    for (auto const& [theta, row] : table.counts) {
      os << theta;
      for (auto const& [cat, n] : row) {
        os << ',' << n;
        j[std::to_string(theta)][std::string{to_string(cat)}] = n;
      }
      os << ',' << table.total << '\n';
    }
    write_file(dir / "cancellations.csv", os.str());
    summary["cancellations"] = j;
    summary["cancellations_total"] = table.total;
  }
  {
    auto const share = multimodal_share(trips, area);
    auto write_share = [&](ShareTable const& t, char const* name) {
      std::ostringstream os;
      os << "zone,hour,RailStation,BusStop,ReachOnly\n";
      for (auto const& [key, f] : t.cells) {
        os << key.first << ',' << key.second << ',' << fmt(f[0]) << ',' << fmt(f[1]) << ',' << fmt(f[2]) << '\n';
      }
      write_file(dir / name, os.str());
    };
    write_share(share.origins, "multimodal_origins.csv");
    write_share(share.destinations, "multimodal_destinations.csv");
  }
  {
    auto const m = shared_mileage(log);
    summary["serving_km"] = m.serving_m / 1000.0;
    summary["shared_km"] = m.shared_m / 1000.0;
    summary["shared_mileage_fraction"] = m.fraction();
  }
  {
    std::ostringstream os;
    os << "zone,trips,mean_km,sd_km,mode_km\n";
    for (auto const& [zone, d] : distance_stats(trips, provider)) {
      os << zone << ',' << d.km.n << ',' << fmt(d.km.mean) << ',' << fmt(d.km.sd) << ',' << fmt(d.mode_km) << '\n';
      summary["distance"][zone] = {{"mean_km", d.km.mean}, {"sd_km", d.km.sd}, {"mode_km", d.mode_km}};
    }
    write_file(dir / "distances.csv", os.str());
  }
  {
    auto const f = fleet_accounting(log, {a.fleet_size, a.days, a.hours_per_day});
    std::ostringstream os;
    os << "zone,vehicles_online,hours\n";
    for (auto const& [k, h] : f.histogram_h) os << "all," << k << ',' << fmt(h) << '\n';
    for (auto const& [zone, hist] : f.zone_histogram_h) {
      for (auto const& [k, h] : hist) os << zone << ',' << k << ',' << fmt(h) << '\n';
    }
    write_file(dir / "fleet_hours.csv", os.str());
    summary["fleet"] = {{"planned_h", f.planned_h}, {"online_h", f.online_h}, {"pct", f.pct}};
  }
  if (!a.feed.empty()) {
    FixedRouteRouter router{FixedRouteFeed::load(a.feed), RouterOptions{.walk_speed_mps = a.walk_speed}};
    auto const same = compare_fixed_routes(trips, area, router, Regime::SameDeparture);
    auto const adjusted = compare_fixed_routes(trips, area, router, Regime::AdjustedDeparture);
    write_file(dir / "fixed_route.csv", comparison_csv(same, adjusted));
    summary["fixed_route"] = {{"SameDeparture", comparison_json(same)},
                              {"AdjustedDeparture", comparison_json(adjusted)}};
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump() << '\n';
  return 0;
}

std::vector<int> parse_int_list(std::string const& s, char const* what) {
  std::vector<int> out;
  std::stringstream ss{s};
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<int>(csv::to_int(item, what)));
  }
  if (out.empty()) throw Error("ParseError", std::string{what} + " list is empty");
  return out;
}

int cmd_cost_table(std::string const& rates, std::string const& fleets, std::string const& riders, double hours,
                   std::string const& out) {
  CostTableSpec spec{parse_rate_range(rates), parse_int_list(fleets, "fleets"), parse_int_list(riders, "riders"), hours};
  auto const csv_text = cost_table_csv(spec);
  if (out.empty()) {
    std::cout << csv_text;
  } else {
    write_file(out, csv_text);
  }
  return 0;
}

void report_error(std::string_view code, std::string_view message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-demand multimodal transit simulator and analytics"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Overrides overrides;
  std::string scenario_path;
  std::string out_path = "events.jsonl", summary_path;
  std::uint64_t seed = 1;
  Seconds dwell = 30;
  double stretch = 1.5;
  Seconds threshold = 0;
  auto* sim = app.add_subcommand("simulate", "Run a scenario, write the event log, print the summary");
  sim->option_defaults()->always_capture_default();
  sim->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  sim->add_option("--out", out_path, "Event log output (JSON lines)");
  sim->add_option("--summary", summary_path, "Also write the summary JSON here");
  auto* seed_opt = sim->add_option("--seed", seed, "Random seed (overrides the scenario)");
  auto* dwell_opt = sim->add_option("--dwell-s", dwell, "Stop dwell seconds (overrides the scenario)");
  auto* stretch_opt = sim->add_option("--stretch-factor", stretch, "Ride-time stretch bound (overrides the scenario)");
  auto* thr_opt = sim->add_option("--removal-threshold-s", threshold,
                                  "Single removal threshold from time 0 (overrides the scenario policy)");

  auto* val = app.add_subcommand("validate", "Check a scenario and its referenced files");
  val->add_option("--scenario", scenario_path, "Scenario JSON")->required();

  AnalyzeArgs an;
  auto* ana = app.add_subcommand("analyze", "Compute reports from an event log");
  ana->option_defaults()->always_capture_default();
  ana->add_option("--events", an.events, "Event log (JSON lines)")->required();
  ana->add_option("--stops", an.stops, "Zones and stops JSON")->required();
  ana->add_option("--report", an.report, "Report directory");
  ana->add_option("--feed", an.feed, "Fixed-route feed directory (enables the comparison)");
  ana->add_option("--matrix", an.matrix, "Travel matrix CSV (default: synthetic grid)");
  ana->add_option("--speed-mps", an.speed_mps, "Grid speed when no matrix is given");
  ana->add_option("--detour", an.detour, "Grid detour factor when no matrix is given");
  ana->add_option("--walk-speed", an.walk_speed, "Walking speed m/s");
  ana->add_option("--fleet-size", an.fleet_size, "Planned fleet size for fleet-hour accounting");
  ana->add_option("--days", an.days, "Service days for fleet-hour accounting");
  ana->add_option("--hours-per-day", an.hours_per_day, "Service hours per day");

  std::string events, stops, feed, report = "report";
  double walk_speed = 1.4;
  auto* cmp = app.add_subcommand("compare-fixed", "Compare served trips with fixed-route itineraries");
  cmp->option_defaults()->always_capture_default();
  cmp->add_option("--events", events, "Event log (JSON lines)")->required();
  cmp->add_option("--stops", stops, "Zones and stops JSON")->required();
  cmp->add_option("--feed", feed, "Fixed-route feed directory")->required();
  cmp->add_option("--report", report, "Report directory");
  cmp->add_option("--walk-speed", walk_speed, "Walking speed m/s");

  std::string rates = "20:100:5", fleets = "5,6,7", riders = "89,182,270", cost_out;
  double hours = 13.0;
  auto* cost = app.add_subcommand("cost-table", "Cost per rider over rates, fleet sizes, and ridership");
  cost->option_defaults()->always_capture_default();
  cost->add_option("--rates", rates, "Cost per vehicle hour, lo:hi:step or a single value");
  cost->add_option("--fleets", fleets, "Fleet sizes, comma separated");
  cost->add_option("--riders", riders, "Riders served, comma separated");
  cost->add_option("--hours", hours, "Service hours");
  cost->add_option("--out", cost_out, "Output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    report_error("UsageError", e.what());
    return 1;
  }

  if (*seed_opt) overrides.seed = seed;
  if (*dwell_opt) overrides.dwell_s = dwell;
  if (*stretch_opt) overrides.stretch_factor = stretch;
  if (*thr_opt) overrides.removal_threshold_s = threshold;

  try {
    if (*sim) return cmd_simulate(scenario_path, out_path, summary_path, overrides);
    if (*val) return cmd_validate(scenario_path);
    if (*ana) return cmd_analyze(an);
    if (*cmp) return cmd_compare(events, stops, feed, report, walk_speed);
    if (*cost) return cmd_cost_table(rates, fleets, riders, hours, cost_out);
  } catch (Error const& e) {
    report_error(e.code(), e.what());
    return e.code() == "IoError" ? 2 : 1;
  } catch (nlohmann::json::exception const& e) {
    report_error("ParseError", e.what());
    return 1;
  } catch (std::exception const& e) {
    report_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
