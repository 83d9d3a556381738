#include "odmts/scenario.h"

#include <filesystem>
#include <set>

#include "odmts/csv.h"
#include "odmts/io.h"

namespace odmts {

namespace {

namespace fs = std::filesystem;

std::string resolve(std::string const& base_dir, std::string const& p) {
  fs::path path{p};
  return path.is_relative() ? (fs::path{base_dir} / path).string() : path.string();
}

DemandForecast forecast_from_table(csv::Table const& t) {
  DemandForecast f;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    auto const hour = static_cast<int>(t.get_int(i, "hour"));
    auto const w = t.get_double(i, "weight");
    if (w < 0.0) {
      throw Error("ForecastInvalid", "negative forecast weight at " + t.get(i, "stop_id"));
    }
    f.by_hour[hour][t.get(i, "stop_id")] += w;
  }
  return f;
}

[[noreturn]] void invalid(std::string const& what) { throw Error("ScenarioInvalid", what); }

}  // namespace

std::map<std::string, double> DemandForecast::weights_at(int hour) const {
  auto const it = by_hour.find(hour);
  return it == by_hour.end() ? std::map<std::string, double>{} : it->second;
}

DemandForecast DemandForecast::from_csv_text(std::string const& text) {
  return forecast_from_table(csv::Table::parse(text, "forecast"));
}

DemandForecast DemandForecast::load(std::string const& path) { return forecast_from_table(csv::Table::load(path)); }

void Scenario::validate() const {
  try {
    area.validate();
  } catch (Error const& e) {
    invalid(e.what());
  }
  std::set<std::string> vehicle_ids;
  for (auto const& v : vehicles) {
    if (!vehicle_ids.insert(v.id).second) {
      invalid("duplicate vehicle " + v.id);
    }
    if (!area.zones.contains(v.zone_id)) {
      invalid("vehicle " + v.id + " references unknown zone " + v.zone_id);
    }
    if (v.capacity < 1) {
      invalid("vehicle " + v.id + " capacity must be positive");
    }
    if (v.home_stop) {
      auto const* s = area.find_stop(*v.home_stop);
      if (s == nullptr || s->zone_id != v.zone_id) {
        invalid("vehicle " + v.id + " home stop " + *v.home_stop + " is not a stop of zone " + v.zone_id);
      }
    } else {
      bool has_idle = false;
      for (auto const* s : area.stops_in_zone(v.zone_id)) {
        has_idle = has_idle || s->is_idle_location;
      }
      if (!has_idle) {
        invalid("zone " + v.zone_id + " has no idle location for vehicle " + v.id);
      }
    }
  }
  for (auto const& [id, ws] : shifts.windows) {
    if (!vehicle_ids.contains(id)) {
      invalid("shift references unknown vehicle " + id);
    }
  }
  try {
    shifts.validate();
  } catch (Error const& e) {
    invalid(e.what());
  }
  std::set<std::string> request_ids;
  for (auto const& r : requests) {
    if (!request_ids.insert(r.id).second) {
      invalid("duplicate request " + r.id);
    }
    if (!area.zones.contains(r.zone_id)) {
      invalid("request " + r.id + " references unknown zone " + r.zone_id);
    }
    if (auto const v = validate_request(r, area)) {
      invalid("request " + r.id + ": " + std::string{to_string(*v)});
    }
    for (auto const* stop : {&r.origin_stop, &r.destination_stop}) {
      if (!provider.knows(*stop)) {
        invalid("request " + r.id + " stop " + *stop + " is unknown to the travel provider");
      }
    }
    if (r.cancel_time && *r.cancel_time < r.submit_time) {
      invalid("request " + r.id + " cancels before it is submitted");
    }
  }
  for (auto const& [id, s] : area.stops) {
    if (!provider.knows(id)) {
      invalid("stop " + id + " is unknown to the travel provider");
    }
  }
  for (auto const& a : admin_removals) {
    if (!vehicle_ids.contains(a.vehicle_id)) {
      invalid("admin removal references unknown vehicle " + a.vehicle_id);
    }
  }
  for (auto const& [hour, weights] : forecast.by_hour) {
    for (auto const& [stop, w] : weights) {
      if (!area.stops.contains(stop)) {
        invalid("forecast references unknown stop " + stop);
      }
    }
  }
  if (!(dispatch.stretch_factor >= 1.0) || dispatch.ride_weight < 0.0 || dispatch.dwell_s < 0 ||
      dispatch.reaction_allowance_s < 0) {
    invalid("dispatch parameters out of range");
  }
  if (behavior.p_noshow < 0.0 || behavior.p_noshow > 1.0 || behavior.noshow_wait_s < 0) {
    invalid("behavior parameters out of range");
  }
  if (service_start_s >= service_end_s) {
    invalid("service window is empty");
  }
  try {
    behavior.reaction.validate();
  } catch (Error const& e) {
    invalid(e.what());
  }
}

Scenario Scenario::from_json(nlohmann::json const& doc, std::string const& base_dir) {
  Scenario s;
  try {
    s.area = load_service_area(resolve(base_dir, doc.at("zones_stops").get<std::string>()));

    auto const& travel = doc.at("travel");
    auto const mode = travel.at("mode").get<std::string>();
    if (mode == "matrix") {
      s.provider = TravelProvider::load_matrix_csv(resolve(base_dir, travel.at("file").get<std::string>()));
    } else if (mode == "grid") {
      s.provider = TravelProvider::synthetic_grid(s.area, travel.value("speed_mps", 10.0), travel.value("detour", 1.3))
                       .materialized();
    } else {
      invalid("unknown travel mode " + mode);
    }

    if (doc.contains("requests")) {
      s.requests = load_requests(resolve(base_dir, doc["requests"].get<std::string>()));
    }
    if (doc.contains("shifts")) {
      s.shifts = ShiftSchedule::load(resolve(base_dir, doc["shifts"].get<std::string>()));
    }
    for (auto const& jv : doc.at("vehicles")) {
      VehicleSpec v;
      v.id = jv.at("id").get<std::string>();
      v.zone_id = jv.at("zone_id").get<std::string>();
      v.capacity = jv.value("capacity", kDefaultCapacity);
      if (jv.contains("home_stop")) {
        v.home_stop = jv["home_stop"].get<std::string>();
      }
      s.vehicles.push_back(std::move(v));
    }
    if (doc.contains("dispatch")) {
      auto const& d = doc["dispatch"];
      s.dispatch.stretch_factor = d.value("stretch_factor", s.dispatch.stretch_factor);
      s.dispatch.ride_weight = d.value("ride_weight", s.dispatch.ride_weight);
      s.dispatch.reaction_allowance_s = d.value("reaction_allowance_s", s.dispatch.reaction_allowance_s);
      s.dispatch.dwell_s = d.value("dwell_s", s.dispatch.dwell_s);
      s.dispatch.rebalance_period_s = d.value("rebalance_period_s", s.dispatch.rebalance_period_s);
      if (d.contains("forecast")) {
        s.forecast = DemandForecast::load(resolve(base_dir, d["forecast"].get<std::string>()));
      }
    }
    if (doc.contains("removal_policy")) {
      s.removal = RemovalPolicy::from_json(doc["removal_policy"]);
    }
    s.rejoin_cooldown_s = doc.value("rejoin_cooldown_s", Seconds{0});
    if (doc.contains("behavior")) {
      auto const& b = doc["behavior"];
      if (b.contains("reaction")) {
        s.behavior.reaction = ReactionTimeModel::from_json(b["reaction"], base_dir);
      }
      s.behavior.p_noshow = b.value("p_noshow", s.behavior.p_noshow);
      s.behavior.noshow_wait_s = b.value("noshow_wait_s", s.behavior.noshow_wait_s);
      s.behavior.rejoin_after_s = b.value("rejoin_after_s", s.behavior.rejoin_after_s);
    }
    if (doc.contains("admin_removals")) {
      for (auto const& a : doc["admin_removals"]) {
        s.admin_removals.push_back({a.at("vehicle_id").get<std::string>(), a.at("time_s").get<Seconds>()});
      }
    }
    if (doc.contains("service_window")) {
      s.service_start_s = doc["service_window"].value("start_s", s.service_start_s);
      s.service_end_s = doc["service_window"].value("end_s", s.service_end_s);
    }
    s.seed = doc.value("seed", std::uint64_t{1});
  } catch (nlohmann::json::exception const& ex) {
    throw Error("ScenarioInvalid", std::string{"scenario document: "} + ex.what());
  }
  return s;
}

Scenario Scenario::load(std::string const& path) {
  auto const doc = load_json(path);
  return from_json(doc, fs::path{path}.parent_path().string());
}

}  // namespace odmts
