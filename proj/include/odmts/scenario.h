#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "odmts/core.h"
#include "odmts/dispatch.h"
#include "odmts/lifecycle.h"
#include "odmts/reaction.h"
#include "odmts/travel.h"

namespace odmts {

struct VehicleSpec {
  std::string id;
  std::string zone_id;
  int capacity = kDefaultCapacity;
  std::optional<std::string> home_stop;  // defaults to the zone's first idle stop
};

struct AdminRemovalSpec {
  std::string vehicle_id;
  Seconds time = 0;
};

struct BehaviorModel {
  ReactionTimeModel reaction = ReactionTimeModel::constant(0.0);
  double p_noshow = 0.0;
  Seconds noshow_wait_s = 300;
  // A server-removed driver signs in again this long after removal when
  // still inside a shift; negative disables rejoining.
  Seconds rejoin_after_s = 600;
};

// Per-stop request weights by hour of day, used for rebalancing.
struct DemandForecast {
  std::map<int, std::map<std::string, double>> by_hour;

  std::map<std::string, double> weights_at(int hour) const;
  // CSV: stop_id,hour,weight
  static DemandForecast from_csv_text(std::string const& text);
  static DemandForecast load(std::string const& path);
};

struct Scenario {
  ServiceArea area;
  TravelProvider provider = TravelProvider::from_matrix({});
  std::vector<Request> requests;
  ShiftSchedule shifts;
  std::vector<VehicleSpec> vehicles;
  DispatchParams dispatch;
  RemovalPolicy removal;
  Seconds rejoin_cooldown_s = 0;
  BehaviorModel behavior;
  DemandForecast forecast;
  std::vector<AdminRemovalSpec> admin_removals;
  Seconds service_start_s = kServiceStart;  // time of day
  Seconds service_end_s = kServiceEnd;
  std::uint64_t seed = 1;

  // Throws Error("ScenarioInvalid", ...) naming the first failing reference.
  void validate() const;

  // Scenario document; file references resolve against base_dir.
  static Scenario from_json(nlohmann::json const& doc, std::string const& base_dir);
  static Scenario load(std::string const& path);
};

}  // namespace odmts
