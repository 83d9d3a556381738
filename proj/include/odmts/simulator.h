#pragma once

#include <string>

#include "json.hpp"

#include "odmts/event_log.h"
#include "odmts/scenario.h"

namespace odmts {

struct SimulationSummary {
  std::size_t requests = 0;
  std::size_t served = 0;
  std::size_t canceled_by_rider = 0;
  std::size_t no_shows = 0;
  std::size_t canceled_end_of_service = 0;
  std::size_t boarded_riders = 0;   // passengers, summed over group sizes
  std::size_t alighted_riders = 0;
  std::size_t onboard_at_close = 0;
  std::size_t removed_by_server = 0;
  std::size_t removed_by_admin = 0;
  double mean_wait_s = 0.0;
  double mean_ride_s = 0.0;
  double mean_total_s = 0.0;
  double driven_m = 0.0;

  nlohmann::json to_json() const;
};

struct SimulationResult {
  EventLog log;
  SimulationSummary summary;
};

// Deterministic discrete-event run of the scenario: events are processed in
// (time, class, seq) order and every random draw comes from one generator
// seeded with scenario.seed.
SimulationResult run(Scenario const& scenario);

}  // namespace odmts
