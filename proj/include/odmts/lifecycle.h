#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "odmts/core.h"

namespace odmts {

struct ShiftWindow {
  Seconds sign_in = 0;
  Seconds sign_out = 0;
  friend bool operator==(ShiftWindow const&, ShiftWindow const&) = default;
};

// Per-vehicle sign-in windows, sorted by start.
struct ShiftSchedule {
  std::map<std::string, std::vector<ShiftWindow>> windows;

  // Windows must be non-empty, non-overlapping, and inside the 06:00-19:00
  // service window of their day.
  void validate() const;

  // CSV: vehicle_id,sign_in_s,sign_out_s (several rows per vehicle allowed).
  static ShiftSchedule from_csv_text(std::string const& text);
  static ShiftSchedule load(std::string const& path);
};

// Time-indexed automatic-removal thresholds. Before the first entry takes
// effect the policy is disabled.
class RemovalPolicy {
public:
  struct Entry {
    Seconds threshold_s = 300;
    Seconds effective_from_s = 0;
  };

  RemovalPolicy() = default;
  explicit RemovalPolicy(std::vector<Entry> entries);

  // JSON list of {threshold_s, effective_from_s}.
  static RemovalPolicy from_json(nlohmann::json const& j);

  std::optional<Seconds> threshold_at(Seconds t) const;
  std::vector<Entry> const& entries() const { return entries_; }

private:
  std::vector<Entry> entries_;
};

enum class TimerExpiry { Removed, ExemptLastVehicle, Stale };

struct ResponseTimer {
  std::uint64_t token = 0;
  Seconds armed_at = 0;
  Seconds deadline = 0;
};

// Sign-in state, response timers, and removals for every vehicle. A single
// writer drives it; timers are simulation events identified by token, so an
// expiry for a superseded or cleared timer is reported Stale.
class FleetLifecycle {
public:
  explicit FleetLifecycle(RemovalPolicy policy = {}, Seconds rejoin_cooldown_s = 0);

  void add_vehicle(std::string const& id, std::string const& zone_id);

  void sign_in(std::string const& id, Seconds now);
  void sign_out(std::string const& id, Seconds now);

  // Arms (or re-arms) the response timer for an instruction. Vehicles with
  // riders aboard get no timer and lose any pending one.
  std::optional<ResponseTimer> on_instruction(std::string const& id, Seconds now, int onboard_load);

  // Status becomes DrivingWithoutPassengers, or WithRiders when loaded.
  void on_response(std::string const& id, Seconds now, int onboard_load = 0);

  // Signs the vehicle out unless it is the only signed-in vehicle of its zone.
  TimerExpiry on_timer_expiry(std::string const& id, std::uint64_t token, Seconds now);

  void admin_remove(std::string const& id, Seconds now);

  bool signed_in(std::string const& id) const;
  std::optional<ResponseTimer> pending_timer(std::string const& id) const;
  int signed_in_count(std::string const& zone_id) const;
  std::optional<Seconds> removed_at(std::string const& id) const;
  VehicleStatus status(std::string const& id) const;
  void set_status(std::string const& id, VehicleStatus s);
  RemovalPolicy const& policy() const { return policy_; }

private:
  struct State {
    std::string zone_id;
    bool signed_in = false;
    std::optional<ResponseTimer> timer;
    std::optional<Seconds> removed_at;
    VehicleStatus status;
  };

  State& state(std::string const& id);
  State const& state(std::string const& id) const;

  RemovalPolicy policy_;
  Seconds cooldown_s_;
  std::map<std::string, State> vehicles_;
  std::uint64_t next_token_ = 1;
};

}  // namespace odmts
