#include "odmts/lifecycle.h"

#include <algorithm>

#include "odmts/csv.h"

namespace odmts {

namespace {

ShiftSchedule schedule_from_table(csv::Table const& t) {
  ShiftSchedule s;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    s.windows[t.get(i, "vehicle_id")].push_back({t.get_int(i, "sign_in_s"), t.get_int(i, "sign_out_s")});
  }
  for (auto& [id, w] : s.windows) {
    std::sort(w.begin(), w.end(), [](auto const& a, auto const& b) { return a.sign_in < b.sign_in; });
  }
  s.validate();
  return s;
}

}  // namespace

void ShiftSchedule::validate() const {
  for (auto const& [id, ws] : windows) {
    for (std::size_t k = 0; k < ws.size(); ++k) {
      auto const& w = ws[k];
      if (w.sign_out <= w.sign_in) {
        throw Error("ShiftInvalid", "vehicle " + id + " has an empty or reversed shift");
      }
      Seconds const day = w.sign_in / kSecondsPerDay * kSecondsPerDay;
      if (w.sign_in < day + kServiceStart || w.sign_out > day + kServiceEnd) {
        throw Error("ShiftInvalid", "vehicle " + id + " shift lies outside 06:00-19:00");
      }
      if (k > 0 && w.sign_in < ws[k - 1].sign_out) {
        throw Error("ShiftInvalid", "vehicle " + id + " has overlapping shifts");
      }
    }
  }
}

ShiftSchedule ShiftSchedule::from_csv_text(std::string const& text) {
  return schedule_from_table(csv::Table::parse(text, "shifts"));
}

ShiftSchedule ShiftSchedule::load(std::string const& path) { return schedule_from_table(csv::Table::load(path)); }

RemovalPolicy::RemovalPolicy(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (auto const& e : entries_) {
    if (e.threshold_s <= 0) {
      throw Error("PolicyInvalid", "removal threshold must be positive");
    }
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](Entry const& a, Entry const& b) { return a.effective_from_s < b.effective_from_s; });
}

RemovalPolicy RemovalPolicy::from_json(nlohmann::json const& j) {
  std::vector<Entry> entries;
  try {
    for (auto const& e : j) {
      entries.push_back({e.at("threshold_s").get<Seconds>(), e.at("effective_from_s").get<Seconds>()});
    }
  } catch (nlohmann::json::exception const& ex) {
    throw Error("ParseError", std::string{"removal policy: "} + ex.what());
  }
  return RemovalPolicy{std::move(entries)};
}

std::optional<Seconds> RemovalPolicy::threshold_at(Seconds t) const {
  std::optional<Seconds> out;
  for (auto const& e : entries_) {
    if (e.effective_from_s <= t) {
      out = e.threshold_s;
    }
  }
  return out;
}

FleetLifecycle::FleetLifecycle(RemovalPolicy policy, Seconds rejoin_cooldown_s)
    : policy_(std::move(policy)), cooldown_s_(rejoin_cooldown_s) {}

void FleetLifecycle::add_vehicle(std::string const& id, std::string const& zone_id) {
  if (!vehicles_.emplace(id, State{zone_id, false, {}, {}, {}}).second) {
    throw Error("DuplicateId", "duplicate vehicle " + id);
  }
}

FleetLifecycle::State& FleetLifecycle::state(std::string const& id) {
  auto const it = vehicles_.find(id);
  if (it == vehicles_.end()) {
    throw Error("UnknownVehicle", "unknown vehicle " + id);
  }
  return it->second;
}

FleetLifecycle::State const& FleetLifecycle::state(std::string const& id) const {
  auto const it = vehicles_.find(id);
  if (it == vehicles_.end()) {
    throw Error("UnknownVehicle", "unknown vehicle " + id);
  }
  return it->second;
}

void FleetLifecycle::sign_in(std::string const& id, Seconds now) {
  auto& s = state(id);
  if (s.signed_in) {
    throw Error("AlreadySignedIn", "vehicle " + id + " is already signed in");
  }
  if (s.removed_at && now < *s.removed_at + cooldown_s_) {
    throw Error("CooldownActive", "vehicle " + id + " cannot sign in before its cooldown ends");
  }
  s.signed_in = true;
  s.timer.reset();
  s.status = VehicleStatus::regular(RegularSub::Idling);
}

void FleetLifecycle::sign_out(std::string const& id, Seconds) {
  auto& s = state(id);
  if (!s.signed_in) {
    throw Error("VehicleOffline", "vehicle " + id + " is not signed in");
  }
  s.signed_in = false;
  s.timer.reset();
}

std::optional<ResponseTimer> FleetLifecycle::on_instruction(std::string const& id, Seconds now, int onboard_load) {
  auto& s = state(id);
  if (!s.signed_in) {
    throw Error("VehicleOffline", "vehicle " + id + " is not signed in");
  }
  s.status = onboard_load > 0 ? VehicleStatus::with_riders() : VehicleStatus::regular(RegularSub::WaitingForDeparture);
  auto const threshold = policy_.threshold_at(now);
  if (onboard_load > 0 || !threshold) {
    s.timer.reset();
    return std::nullopt;
  }
  s.timer = ResponseTimer{next_token_++, now, now + *threshold};
  return s.timer;
}

void FleetLifecycle::on_response(std::string const& id, Seconds, int onboard_load) {
  auto& s = state(id);
  s.timer.reset();
  s.status = onboard_load > 0 ? VehicleStatus::with_riders() : VehicleStatus::regular(RegularSub::DrivingWithoutPassengers);
}

TimerExpiry FleetLifecycle::on_timer_expiry(std::string const& id, std::uint64_t token, Seconds now) {
  auto& s = state(id);
  if (!s.signed_in || !s.timer || s.timer->token != token || now < s.timer->deadline) {
    return TimerExpiry::Stale;
  }
  s.timer.reset();
  if (signed_in_count(s.zone_id) <= 1) {
    return TimerExpiry::ExemptLastVehicle;
  }
  s.signed_in = false;
  s.removed_at = now;
  return TimerExpiry::Removed;
}

void FleetLifecycle::admin_remove(std::string const& id, Seconds now) {
  auto& s = state(id);
  if (!s.signed_in) {
    throw Error("VehicleOffline", "vehicle " + id + " is not signed in");
  }
  s.signed_in = false;
  s.timer.reset();
  s.removed_at = now;
}

bool FleetLifecycle::signed_in(std::string const& id) const { return state(id).signed_in; }

std::optional<ResponseTimer> FleetLifecycle::pending_timer(std::string const& id) const { return state(id).timer; }

int FleetLifecycle::signed_in_count(std::string const& zone_id) const {
  return static_cast<int>(std::count_if(vehicles_.begin(), vehicles_.end(), [&](auto const& kv) {
    return kv.second.zone_id == zone_id && kv.second.signed_in;
  }));
}

std::optional<Seconds> FleetLifecycle::removed_at(std::string const& id) const { return state(id).removed_at; }

VehicleStatus FleetLifecycle::status(std::string const& id) const { return state(id).status; }

void FleetLifecycle::set_status(std::string const& id, VehicleStatus s) { state(id).status = s; }

}  // namespace odmts
