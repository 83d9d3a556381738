#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "odmts/core.h"

namespace odmts {

enum class EventKind {
  RequestSubmitted,
  Assigned,
  VehicleDispatched,
  DriverResponded,
  ArrivedPickup,
  Boarded,
  Alighted,
  Canceled,
  NoShowReported,
  SignIn,
  SignOut,
  RemovedByAdmin,
  RemovedByServer,
  RelocateToIdle,
  RebalanceCommand,
  WrongLocationFlag,
};

std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);

// Payload conventions per kind (all optional unless noted):
//   RequestSubmitted: zone, origin, destination, group_size, channel
//   Assigned:         predicted_wait, predicted_ride, objective
//   VehicleDispatched: target, purpose ("pickup"|"dropoff"|"relocate"|"rebalance")
//   DriverResponded:  from, to, meters, seconds, onboard (request ids aboard
//                     for the whole drive that follows)
//   Canceled:         reason ("rider"|"end_of_service")
//   SignIn:           stop, zone
struct EventRecord {
  Seconds time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::RequestSubmitted;
  std::optional<std::string> vehicle_id;
  std::optional<std::string> request_id;
  std::optional<std::string> rider_id;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(EventRecord const&, EventRecord const&) = default;
};

nlohmann::json to_json(EventRecord const& e);
EventRecord event_from_json(nlohmann::json const& j);

// Append-only log ordered by (time, seq). Sequence numbers are assigned at
// emission and strictly increase.
class EventLog {
public:
  EventRecord const& append(Seconds time, EventKind kind, std::optional<std::string> vehicle = {},
                            std::optional<std::string> request = {},
                            std::optional<std::string> rider = {},
                            nlohmann::json payload = nlohmann::json::object());

  // Appends a record read from elsewhere, keeping its seq. Throws when the
  // record would break the ordering.
  void push_back(EventRecord e);

  std::vector<EventRecord> const& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  void write_jsonl(std::ostream& out) const;
  std::string to_jsonl() const;
  static EventLog read_jsonl(std::istream& in);
  static EventLog load(std::string const& path);
  void save(std::string const& path) const;

private:
  std::vector<EventRecord> records_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace odmts
