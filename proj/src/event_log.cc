#include "odmts/event_log.h"

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

namespace odmts {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 16> kKindNames{{
    {EventKind::RequestSubmitted, "RequestSubmitted"},
    {EventKind::Assigned, "Assigned"},
    {EventKind::VehicleDispatched, "VehicleDispatched"},
    {EventKind::DriverResponded, "DriverResponded"},
    {EventKind::ArrivedPickup, "ArrivedPickup"},
    {EventKind::Boarded, "Boarded"},
    {EventKind::Alighted, "Alighted"},
    {EventKind::Canceled, "Canceled"},
    {EventKind::NoShowReported, "NoShowReported"},
    {EventKind::SignIn, "SignIn"},
    {EventKind::SignOut, "SignOut"},
    {EventKind::RemovedByAdmin, "RemovedByAdmin"},
    {EventKind::RemovedByServer, "RemovedByServer"},
    {EventKind::RelocateToIdle, "RelocateToIdle"},
    {EventKind::RebalanceCommand, "RebalanceCommand"},
    {EventKind::WrongLocationFlag, "WrongLocationFlag"},
}};

}  // namespace

std::string_view to_string(EventKind k) {
  for (auto const& [kind, name] : kKindNames) {
    if (kind == k) {
      return name;
    }
  }
  return "?";
}

EventKind parse_event_kind(std::string_view s) {
  for (auto const& [kind, name] : kKindNames) {
    if (name == s) {
      return kind;
    }
  }
  throw Error("ParseError", "unknown event kind " + std::string{s});
}

nlohmann::json to_json(EventRecord const& e) {
  nlohmann::json j;
  j["time"] = e.time;
  j["seq"] = e.seq;
  j["kind"] = std::string{to_string(e.kind)};
  if (e.vehicle_id) j["vehicle"] = *e.vehicle_id;
  if (e.request_id) j["request"] = *e.request_id;
  if (e.rider_id) j["rider"] = *e.rider_id;
  j["payload"] = e.payload;
  return j;
}

EventRecord event_from_json(nlohmann::json const& j) {
  EventRecord e;
  e.time = j.at("time").get<Seconds>();
  e.seq = j.at("seq").get<std::uint64_t>();
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  if (j.contains("vehicle")) e.vehicle_id = j["vehicle"].get<std::string>();
  if (j.contains("request")) e.request_id = j["request"].get<std::string>();
  if (j.contains("rider")) e.rider_id = j["rider"].get<std::string>();
  if (j.contains("payload")) e.payload = j["payload"];
  return e;
}

EventRecord const& EventLog::append(Seconds time, EventKind kind, std::optional<std::string> vehicle,
                                    std::optional<std::string> request,
                                    std::optional<std::string> rider, nlohmann::json payload) {
  EventRecord e;
  e.time = time;
  e.seq = next_seq_;
  e.kind = kind;
  e.vehicle_id = std::move(vehicle);
  e.request_id = std::move(request);
  e.rider_id = std::move(rider);
  e.payload = std::move(payload);
  push_back(std::move(e));
  return records_.back();
}

void EventLog::push_back(EventRecord e) {
  if (!records_.empty()) {
    auto const& last = records_.back();
    if (e.time < last.time || e.seq <= last.seq) {
      throw Error("LogOrder", "event seq " + std::to_string(e.seq) + " at t=" + std::to_string(e.time) +
                                  " breaks (time, seq) ordering");
    }
  }
  next_seq_ = e.seq + 1;
  records_.push_back(std::move(e));
}

void EventLog::write_jsonl(std::ostream& out) const {
  for (auto const& e : records_) {
    out << to_json(e).dump() << '\n';
  }
}

std::string EventLog::to_jsonl() const {
  std::ostringstream out;
  write_jsonl(out);
  return out.str();
}

EventLog EventLog::read_jsonl(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      log.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (nlohmann::json::exception const& ex) {
      throw Error("ParseError", "event log line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return log;
}

EventLog EventLog::load(std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw IoError("cannot open event log " + path);
  }
  return read_jsonl(in);
}

void EventLog::save(std::string const& path) const {
  std::ofstream out{path, std::ios::binary};
  if (!out) {
    throw IoError("cannot write event log " + path);
  }
  write_jsonl(out);
}

}  // namespace odmts
