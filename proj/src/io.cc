#include "odmts/io.h"

#include <fstream>
#include <sstream>

namespace odmts {

ServiceArea service_area_from_json(nlohmann::json const& doc) {
  ServiceArea area;
  try {
    for (auto const& jz : doc.at("zones")) {
      Zone z;
      z.id = jz.at("id").get<std::string>();
      z.name = jz.value("name", z.id);
      for (auto const& p : jz.at("polygon")) {
        z.boundary.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      z.fleet_size = jz.at("fleet_size").get<int>();
      z.phase = jz.value("phase", std::string{"Phase1"}) == "Phase2" ? Phase::Phase2 : Phase::Phase1;
      if (!area.zones.emplace(z.id, z).second) {
        throw Error("DuplicateId", "duplicate zone id " + z.id);
      }
    }
    for (auto const& js : doc.at("stops")) {
      VirtualStop s;
      s.id = js.at("id").get<std::string>();
      s.zone_id = js.at("zone_id").get<std::string>();
      s.location = {js.at("lat").get<double>(), js.at("lon").get<double>()};
      s.kind = parse_stop_kind(js.at("kind").get<std::string>());
      s.is_idle_location = js.value("is_idle_location", false);
      s.is_rail_station = js.value("is_rail_station", false);
      if (!area.stops.emplace(s.id, s).second) {
        throw Error("DuplicateId", "duplicate stop id " + s.id);
      }
    }
  } catch (nlohmann::json::exception const& ex) {
    throw Error("ParseError", std::string{"zones/stops document: "} + ex.what());
  }
  return area;
}

nlohmann::json to_json(ServiceArea const& area) {
  nlohmann::json doc;
  doc["zones"] = nlohmann::json::array();
  for (auto const& [id, z] : area.zones) {
    nlohmann::json poly = nlohmann::json::array();
    for (auto const& p : z.boundary) {
      poly.push_back({p.lat, p.lon});
    }
    doc["zones"].push_back({{"id", z.id},
                            {"name", z.name},
                            {"polygon", poly},
                            {"fleet_size", z.fleet_size},
                            {"phase", z.phase == Phase::Phase2 ? "Phase2" : "Phase1"}});
  }
  doc["stops"] = nlohmann::json::array();
  for (auto const& [id, s] : area.stops) {
    doc["stops"].push_back({{"id", s.id},
                            {"zone_id", s.zone_id},
                            {"lat", s.location.lat},
                            {"lon", s.location.lon},
                            {"kind", std::string{to_string(s.kind)}},
                            {"is_idle_location", s.is_idle_location},
                            {"is_rail_station", s.is_rail_station}});
  }
  return doc;
}

nlohmann::json load_json(std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw IoError("cannot open " + path);
  }
  try {
    return nlohmann::json::parse(in);
  } catch (nlohmann::json::exception const& ex) {
    throw Error("ParseError", path + ": " + ex.what());
  }
}

ServiceArea load_service_area(std::string const& path) { return service_area_from_json(load_json(path)); }

std::vector<Request> requests_from_csv(csv::Table const& t) {
  std::vector<Request> out;
  out.reserve(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    Request r;
    r.id = t.get(i, "request_id");
    r.rider_id = t.get(i, "rider_id");
    r.zone_id = t.get(i, "zone_id");
    r.origin_stop = t.get(i, "origin_stop");
    r.destination_stop = t.get(i, "destination_stop");
    r.group_size = static_cast<int>(t.get_int(i, "group_size"));
    r.submit_time = t.get_int(i, "submit_time");
    r.channel = parse_channel(t.get(i, "channel"));
    if (auto const c = t.get_or(i, "cancel_time"); !c.empty()) {
      r.cancel_time = csv::to_int(c, t.source() + " cancel_time");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Request> load_requests(std::string const& path) { return requests_from_csv(csv::Table::load(path)); }

std::string requests_to_csv(std::vector<Request> const& requests) {
  std::ostringstream out;
  out << "request_id,rider_id,zone_id,origin_stop,destination_stop,group_size,submit_time,channel,cancel_time\n";
  for (auto const& r : requests) {
    out << r.id << ',' << r.rider_id << ',' << r.zone_id << ',' << r.origin_stop << ',' << r.destination_stop
        << ',' << r.group_size << ',' << r.submit_time << ',' << to_string(r.channel) << ',';
    if (r.cancel_time) {
      out << *r.cancel_time;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace odmts
