#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "odmts/core.h"
#include "odmts/csv.h"

namespace odmts {

// {"zones":[{"id","name","polygon":[[lat,lon],...],"fleet_size","phase"?}],
//  "stops":[{"id","zone_id","lat","lon","kind","is_idle_location","is_rail_station"}]}
ServiceArea service_area_from_json(nlohmann::json const& doc);
nlohmann::json to_json(ServiceArea const& area);
ServiceArea load_service_area(std::string const& path);

// Header: request_id,rider_id,zone_id,origin_stop,destination_stop,group_size,
// submit_time,channel[,cancel_time]. A blank cancel_time means no cancellation.
std::vector<Request> requests_from_csv(csv::Table const& t);
std::vector<Request> load_requests(std::string const& path);
std::string requests_to_csv(std::vector<Request> const& requests);

nlohmann::json load_json(std::string const& path);

}  // namespace odmts
