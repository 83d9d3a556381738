#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "odmts/core.h"

namespace odmts {

struct MatrixEntry {
  std::string from;
  std::string to;
  Seconds seconds = 0;
  double meters = 0.0;
};

// Dense stop-by-stop table. A negative time marks a missing pair.
struct TravelTable {
  std::size_t n = 0;
  std::vector<Seconds> seconds;
  std::vector<double> meters;

  Seconds time_at(std::size_t i, std::size_t j) const { return seconds[i * n + j]; }
  double meters_at(std::size_t i, std::size_t j) const { return meters[i * n + j]; }
};

// Fills the table for the synthetic-grid rule: distance = haversine x detour,
// time = distance / speed rounded to whole seconds.
TravelTable build_grid_table(std::vector<LatLon> const& locations, double speed_mps, double detour);
// Single-threaded reference for the above.
TravelTable build_grid_table_serial(std::vector<LatLon> const& locations, double speed_mps, double detour);

// Shuttle travel times and distances between virtual stops. Immutable once
// built; all queries are const and thread-safe.
class TravelProvider {
public:
  enum class Mode { Matrix, SyntheticGrid };

  static TravelProvider from_matrix(std::vector<MatrixEntry> const& entries);
  static TravelProvider synthetic_grid(std::vector<std::pair<std::string, LatLon>> const& stops,
                                       double speed_mps, double detour_factor);
  static TravelProvider synthetic_grid(ServiceArea const& area, double speed_mps, double detour_factor);

  // CSV rows from_stop,to_stop,drive_seconds,drive_meters.
  static TravelProvider load_matrix_csv(std::string const& path);
  static TravelProvider matrix_from_csv_text(std::string_view text);

  Mode mode() const { return mode_; }
  bool knows(std::string_view stop) const { return index_.contains(std::string{stop}); }

  Seconds drive_time(std::string_view a, std::string_view b) const;
  double drive_distance(std::string_view a, std::string_view b) const;

  double speed_mps() const { return speed_mps_; }
  double detour_factor() const { return detour_; }

  // Grid providers become Matrix providers with every pair filled in.
  TravelProvider materialized() const;

  std::vector<std::string> const& stop_ids() const { return ids_; }

private:
  std::size_t index_of(std::string_view stop, std::string_view other) const;
  void check_pair(std::size_t i, std::size_t j, std::string_view a, std::string_view b) const;

  Mode mode_ = Mode::Matrix;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  TravelTable table_;
  std::vector<LatLon> locations_;
  double speed_mps_ = 0.0;
  double detour_ = 1.0;
};

}  // namespace odmts
