#include "odmts/travel.h"

#include <cmath>

#include "odmts/csv.h"

namespace odmts {

namespace {

void grid_cell(std::vector<LatLon> const& loc, double speed, double detour, std::size_t i, std::size_t j,
               TravelTable& t) {
  auto const n = loc.size();
  if (i == j) {
    t.seconds[i * n + j] = 0;
    t.meters[i * n + j] = 0.0;
    return;
  }
  double const m = haversine_m(loc[i], loc[j]) * detour;
  t.meters[i * n + j] = m;
  t.seconds[i * n + j] = static_cast<Seconds>(std::llround(m / speed));
}

void check_grid_params(double speed, double detour) {
  if (!(speed > 0.0)) {
    throw Error("ProviderInvalid", "grid speed must be positive");
  }
  if (!(detour >= 1.0)) {
    throw Error("ProviderInvalid", "detour factor must be at least 1");
  }
}

}  // namespace

TravelTable build_grid_table(std::vector<LatLon> const& locations, double speed_mps, double detour) {
  check_grid_params(speed_mps, detour);
  TravelTable t;
  t.n = locations.size();
  t.seconds.assign(t.n * t.n, 0);
  t.meters.assign(t.n * t.n, 0.0);
  auto const n = static_cast<std::int64_t>(t.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      grid_cell(locations, speed_mps, detour, static_cast<std::size_t>(i), static_cast<std::size_t>(j), t);
    }
  }
  return t;
}

TravelTable build_grid_table_serial(std::vector<LatLon> const& locations, double speed_mps, double detour) {
  check_grid_params(speed_mps, detour);
  TravelTable t;
  t.n = locations.size();
  t.seconds.assign(t.n * t.n, 0);
  t.meters.assign(t.n * t.n, 0.0);
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = 0; j < t.n; ++j) {
      grid_cell(locations, speed_mps, detour, i, j, t);
    }
  }
  return t;
}

TravelProvider TravelProvider::from_matrix(std::vector<MatrixEntry> const& entries) {
  TravelProvider p;
  p.mode_ = Mode::Matrix;
  auto intern = [&p](std::string const& id) {
    auto const [it, inserted] = p.index_.emplace(id, p.ids_.size());
    if (inserted) {
      p.ids_.push_back(id);
    }
    return it->second;
  };
  for (auto const& e : entries) {
    intern(e.from);
    intern(e.to);
  }
  auto const n = p.ids_.size();
  p.table_.n = n;
  p.table_.seconds.assign(n * n, -1);
  p.table_.meters.assign(n * n, -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    p.table_.seconds[i * n + i] = 0;
    p.table_.meters[i * n + i] = 0.0;
  }
  for (auto const& e : entries) {
    auto const i = p.index_.at(e.from);
    auto const j = p.index_.at(e.to);
    if (e.seconds < 0 || e.meters < 0.0) {
      throw Error("ProviderInvalid", "negative matrix entry " + e.from + "->" + e.to);
    }
    if (i == j && (e.seconds != 0 || e.meters != 0.0)) {
      throw Error("ProviderInvalid", "nonzero diagonal entry for " + e.from);
    }
    p.table_.seconds[i * n + j] = e.seconds;
    p.table_.meters[i * n + j] = e.meters;
  }
  return p;
}

TravelProvider TravelProvider::synthetic_grid(std::vector<std::pair<std::string, LatLon>> const& stops,
                                              double speed_mps, double detour_factor) {
  check_grid_params(speed_mps, detour_factor);
  TravelProvider p;
  p.mode_ = Mode::SyntheticGrid;
  p.speed_mps_ = speed_mps;
  p.detour_ = detour_factor;
  for (auto const& [id, loc] : stops) {
    if (!p.index_.emplace(id, p.ids_.size()).second) {
      throw Error("DuplicateId", "duplicate stop " + id);
    }
    p.ids_.push_back(id);
    p.locations_.push_back(loc);
  }
  return p;
}

TravelProvider TravelProvider::synthetic_grid(ServiceArea const& area, double speed_mps, double detour_factor) {
  std::vector<std::pair<std::string, LatLon>> stops;
  for (auto const& [id, s] : area.stops) {
    stops.emplace_back(id, s.location);
  }
  return synthetic_grid(stops, speed_mps, detour_factor);
}

TravelProvider TravelProvider::matrix_from_csv_text(std::string_view text) {
  auto const t = csv::Table::parse(text, "<matrix>");
  std::vector<MatrixEntry> entries;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    entries.push_back({t.get(i, "from_stop"), t.get(i, "to_stop"), t.get_int(i, "drive_seconds"),
                       t.get_double(i, "drive_meters")});
  }
  return from_matrix(entries);
}

TravelProvider TravelProvider::load_matrix_csv(std::string const& path) {
  auto const t = csv::Table::load(path);
  std::vector<MatrixEntry> entries;
  entries.reserve(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    entries.push_back({t.get(i, "from_stop"), t.get(i, "to_stop"), t.get_int(i, "drive_seconds"),
                       t.get_double(i, "drive_meters")});
  }
  return from_matrix(entries);
}

std::size_t TravelProvider::index_of(std::string_view stop, std::string_view other) const {
  auto const it = index_.find(std::string{stop});
  if (it == index_.end()) {
    throw Error("UnknownStopPair", "no travel data for " + std::string{stop} + " -> " + std::string{other});
  }
  return it->second;
}

void TravelProvider::check_pair(std::size_t i, std::size_t j, std::string_view a, std::string_view b) const {
  if (mode_ == Mode::Matrix && table_.time_at(i, j) < 0) {
    throw Error("UnknownStopPair", "no travel data for " + std::string{a} + " -> " + std::string{b});
  }
}

Seconds TravelProvider::drive_time(std::string_view a, std::string_view b) const {
  auto const i = index_of(a, b);
  auto const j = index_of(b, a);
  if (mode_ == Mode::SyntheticGrid) {
    if (i == j) {
      return 0;
    }
    return static_cast<Seconds>(std::llround(haversine_m(locations_[i], locations_[j]) * detour_ / speed_mps_));
  }
  check_pair(i, j, a, b);
  return table_.time_at(i, j);
}

double TravelProvider::drive_distance(std::string_view a, std::string_view b) const {
  auto const i = index_of(a, b);
  auto const j = index_of(b, a);
  if (mode_ == Mode::SyntheticGrid) {
    return i == j ? 0.0 : haversine_m(locations_[i], locations_[j]) * detour_;
  }
  check_pair(i, j, a, b);
  return table_.meters_at(i, j);
}

TravelProvider TravelProvider::materialized() const {
  if (mode_ == Mode::Matrix) {
    return *this;
  }
  TravelProvider p;
  p.mode_ = Mode::Matrix;
  p.ids_ = ids_;
  p.index_ = index_;
  p.table_ = build_grid_table(locations_, speed_mps_, detour_);
  p.locations_ = locations_;
  p.speed_mps_ = speed_mps_;
  p.detour_ = detour_;
  return p;
}

}  // namespace odmts
