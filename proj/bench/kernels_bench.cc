// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "generators.h"
#include "odmts/analytics.h"
#include "odmts/dispatch.h"
#include "odmts/travel.h"

using namespace odmts;

namespace {

// A larger fleet than the oracle instances so the vehicle loop has work.
gen::DispatchInstance big_instance(int vehicles) {
  std::mt19937_64 rng{1};
  gen::DispatchInstance in;
  auto area = gen::ring_area("z", 40, 2);
  in.provider = TravelProvider::synthetic_grid(area, 9.0, 1.3).materialized();
  std::vector<std::string> stops;
  for (auto const& [id, s] : area.stops) stops.push_back(id);
  std::uniform_int_distribution<std::size_t> pick{0, stops.size() - 1};
  in.now = 8 * 3600;
  for (int k = 0; k < vehicles; ++k) {
    VehicleSnapshot v;
    v.id = "v" + std::to_string(k);
    v.zone_id = "z";
    v.start_stop = stops[pick(rng)];
    v.start_time = in.now;
    for (int r = 0; r < 3; ++r) {
      auto const id = v.id + "_r" + std::to_string(r);
      v.plan.push_back({id, LegAction::Pickup, stops[pick(rng)], 0, 1});
      v.plan.push_back({id, LegAction::Dropoff, stops[pick(rng)], 0, 1});
    }
    in.fleet.push_back(std::move(v));
  }
  in.params.stretch_factor = 3.0;
  in.request.id = "new";
  in.request.rider_id = "p";
  in.request.zone_id = "z";
  in.request.origin_stop = stops[0];
  in.request.destination_stop = stops[7];
  in.request.submit_time = in.now;
  return in;
}

void BM_AssignParallel(benchmark::State& st) {
  auto const in = big_instance(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(assign(in.request, in.fleet, in.provider, in.params, in.now));
}

void BM_AssignSerial(benchmark::State& st) {
  auto const in = big_instance(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(assign_serial(in.request, in.fleet, in.provider, in.params, in.now));
}

std::vector<LatLon> points(int n) {
  std::mt19937_64 rng{2};
  std::uniform_real_distribution<double> lat{33.6, 33.9}, lon{-84.6, -84.3};
  std::vector<LatLon> p;
  for (int k = 0; k < n; ++k) p.push_back({lat(rng), lon(rng)});
  return p;
}

void BM_GridTableParallel(benchmark::State& st) {
  auto const p = points(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_grid_table(p, 9.0, 1.3));
}

void BM_GridTableSerial(benchmark::State& st) {
  auto const p = points(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_grid_table_serial(p, 9.0, 1.3));
}

struct ComparisonInput {
  ServiceArea area;
  FixedRouteFeed feed;
  std::vector<Trip> trips;
};

ComparisonInput comparison_input(int n) {
  std::mt19937_64 rng{3};
  ComparisonInput in;
  in.area = gen::ring_area("z", 12, 1);
  in.feed = gen::random_feed(rng, 5, 6);
  std::vector<std::string> ids;
  for (auto const& [id, s] : in.area.stops) ids.push_back(id);
  std::uniform_int_distribution<std::size_t> pick{0, ids.size() - 1};
  std::uniform_int_distribution<int> when{7 * 3600 + 1800, 9 * 3600};
  for (int k = 0; k < n; ++k) {
    Trip t;
    t.request_id = "t" + std::to_string(k);
    t.zone_id = "z";
    t.origin = ids[pick(rng)];
    t.destination = ids[(pick(rng) + 1) % ids.size()];
    t.submit_time = when(rng);
    t.board_time = t.submit_time + 300;
    t.alight_time = t.submit_time + 900;
    t.outcome = TripOutcome::Served;
    in.trips.push_back(std::move(t));
  }
  return in;
}

void BM_CompareParallel(benchmark::State& st) {
  auto const in = comparison_input(static_cast<int>(st.range(0)));
  FixedRouteRouter router{in.feed};
  for (auto _ : st) {
    benchmark::DoNotOptimize(compare_fixed_routes(in.trips, in.area, router, Regime::AdjustedDeparture));
  }
}

void BM_CompareSerial(benchmark::State& st) {
  auto const in = comparison_input(static_cast<int>(st.range(0)));
  FixedRouteRouter router{in.feed};
  for (auto _ : st) {
    benchmark::DoNotOptimize(compare_fixed_routes_serial(in.trips, in.area, router, Regime::AdjustedDeparture));
  }
}

}  // namespace

BENCHMARK(BM_AssignParallel)->Arg(8)->Arg(64)->Arg(256);
BENCHMARK(BM_AssignSerial)->Arg(8)->Arg(64)->Arg(256);
BENCHMARK(BM_GridTableParallel)->Arg(200)->Arg(1000);
BENCHMARK(BM_GridTableSerial)->Arg(200)->Arg(1000);
BENCHMARK(BM_CompareParallel)->Arg(200)->Arg(1000);
BENCHMARK(BM_CompareSerial)->Arg(200)->Arg(1000);

BENCHMARK_MAIN();
