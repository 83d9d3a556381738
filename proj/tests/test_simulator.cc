#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include "generators.h"
#include "properties.h"
#include "odmts/simulator.h"

using namespace odmts;

namespace {

constexpr Seconds h(int hh, int mm = 0) { return hh * 3600 + mm * 60; }

// Four stops z_s0..z_s3; drive time 100 x (|i - j| + 1) seconds.
Scenario base_scenario(int vehicles = 1) {
  Scenario s;
  s.area = gen::ring_area("z", 4, 1);
  std::vector<MatrixEntry> m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      Seconds const t = 100 * (std::abs(i - j) + 1);
      m.push_back({"z_s" + std::to_string(i), "z_s" + std::to_string(j), t, 8.0 * static_cast<double>(t)});
    }
  }
  s.provider = TravelProvider::from_matrix(m);
  for (int k = 1; k <= vehicles; ++k) {
    auto const id = "v" + std::to_string(k);
    s.vehicles.push_back({id, "z", 4, k == 1 ? std::nullopt : std::optional<std::string>{"z_s3"}});
    s.shifts.windows[id] = {{kServiceStart, kServiceEnd}};
  }
  s.dispatch.dwell_s = 30;
  s.behavior.reaction = ReactionTimeModel::constant(0.0);
  return s;
}

Request request(std::string id, int o, int d, Seconds t, int group = 1) {
  Request r;
  r.id = std::move(id);
  r.rider_id = "p_" + r.id;
  r.zone_id = "z";
  r.origin_stop = "z_s" + std::to_string(o);
  r.destination_stop = "z_s" + std::to_string(d);
  r.group_size = group;
  r.submit_time = t;
  return r;
}

std::vector<EventRecord> find(EventLog const& log, EventKind kind, std::string const& id = "") {
  std::vector<EventRecord> out;
  for (auto const& e : log) {
    if (e.kind != kind) continue;
    if (!id.empty() && e.request_id != id && e.vehicle_id != id) continue;
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST(Simulator, SingleTripTimeline) {
  auto s = base_scenario();
  s.behavior.reaction = ReactionTimeModel::constant(10.0);
  s.requests = {request("r1", 1, 2, h(8))};
  auto const res = run(s);
  auto const boarded = find(res.log, EventKind::Boarded, "r1");
  auto const alighted = find(res.log, EventKind::Alighted, "r1");
  ASSERT_EQ(boarded.size(), 1u);
  ASSERT_EQ(alighted.size(), 1u);
  // 10 s reaction + 200 s drive; then 30 s dwell + 10 s reaction + 200 s.
  EXPECT_EQ(boarded[0].time, h(8) + 210);
  EXPECT_EQ(alighted[0].time, h(8) + 210 + 30 + 10 + 200);
  EXPECT_EQ(res.summary.served, 1u);
  EXPECT_DOUBLE_EQ(res.summary.mean_wait_s, 210.0);
  EXPECT_DOUBLE_EQ(res.summary.mean_ride_s, 240.0);
  for (auto const& m : prop::log_invariants(s, res)) ADD_FAILURE() << m;
  // Returns to the idle stop after the trip.
  auto const relocate = find(res.log, EventKind::RelocateToIdle, "v1");
  ASSERT_FALSE(relocate.empty());
  EXPECT_EQ(relocate.back().payload.at("target"), "z_s0");
}

TEST(Simulator, UnresponsiveDriverRemovedAndRequestReassigned) {
  auto s = base_scenario(2);
  s.behavior.reaction = ReactionTimeModel::constant(400.0);
  s.removal = RemovalPolicy{{{300, 0}}};
  s.requests = {request("r1", 1, 2, h(8))};
  auto const res = run(s);
  auto const removed = find(res.log, EventKind::RemovedByServer);
  ASSERT_FALSE(removed.empty());
  EXPECT_EQ(removed[0].vehicle_id, "v1");
  EXPECT_EQ(removed[0].time, h(8) + 300);
  EXPECT_EQ(removed[0].payload.at("threshold_s"), 300);
  auto const assigned = find(res.log, EventKind::Assigned, "r1");
  ASSERT_EQ(assigned.size(), 2u);
  EXPECT_EQ(assigned[1].vehicle_id, "v2");
  EXPECT_EQ(assigned[1].time, h(8) + 300);
  // v2 is then the only vehicle online, so its own missed deadline is exempt.
  for (auto const& e : removed) EXPECT_NE(e.time, h(8) + 600);
  auto const boarded = find(res.log, EventKind::Boarded, "r1");
  ASSERT_EQ(boarded.size(), 1u);
  EXPECT_EQ(boarded[0].vehicle_id, "v2");
  EXPECT_EQ(boarded[0].time, h(8) + 300 + 400 + 300);
  // Rejoin after the default 600 s.
  auto const signins = find(res.log, EventKind::SignIn, "v1");
  ASSERT_GE(signins.size(), 2u);
  EXPECT_EQ(signins[1].time, h(8) + 900);
  for (auto const& m : prop::log_invariants(s, res)) ADD_FAILURE() << m;
}

TEST(Simulator, ResponseExactlyAtDeadlineKeepsVehicle) {
  auto s = base_scenario(2);
  s.behavior.reaction = ReactionTimeModel::constant(300.0);
  s.removal = RemovalPolicy{{{300, 0}}};
  s.requests = {request("r1", 1, 2, h(8)), request("r2", 3, 0, h(9))};
  auto const res = run(s);
  EXPECT_TRUE(find(res.log, EventKind::RemovedByServer).empty());
  EXPECT_EQ(res.summary.served, 2u);
}

TEST(Simulator, AdminRemovalWaitsForRidersToAlight) {
  auto s = base_scenario(2);
  s.requests = {request("r1", 1, 2, h(8))};
  s.admin_removals = {{"v1", h(8) + 300}};
  auto const res = run(s);
  auto const alighted = find(res.log, EventKind::Alighted, "r1");
  auto const removed = find(res.log, EventKind::RemovedByAdmin, "v1");
  ASSERT_EQ(alighted.size(), 1u);
  ASSERT_EQ(removed.size(), 1u);
  EXPECT_EQ(alighted[0].vehicle_id, "v1");
  // Alighted at 08:03:50 (200 + 30 + 200 s); removal after the dropoff dwell.
  EXPECT_EQ(alighted[0].time, h(8) + 430);
  EXPECT_EQ(removed[0].time, h(8) + 460);
  for (auto const& m : prop::log_invariants(s, res)) ADD_FAILURE() << m;
}

TEST(Simulator, RiderCancelBeforePickup) {
  auto s = base_scenario();
  auto r = request("r1", 1, 2, h(8));
  r.cancel_time = h(8) + 50;
  s.requests = {r, request("r2", 2, 3, h(8) + 60)};
  auto const res = run(s);
  auto const canceled = find(res.log, EventKind::Canceled, "r1");
  ASSERT_EQ(canceled.size(), 1u);
  EXPECT_EQ(canceled[0].time, h(8) + 50);
  EXPECT_EQ(canceled[0].payload.at("reason"), "rider");
  EXPECT_TRUE(find(res.log, EventKind::Boarded, "r1").empty());
  EXPECT_EQ(res.summary.canceled_by_rider, 1u);
  EXPECT_EQ(res.summary.served, 1u);
  for (auto const& m : prop::log_invariants(s, res)) ADD_FAILURE() << m;
}

TEST(Simulator, UnservableAndLateRequestsCanceledAtEndOfService) {
  auto s = base_scenario();
  s.vehicles[0].capacity = 2;
  s.requests = {request("big", 1, 2, h(18), 3), request("late", 1, 2, h(19, 30))};
  auto const res = run(s);
  auto const big = find(res.log, EventKind::Canceled, "big");
  auto const late = find(res.log, EventKind::Canceled, "late");
  ASSERT_EQ(big.size(), 1u);
  ASSERT_EQ(late.size(), 1u);
  EXPECT_EQ(big[0].time, kServiceEnd);
  EXPECT_EQ(big[0].payload.at("reason"), "end_of_service");
  EXPECT_EQ(late[0].time, h(19, 30));
  EXPECT_EQ(res.summary.canceled_end_of_service, 2u);
  EXPECT_TRUE(find(res.log, EventKind::Assigned).empty());
}

TEST(Simulator, EarlyRequestWaitsForServiceStart) {
  auto s = base_scenario();
  s.requests = {request("r1", 1, 2, h(5, 30))};
  auto const res = run(s);
  auto const assigned = find(res.log, EventKind::Assigned, "r1");
  ASSERT_EQ(assigned.size(), 1u);
  EXPECT_EQ(assigned[0].time, kServiceStart);
}

TEST(Simulator, ShiftEndDrainsBeforeSignOut) {
  auto s = base_scenario();
  s.shifts.windows["v1"] = {{kServiceStart, h(8) + 300}};
  s.requests = {request("r1", 1, 2, h(8))};
  auto const res = run(s);
  auto const alighted = find(res.log, EventKind::Alighted, "r1");
  auto const out = find(res.log, EventKind::SignOut, "v1");
  ASSERT_EQ(alighted.size(), 1u);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].time, alighted[0].time + 30);
}

TEST(Simulator, NoShowsAreReportedAfterWaiting) {
  auto s = base_scenario();
  s.behavior.p_noshow = 1.0;
  s.behavior.noshow_wait_s = 120;
  s.requests = {request("r1", 1, 2, h(8))};
  auto const res = run(s);
  auto const ns = find(res.log, EventKind::NoShowReported, "r1");
  ASSERT_EQ(ns.size(), 1u);
  EXPECT_EQ(ns[0].time, h(8) + 200 + 120);
  EXPECT_EQ(res.summary.no_shows, 1u);
}

TEST(Simulator, PoolsCompatibleTrips) {
  auto s = base_scenario();
  s.dispatch.stretch_factor = 3.0;
  s.requests = {request("a", 1, 3, h(8)), request("b", 1, 3, h(8) + 5)};
  auto const res = run(s);
  EXPECT_EQ(res.summary.served, 2u);
  std::size_t shared = 0;
  for (auto const& e : find(res.log, EventKind::DriverResponded)) {
    shared = std::max(shared, e.payload.at("onboard").size());
  }
  EXPECT_EQ(shared, 2u);
}

TEST(Simulator, InvalidScenarioNamesTheReference) {
  auto s = base_scenario();
  s.vehicles[0].zone_id = "nowhere";
  try {
    run(s);
    FAIL();
  } catch (Error const& e) {
    EXPECT_EQ(e.code(), "ScenarioInvalid");
    EXPECT_NE(std::string{e.what()}.find("nowhere"), std::string::npos);
  }
}

TEST(Simulator, SameSeedHashIdenticalLogs) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto const s = gen::random_scenario(seed);
    EXPECT_EQ(prop::log_hash(run(s).log), prop::log_hash(run(s).log)) << "seed " << seed;
  }
  auto const wa = gen::west_atlanta_scenario(5);
  EXPECT_EQ(run(wa).log.to_jsonl(), run(wa).log.to_jsonl());
}

TEST(Simulator, SeedChangesTheRun) {
  auto a = gen::west_atlanta_scenario(1);
  auto b = gen::west_atlanta_scenario(1);
  b.seed = 2;
  EXPECT_NE(prop::log_hash(run(a).log), prop::log_hash(run(b).log));
}

TEST(Simulator, RandomScenariosKeepInvariants) {
  std::size_t served = 0, removed = 0, noshows = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto const s = gen::random_scenario(seed);
    auto const res = run(s);
    auto const v = prop::log_invariants(s, res);
    ASSERT_TRUE(v.empty()) << "seed " << seed << ": " << v.front();
    served += res.summary.served;
    removed += res.summary.removed_by_server;
    noshows += res.summary.no_shows;
  }
  EXPECT_GT(served, 1000u);
  EXPECT_GT(removed, 0u);
  EXPECT_GT(noshows, 0u);
}

TEST(Simulator, WestAtlantaWaitInBand) {
  auto const res = run(gen::west_atlanta_scenario(1));
  EXPECT_EQ(res.summary.requests, 89u);
  EXPECT_GE(res.summary.mean_wait_s, 4 * 60.0);
  EXPECT_LE(res.summary.mean_wait_s, 14 * 60.0);
}
