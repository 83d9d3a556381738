#include "properties.h"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <limits>
#include <set>

#include "odmts/lifecycle.h"

namespace prop {

using odmts::Error;
using odmts::EventKind;
using odmts::Seconds;

namespace {

struct ModelVehicle {
  std::string id;
  std::string zone;
  bool on = false;
  std::optional<Seconds> removed;
  std::optional<std::uint64_t> token;
};

struct Armed {
  std::size_t vehicle;
  std::uint64_t token;
  Seconds deadline;
};

}  // namespace

LifecycleTraceReport lifecycle_trace(std::uint64_t seed) {
  std::mt19937_64 rng{seed};
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>{lo, hi}(rng); };
  LifecycleTraceReport rep;
  auto fail = [&](std::string msg) {
    if (rep.violations.size() < 10) rep.violations.push_back("seed " + std::to_string(seed) + ": " + msg);
  };

  Seconds const first = uniform(0, 1) == 0 ? 0 : uniform(1, 400);
  Seconds const threshold_a = uniform(30, 300);
  Seconds const threshold_b = uniform(30, 300);
  Seconds const switch_at = first + uniform(1, 3000);
  auto model_threshold = [&](Seconds t) -> std::optional<Seconds> {
    if (t >= switch_at) return threshold_b;
    if (t >= first) return threshold_a;
    return std::nullopt;
  };
  Seconds const cooldown = uniform(0, 1) == 0 ? 0 : uniform(1, 600);

  // Entries deliberately listed out of order half the time.
  std::vector<odmts::RemovalPolicy::Entry> entries{{threshold_a, first}, {threshold_b, switch_at}};
  if (uniform(0, 1) == 1) std::swap(entries[0], entries[1]);
  odmts::FleetLifecycle lc{odmts::RemovalPolicy{entries}, cooldown};

  std::vector<ModelVehicle> mv;
  int const zones = uniform(1, 2);
  for (int z = 0; z < zones; ++z) {
    int const n = uniform(1, 4);
    for (int k = 0; k < n; ++k) {
      mv.push_back({"z" + std::to_string(z) + "v" + std::to_string(k), "z" + std::to_string(z), false, {}, {}});
      lc.add_vehicle(mv.back().id, mv.back().zone);
    }
  }
  auto model_count = [&](std::string const& zone) {
    return static_cast<int>(std::count_if(mv.begin(), mv.end(), [&](auto const& v) { return v.zone == zone && v.on; }));
  };
  auto expect_throw = [&](auto&& fn, std::string const& code, std::string const& what) {
    try {
      fn();
      fail(what + ": expected " + code);
    } catch (Error const& e) {
      if (e.code() != code) fail(what + ": got " + e.code() + " instead of " + code);
    }
  };

  std::vector<Armed> armed;
  auto fire_until = [&](Seconds limit, bool inclusive) {
    std::sort(armed.begin(), armed.end(), [](Armed const& a, Armed const& b) {
      return a.deadline != b.deadline ? a.deadline < b.deadline : a.token < b.token;
    });
    std::size_t k = 0;
    for (; k < armed.size(); ++k) {
      auto const& a = armed[k];
      if (inclusive ? a.deadline > limit : a.deadline >= limit) break;
      auto& v = mv[a.vehicle];
      odmts::TimerExpiry expected = odmts::TimerExpiry::Stale;
      if (v.on && v.token == a.token) {
        expected = model_count(v.zone) <= 1 ? odmts::TimerExpiry::ExemptLastVehicle : odmts::TimerExpiry::Removed;
      }
      int const before = lc.signed_in_count(v.zone);
      auto const got = lc.on_timer_expiry(v.id, a.token, a.deadline);
      if (got != expected) fail("expiry of " + v.id + " at " + std::to_string(a.deadline) + " disagrees with model");
      if (got == odmts::TimerExpiry::Removed && before < 2) fail("last vehicle of " + v.zone + " removed");
      switch (expected) {
        case odmts::TimerExpiry::Removed:
          ++rep.removed;
          v.on = false;
          v.removed = a.deadline;
          v.token.reset();
          break;
        case odmts::TimerExpiry::ExemptLastVehicle:
          ++rep.exempt;
          v.token.reset();
          break;
        case odmts::TimerExpiry::Stale:
          ++rep.stale;
          break;
      }
    }
    armed.erase(armed.begin(), armed.begin() + static_cast<std::ptrdiff_t>(k));
  };

  Seconds t = 0;
  int const steps = uniform(20, 80);
  for (int step = 0; step < steps; ++step) {
    t += uniform(0, 1) == 0 ? 0 : uniform(1, 240);
    fire_until(t, false);
    auto const i = static_cast<std::size_t>(uniform(0, static_cast<int>(mv.size()) - 1));
    auto& v = mv[i];
    std::string const where = v.id + " at " + std::to_string(t);
    switch (uniform(0, 9)) {
      case 0:
      case 1:  // sign in
        if (v.on) {
          expect_throw([&] { lc.sign_in(v.id, t); }, "AlreadySignedIn", "sign-in " + where);
        } else if (v.removed && t < *v.removed + cooldown) {
          expect_throw([&] { lc.sign_in(v.id, t); }, "CooldownActive", "sign-in " + where);
        } else {
          lc.sign_in(v.id, t);
          v.on = true;
          v.token.reset();
        }
        break;
      case 2:  // sign out
        if (!v.on) {
          expect_throw([&] { lc.sign_out(v.id, t); }, "VehicleOffline", "sign-out " + where);
        } else {
          lc.sign_out(v.id, t);
          v.on = false;
          v.token.reset();
        }
        break;
      case 3:
      case 4:
      case 5: {  // instruction
        int const load = uniform(0, 3) == 0 ? uniform(1, 3) : 0;
        if (!v.on) {
          expect_throw([&] { lc.on_instruction(v.id, t, load); }, "VehicleOffline", "instruction " + where);
          break;
        }
        auto const timer = lc.on_instruction(v.id, t, load);
        auto const thr = model_threshold(t);
        bool const want = load == 0 && thr.has_value();
        if (timer.has_value() != want) {
          fail("instruction " + where + ": timer presence disagrees with model");
          break;
        }
        if (!timer) {
          v.token.reset();
          break;
        }
        if (timer->deadline != t + *thr || timer->armed_at != t) fail("instruction " + where + ": wrong deadline");
        if (t >= switch_at) ++rep.armed_after_switch;
        v.token = timer->token;
        armed.push_back({i, timer->token, timer->deadline});
        break;
      }
      case 6:
      case 7:
      case 8:  // response
        if (v.on) {
          if (v.token) ++rep.answered;
          lc.on_response(v.id, t);
          v.token.reset();
          if (lc.pending_timer(v.id)) fail("response " + where + " left a timer armed");
        }
        break;
      case 9:  // admin removal
        if (!v.on) {
          expect_throw([&] { lc.admin_remove(v.id, t); }, "VehicleOffline", "admin " + where);
        } else {
          lc.admin_remove(v.id, t);
          v.on = false;
          v.removed = t;
          v.token.reset();
        }
        break;
    }
    for (auto const& m : mv) {
      if (lc.signed_in(m.id) != m.on) fail("sign-in state of " + m.id + " diverged at " + std::to_string(t));
    }
  }
  fire_until(std::numeric_limits<Seconds>::max(), true);
  for (auto const& m : mv) {
    if (lc.signed_in(m.id) != m.on) fail("final sign-in state of " + m.id + " diverged");
  }
  return rep;
}

std::vector<std::string> log_invariants(odmts::Scenario const& scenario, odmts::SimulationResult const& result) {
  std::vector<std::string> v;
  auto bad = [&](odmts::EventRecord const& e, std::string const& msg) {
    if (v.size() < 20) v.push_back("seq " + std::to_string(e.seq) + " t=" + std::to_string(e.time) + ": " + msg);
  };

  std::map<std::string, int> capacity;
  std::map<std::string, std::string> zone_of;
  for (auto const& s : scenario.vehicles) {
    capacity[s.id] = s.capacity;
    zone_of[s.id] = s.zone_id;
  }
  struct ReqState {
    bool assigned = false;
    bool boarded = false;
    bool terminal = false;
    int group = 1;
  };
  std::map<std::string, ReqState> reqs;
  std::map<std::string, int> load;
  std::set<std::string> online;
  auto online_in_zone = [&](std::string const& zone) {
    return static_cast<int>(std::count_if(online.begin(), online.end(), [&](auto const& id) { return zone_of[id] == zone; }));
  };

  long boarded = 0, alighted = 0;
  std::optional<odmts::EventRecord> prev;
  for (auto const& e : result.log) {
    if (prev && (e.time < prev->time || e.seq <= prev->seq)) bad(e, "log out of order");
    prev = e;
    std::string const vid = e.vehicle_id.value_or("");
    std::string const rid = e.request_id.value_or("");
    switch (e.kind) {
      case EventKind::RequestSubmitted:
        if (reqs.contains(rid)) bad(e, "request " + rid + " submitted twice");
        reqs[rid].group = e.payload.value("group_size", 1);
        break;
      case EventKind::Assigned: {
        auto& r = reqs[rid];
        if (r.boarded || r.terminal) bad(e, "assignment of finished request " + rid);
        r.assigned = true;
        Seconds const tod = e.time % odmts::kSecondsPerDay;
        if (tod >= scenario.service_end_s || tod < scenario.service_start_s) bad(e, "assignment outside service hours");
        if (!online.contains(vid)) bad(e, "assignment to offline vehicle " + vid);
        break;
      }
      case EventKind::Boarded: {
        auto& r = reqs[rid];
        if (!r.assigned || r.boarded || r.terminal) bad(e, "boarding of " + rid + " out of order");
        r.boarded = true;
        int const g = e.payload.value("group_size", 1);
        boarded += g;
        load[vid] += g;
        if (load[vid] > capacity[vid]) bad(e, "capacity of " + vid + " exceeded");
        if (!online.contains(vid)) bad(e, "boarding on offline vehicle " + vid);
        break;
      }
      case EventKind::Alighted: {
        auto& r = reqs[rid];
        if (!r.boarded || r.terminal) bad(e, "alighting of " + rid + " out of order");
        r.terminal = true;
        int const g = e.payload.value("group_size", 1);
        alighted += g;
        load[vid] -= g;
        break;
      }
      case EventKind::Canceled:
      case EventKind::NoShowReported: {
        auto& r = reqs[rid];
        if (r.boarded || r.terminal) bad(e, "cancellation of " + rid + " after boarding or completion");
        r.terminal = true;
        break;
      }
      case EventKind::SignIn:
        if (!online.insert(vid).second) bad(e, vid + " signed in twice");
        break;
      case EventKind::SignOut:
        if (!online.erase(vid)) bad(e, vid + " signed out while offline");
        if (load[vid] != 0) bad(e, vid + " signed out with riders aboard");
        break;
      case EventKind::RemovedByServer:
        if (!online.contains(vid)) bad(e, "server removal of offline " + vid);
        if (online_in_zone(zone_of[vid]) < 2) bad(e, "server removed the last vehicle of " + zone_of[vid]);
        break;
      default:
        break;
    }
  }

  long aboard = 0;
  for (auto const& [id, l] : load) aboard += l;
  auto const& s = result.summary;
  if (boarded != alighted + aboard) v.push_back("boarded != alighted + onboard");
  if (static_cast<long>(s.boarded_riders) != boarded || static_cast<long>(s.alighted_riders) != alighted ||
      static_cast<long>(s.onboard_at_close) != aboard) {
    v.push_back("summary passenger counts disagree with the log");
  }
  if (s.boarded_riders != s.alighted_riders + s.onboard_at_close) v.push_back("summary violates conservation");
  return v;
}

std::uint64_t log_hash(odmts::EventLog const& log) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : log.to_jsonl()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace prop
