#include "odmts/simulator.h"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

namespace odmts {

nlohmann::json SimulationSummary::to_json() const {
  return {{"requests", requests},
          {"served", served},
          {"canceled_by_rider", canceled_by_rider},
          {"no_shows", no_shows},
          {"canceled_end_of_service", canceled_end_of_service},
          {"boarded_riders", boarded_riders},
          {"alighted_riders", alighted_riders},
          {"onboard_at_close", onboard_at_close},
          {"removed_by_server", removed_by_server},
          {"removed_by_admin", removed_by_admin},
          {"mean_wait_s", mean_wait_s},
          {"mean_ride_s", mean_ride_s},
          {"mean_total_s", mean_total_s},
          {"driven_m", driven_m}};
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Processing order among events at the same instant. Responses come before
// timer expiries, so a driver answering exactly at the threshold is kept.
enum class EvClass : int {
  ServiceStart,
  ShiftStart,
  Rejoin,
  Arrival,
  ServiceDone,
  NoShowReport,
  DriverResponse,
  TimerExpiry,
  RequestSubmit,
  RiderCancel,
  AdminRemoval,
  RebalanceTick,
  ShiftEnd,
  ServiceEnd,
};

struct SimEvent {
  Seconds time = 0;
  EvClass cls = EvClass::ServiceStart;
  std::uint64_t seq = 0;
  std::size_t subject = 0;
  std::uint64_t token = 0;
  std::size_t aux = 0;

  bool operator>(SimEvent const& o) const {
    if (time != o.time) return time > o.time;
    if (cls != o.cls) return cls > o.cls;
    return seq > o.seq;
  }
};

enum class Mode { Offline, Idle, Awaiting, Driving, Servicing };
enum class Purpose { Leg, Relocate, Rebalance };

std::string_view purpose_name(Purpose p, LegAction a) {
  switch (p) {
    case Purpose::Leg: return a == LegAction::Pickup ? "pickup" : "dropoff";
    case Purpose::Relocate: return "relocate";
    case Purpose::Rebalance: return "rebalance";
  }
  return "?";
}

struct SimVehicle {
  VehicleSpec spec;
  std::string home;
  std::string location;
  Mode mode = Mode::Offline;
  Purpose purpose = Purpose::Leg;
  std::string target;
  std::optional<PlanLeg> active_leg;  // instructed leg while awaiting or driving
  Seconds instructed_at = 0;
  Seconds depart_at = 0;
  Seconds eta = 0;
  Seconds busy_until = 0;
  std::uint64_t generation = 0;
  bool draining = false;
  bool pending_admin = false;
};

class Engine {
public:
  explicit Engine(Scenario const& sc)
      : sc_(sc), rng_(sc.seed), life_(sc.removal, sc.rejoin_cooldown_s) {}

  SimulationResult run() {
    sc_.validate();
    setup();
    while (!events_.empty()) {
      auto const e = events_.top();
      events_.pop();
      dispatch_event(e);
    }
    auto summary = summarize();
    return {std::move(log_), std::move(summary)};
  }

private:
  void schedule(Seconds t, EvClass cls, std::size_t subject, std::uint64_t token = 0, std::size_t aux = 0) {
    events_.push({t, cls, next_event_seq_++, subject, token, aux});
  }

  void setup() {
    for (auto const& spec : sc_.vehicles) {
      SimVehicle s;
      s.spec = spec;
      if (spec.home_stop) {
        s.home = *spec.home_stop;
      } else {
        for (auto const* stop : sc_.area.stops_in_zone(spec.zone_id)) {
          if (stop->is_idle_location) {
            s.home = stop->id;
            break;
          }
        }
      }
      s.location = s.home;
      VehicleSnapshot v;
      v.id = spec.id;
      v.zone_id = spec.zone_id;
      v.capacity = spec.capacity;
      v.available = false;
      v.start_stop = s.home;
      vehicle_index_[spec.id] = vehicles_.size();
      vehicles_.push_back(std::move(s));
      fleet_.push_back(std::move(v));
      life_.add_vehicle(spec.id, spec.zone_id);
    }

    std::set<Seconds> days;
    for (std::size_t k = 0; k < sc_.requests.size(); ++k) {
      auto const& r = sc_.requests[k];
      request_index_[r.id] = k;
      days.insert(r.submit_time / kSecondsPerDay);
      schedule(r.submit_time, EvClass::RequestSubmit, k);
      if (r.cancel_time) {
        schedule(*r.cancel_time, EvClass::RiderCancel, k);
      }
    }
    for (auto const& [vid, windows] : sc_.shifts.windows) {
      auto const i = vehicle_index_.at(vid);
      for (std::size_t w = 0; w < windows.size(); ++w) {
        days.insert(windows[w].sign_in / kSecondsPerDay);
        schedule(windows[w].sign_in, EvClass::ShiftStart, i, 0, w);
        schedule(windows[w].sign_out, EvClass::ShiftEnd, i, 0, w);
      }
    }
    for (auto const& a : sc_.admin_removals) {
      schedule(a.time, EvClass::AdminRemoval, vehicle_index_.at(a.vehicle_id));
    }
    for (auto const d : days) {
      schedule(d * kSecondsPerDay + sc_.service_start_s, EvClass::ServiceStart, 0);
      schedule(d * kSecondsPerDay + sc_.service_end_s, EvClass::ServiceEnd, 0);
    }
  }

  void dispatch_event(SimEvent const& e) {
    switch (e.cls) {
      case EvClass::ServiceStart: on_service_start(e.time); break;
      case EvClass::ServiceEnd: on_service_end(e.time); break;
      case EvClass::ShiftStart: on_shift_start(e.subject, e.time); break;
      case EvClass::ShiftEnd: on_shift_end(e.subject, e.time); break;
      case EvClass::Rejoin: on_rejoin(e.subject, e.time); break;
      case EvClass::Arrival: on_arrival(e.subject, e.token, e.time); break;
      case EvClass::ServiceDone: on_service_done(e.subject, e.token, e.time); break;
      case EvClass::NoShowReport: on_noshow_report(e.subject, e.token, e.aux, e.time); break;
      case EvClass::DriverResponse: on_driver_response(e.subject, e.token, e.time); break;
      case EvClass::TimerExpiry: on_timer_expiry(e.subject, e.token, e.time); break;
      case EvClass::RequestSubmit: on_request_submit(e.subject, e.time); break;
      case EvClass::RiderCancel: on_rider_cancel(e.subject, e.time); break;
      case EvClass::AdminRemoval: on_admin_removal(e.subject, e.time); break;
      case EvClass::RebalanceTick: on_rebalance_tick(e.time); break;
    }
  }

  // --- snapshot bookkeeping -------------------------------------------------

  void refresh(std::size_t i, Seconds now) {
    auto& v = fleet_[i];
    auto const& s = vehicles_[i];
    v.available = s.mode != Mode::Offline && life_.signed_in(s.spec.id) && !s.draining && !s.pending_admin;
    v.needs_instruction = true;
    v.locked_legs = 0;
    switch (s.mode) {
      case Mode::Offline:
      case Mode::Idle:
        v.start_stop = s.location;
        v.start_time = now;
        break;
      case Mode::Awaiting:
        v.start_stop = s.location;
        if (s.purpose == Purpose::Leg) {
          v.start_time = s.instructed_at;
          v.locked_legs = 1;
        } else {
          v.start_time = now;
        }
        break;
      case Mode::Driving:
        if (s.purpose == Purpose::Leg && leg_is_first(i)) {
          v.start_stop = s.location;
          v.start_time = s.depart_at;
          v.needs_instruction = false;
          v.locked_legs = 1;
        } else {
          v.start_stop = s.target;
          v.start_time = s.eta;
        }
        break;
      case Mode::Servicing:
        v.start_stop = s.location;
        v.start_time = std::max(now, s.busy_until);
        break;
    }
  }

  bool leg_is_first(std::size_t i) const {
    auto const& s = vehicles_[i];
    auto const& plan = fleet_[i].plan;
    return s.active_leg && !plan.empty() && plan.front().request_id == s.active_leg->request_id &&
           plan.front().action == s.active_leg->action;
  }

  void refresh_zone(std::string const& zone, Seconds now) {
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (vehicles_[i].spec.zone_id == zone) {
        refresh(i, now);
      }
    }
  }

  Request& request(std::size_t k) { return requests_.at(sc_.requests[k].id); }

  nlohmann::json onboard_ids(std::size_t i) const {
    auto ids = nlohmann::json::array();
    for (auto const& r : fleet_[i].onboard) {
      ids.push_back(r.request_id);
    }
    return ids;
  }

  std::string const& vid(std::size_t i) const { return vehicles_[i].spec.id; }

  // --- instructions -------------------------------------------------------

  void instruct(std::size_t i, Seconds now, Purpose purpose, std::string const& target) {
    auto& s = vehicles_[i];
    ++s.generation;
    s.mode = Mode::Awaiting;
    s.purpose = purpose;
    s.target = target;
    s.instructed_at = now;
    s.active_leg.reset();
    std::optional<std::string> request_id;
    LegAction action = LegAction::Pickup;
    if (purpose == Purpose::Leg) {
      s.active_leg = fleet_[i].plan.front();
      request_id = s.active_leg->request_id;
      action = s.active_leg->action;
    }
    log_.append(now, EventKind::VehicleDispatched, vid(i), request_id, std::nullopt,
                {{"target", target}, {"purpose", std::string{purpose_name(purpose, action)}}});
    if (auto const timer = life_.on_instruction(vid(i), now, fleet_[i].onboard_load())) {
      schedule(timer->deadline, EvClass::TimerExpiry, i, timer->token);
    }
    auto const reaction = sample_reaction_seconds(sc_.behavior.reaction, rng_);
    schedule(now + std::max<Seconds>(0, reaction), EvClass::DriverResponse, i, s.generation);
    refresh(i, now);
  }

  // Called whenever the vehicle is stationary and free to act.
  void issue_next(std::size_t i, Seconds now, bool work_done) {
    auto& s = vehicles_[i];
    s.mode = Mode::Idle;
    s.active_leg.reset();
    if (!life_.signed_in(s.spec.id)) {
      s.mode = Mode::Offline;
      return;
    }
    if (s.pending_admin && fleet_[i].onboard.empty()) {
      do_admin_remove(i, now);
      return;
    }
    auto& v = fleet_[i];
    if (!v.plan.empty()) {
      instruct(i, now, Purpose::Leg, v.plan.front().stop_id);
      return;
    }
    if (s.draining) {
      sign_out(i, now);
      return;
    }
    refresh(i, now);
    if (work_done) {
      auto const target = idle_relocation_target(v, sc_.area, sc_.provider);
      log_.append(now, EventKind::RelocateToIdle, vid(i), std::nullopt, std::nullopt, {{"target", target}});
      if (target != s.location) {
        instruct(i, now, Purpose::Relocate, target);
        return;
      }
    }
    life_.set_status(s.spec.id, VehicleStatus::regular(RegularSub::Idling));
    refresh(i, now);
  }

  // After the plan changed under a vehicle that is waiting for its driver.
  void reconcile(std::size_t i, Seconds now) {
    auto const& s = vehicles_[i];
    if (s.mode != Mode::Awaiting) {
      refresh(i, now);
      return;
    }
    if (s.purpose == Purpose::Leg) {
      if (!leg_is_first(i)) {
        issue_next(i, now, true);
      }
    } else if (!fleet_[i].plan.empty()) {
      issue_next(i, now, false);
    }
    refresh(i, now);
  }

  void sign_out(std::size_t i, Seconds now) {
    auto& s = vehicles_[i];
    life_.sign_out(s.spec.id, now);
    log_.append(now, EventKind::SignOut, vid(i));
    s.mode = Mode::Offline;
    s.draining = false;
    s.active_leg.reset();
    ++s.generation;
    refresh(i, now);
  }

  // Drops every not-yet-boarded request from the vehicle and queues it again.
  void requeue_unboarded(std::size_t i, Seconds now) {
    auto& v = fleet_[i];
    std::vector<std::string> ids;
    for (auto const& leg : v.plan) {
      if (leg.action == LegAction::Pickup) {
        ids.push_back(leg.request_id);
      }
    }
    std::erase_if(v.plan, [&](PlanLeg const& l) { return std::find(ids.begin(), ids.end(), l.request_id) != ids.end(); });
    for (auto const& id : ids) {
      auto& r = requests_.at(id);
      r.state.phase = RequestPhase::Submitted;
      r.state.assigned_vehicle.reset();
      queue_[r.zone_id].push_back(id);
    }
    auto& q = queue_[v.zone_id];
    std::stable_sort(q.begin(), q.end(), [this](std::string const& a, std::string const& b) {
      return request_index_.at(a) < request_index_.at(b);
    });
    refresh(i, now);
  }

  // --- assignment ---------------------------------------------------------

  bool try_assign(std::string const& request_id, Seconds now) {
    if (!accepting_) {
      return false;
    }
    auto& req = requests_.at(request_id);
    refresh_zone(req.zone_id, now);
    auto a = assign(req, fleet_, sc_.provider, sc_.dispatch, now);
    if (!a) {
      return false;
    }
    auto const i = vehicle_index_.at(a->vehicle_id);
    fleet_[i].plan = std::move(a->plan);
    req.state.phase = RequestPhase::Assigned;
    req.state.assigned_vehicle = a->vehicle_id;
    log_.append(now, EventKind::Assigned, a->vehicle_id, req.id, req.rider_id,
                {{"predicted_wait", a->predicted_wait}, {"predicted_ride", a->predicted_ride}, {"objective", a->objective}});
    auto const& s = vehicles_[i];
    if (s.mode == Mode::Idle || (s.mode == Mode::Awaiting && s.purpose != Purpose::Leg)) {
      issue_next(i, now, false);
    } else {
      refresh(i, now);
    }
    return true;
  }

  void retry_queue(std::string const& zone, Seconds now) {
    if (!accepting_) {
      return;
    }
    auto& q = queue_[zone];
    std::vector<std::string> pending;
    pending.swap(q);
    for (auto const& id : pending) {
      if (!try_assign(id, now)) {
        q.push_back(id);
      }
    }
  }

  void retry_all(Seconds now) {
    for (auto const& [zone, z] : sc_.area.zones) {
      retry_queue(zone, now);
    }
  }

  // --- event handlers -----------------------------------------------------

  void on_service_start(Seconds now) {
    accepting_ = true;
    service_day_end_ = now - sc_.service_start_s + sc_.service_end_s;
    retry_all(now);
    if (sc_.dispatch.rebalance_period_s > 0 && !sc_.forecast.by_hour.empty()) {
      schedule(now + sc_.dispatch.rebalance_period_s, EvClass::RebalanceTick, 0);
    }
  }

  void on_service_end(Seconds now) {
    accepting_ = false;
    for (auto& [zone, q] : queue_) {
      for (auto const& id : q) {
        auto& r = requests_.at(id);
        r.state.phase = RequestPhase::CanceledByRider;
        r.state.cancel_time = now;
        closed_by_service_end_.insert(id);
        log_.append(now, EventKind::Canceled, std::nullopt, id, r.rider_id, {{"reason", "end_of_service"}});
      }
      q.clear();
    }
  }

  void on_shift_start(std::size_t i, Seconds now) {
    auto& s = vehicles_[i];
    if (life_.signed_in(s.spec.id)) {
      s.draining = false;
      refresh(i, now);
      return;
    }
    auto const removed = life_.removed_at(s.spec.id);
    if (removed && now < *removed + sc_.rejoin_cooldown_s) {
      schedule(*removed + sc_.rejoin_cooldown_s, EvClass::Rejoin, i);
      return;
    }
    s.location = s.home;
    life_.sign_in(s.spec.id, now);
    s.mode = Mode::Idle;
    s.draining = false;
    log_.append(now, EventKind::SignIn, vid(i), std::nullopt, std::nullopt, {{"stop", s.location}, {"zone", s.spec.zone_id}});
    refresh(i, now);
    retry_queue(s.spec.zone_id, now);
  }

  void on_shift_end(std::size_t i, Seconds now) {
    auto& s = vehicles_[i];
    if (!life_.signed_in(s.spec.id)) {
      return;
    }
    s.draining = true;
    bool const has_work = !fleet_[i].plan.empty() || !fleet_[i].onboard.empty();
    bool const stationary = s.mode == Mode::Idle || (s.mode == Mode::Awaiting && s.purpose != Purpose::Leg);
    if (!has_work && (stationary || s.mode == Mode::Driving)) {
      if (s.mode == Mode::Driving) {
        s.location = s.target;
      }
      sign_out(i, now);
      return;
    }
    refresh(i, now);
  }

  void on_rejoin(std::size_t i, Seconds now) {
    auto& s = vehicles_[i];
    if (life_.signed_in(s.spec.id)) {
      return;
    }
    auto const it = sc_.shifts.windows.find(s.spec.id);
    if (it == sc_.shifts.windows.end()) {
      return;
    }
    bool const in_shift = std::any_of(it->second.begin(), it->second.end(),
                                      [now](ShiftWindow const& w) { return w.sign_in <= now && now < w.sign_out; });
    if (!in_shift) {
      return;
    }
    life_.sign_in(s.spec.id, now);
    s.mode = Mode::Idle;
    s.draining = false;
    log_.append(now, EventKind::SignIn, vid(i), std::nullopt, std::nullopt, {{"stop", s.location}, {"zone", s.spec.zone_id}});
    refresh(i, now);
    retry_queue(s.spec.zone_id, now);
  }

  void on_driver_response(std::size_t i, std::uint64_t generation, Seconds now) {
    auto& s = vehicles_[i];
    if (generation != s.generation || s.mode != Mode::Awaiting) {
      return;
    }
    life_.on_response(s.spec.id, now, fleet_[i].onboard_load());
    auto const seconds = sc_.provider.drive_time(s.location, s.target);
    auto const meters = sc_.provider.drive_distance(s.location, s.target);
    LegAction const action = s.active_leg ? s.active_leg->action : LegAction::Pickup;
    log_.append(now, EventKind::DriverResponded, vid(i), s.active_leg ? std::optional{s.active_leg->request_id} : std::nullopt,
                std::nullopt,
                {{"from", s.location},
                 {"to", s.target},
                 {"meters", meters},
                 {"seconds", seconds},
                 {"purpose", std::string{purpose_name(s.purpose, action)}},
                 {"onboard", onboard_ids(i)}});
    s.mode = Mode::Driving;
    s.depart_at = now;
    s.eta = now + seconds;
    schedule(s.eta, EvClass::Arrival, i, s.generation);
    refresh(i, now);
  }

  void on_arrival(std::size_t i, std::uint64_t generation, Seconds now) {
    auto& s = vehicles_[i];
    if (generation != s.generation || s.mode != Mode::Driving) {
      return;
    }
    s.location = s.target;
    auto& v = fleet_[i];
    if (s.purpose == Purpose::Leg && leg_is_first(i)) {
      auto const leg = v.plan.front();
      auto& req = requests_.at(leg.request_id);
      if (leg.action == LegAction::Pickup) {
        log_.append(now, EventKind::ArrivedPickup, vid(i), req.id, req.rider_id, {{"stop", leg.stop_id}});
        req.state.phase = RequestPhase::Waiting;
        bool noshow = false;
        if (sc_.behavior.p_noshow > 0.0) {
          std::bernoulli_distribution d{sc_.behavior.p_noshow};
          noshow = d(rng_);
        }
        s.mode = Mode::Servicing;
        s.active_leg.reset();
        if (noshow) {
          std::erase_if(v.plan, [&](PlanLeg const& l) { return l.request_id == req.id; });
          s.busy_until = now + sc_.behavior.noshow_wait_s;
          life_.set_status(s.spec.id, VehicleStatus::regular(RegularSub::WaitingForPassengers));
          schedule(s.busy_until, EvClass::NoShowReport, i, s.generation, request_index_.at(req.id));
        } else {
          log_.append(now, EventKind::Boarded, vid(i), req.id, req.rider_id, {{"group_size", req.group_size}});
          req.state.phase = RequestPhase::Riding;
          req.state.board_time = now;
          v.onboard.push_back({req.id, req.group_size, now,
                               direct_ride_s(req.origin_stop, req.destination_stop, sc_.provider, sc_.dispatch)});
          v.plan.erase(v.plan.begin());
          s.busy_until = now + sc_.dispatch.dwell_s;
          schedule(s.busy_until, EvClass::ServiceDone, i, s.generation);
        }
      } else {
        log_.append(now, EventKind::Alighted, vid(i), req.id, req.rider_id, {{"group_size", req.group_size}});
        req.state.phase = RequestPhase::Served;
        req.state.alight_time = now;
        std::erase_if(v.onboard, [&](OnboardRider const& r) { return r.request_id == req.id; });
        v.plan.erase(v.plan.begin());
        s.mode = Mode::Servicing;
        s.active_leg.reset();
        s.busy_until = now + sc_.dispatch.dwell_s;
        schedule(s.busy_until, EvClass::ServiceDone, i, s.generation);
      }
      refresh(i, now);
    } else {
      issue_next(i, now, s.purpose == Purpose::Leg);
    }
    retry_queue(s.spec.zone_id, now);
  }

  void on_service_done(std::size_t i, std::uint64_t generation, Seconds now) {
    auto& s = vehicles_[i];
    if (generation != s.generation || s.mode != Mode::Servicing) {
      return;
    }
    issue_next(i, now, true);
    retry_queue(s.spec.zone_id, now);
  }

  void on_noshow_report(std::size_t i, std::uint64_t generation, std::size_t k, Seconds now) {
    auto& req = request(k);
    auto& s = vehicles_[i];
    if (!req.state.terminal()) {
      log_.append(now, EventKind::NoShowReported, vid(i), req.id, req.rider_id);
      req.state.phase = RequestPhase::NoShow;
      req.state.cancel_time = now;
    }
    if (generation == s.generation && s.mode == Mode::Servicing) {
      issue_next(i, now, true);
    }
    retry_queue(s.spec.zone_id, now);
  }

  void on_timer_expiry(std::size_t i, std::uint64_t token, Seconds now) {
    auto& s = vehicles_[i];
    auto const threshold = life_.pending_timer(s.spec.id) ? life_.pending_timer(s.spec.id)->deadline -
                                                                life_.pending_timer(s.spec.id)->armed_at
                                                          : 0;
    auto const outcome = life_.on_timer_expiry(s.spec.id, token, now);
    if (outcome != TimerExpiry::Removed) {
      return;
    }
    ++removed_by_server_;
    log_.append(now, EventKind::RemovedByServer, vid(i), std::nullopt, std::nullopt, {{"threshold_s", threshold}});
    log_.append(now, EventKind::SignOut, vid(i));
    s.mode = Mode::Offline;
    s.draining = false;
    s.active_leg.reset();
    ++s.generation;
    requeue_unboarded(i, now);
    if (sc_.behavior.rejoin_after_s >= 0) {
      schedule(now + std::max(sc_.behavior.rejoin_after_s, sc_.rejoin_cooldown_s), EvClass::Rejoin, i);
    }
    retry_queue(s.spec.zone_id, now);
  }

  void do_admin_remove(std::size_t i, Seconds now) {
    auto& s = vehicles_[i];
    life_.admin_remove(s.spec.id, now);
    ++removed_by_admin_;
    log_.append(now, EventKind::RemovedByAdmin, vid(i));
    log_.append(now, EventKind::SignOut, vid(i));
    s.mode = Mode::Offline;
    s.pending_admin = false;
    s.draining = false;
    s.active_leg.reset();
    ++s.generation;
    requeue_unboarded(i, now);
    retry_queue(s.spec.zone_id, now);
  }

  void on_admin_removal(std::size_t i, Seconds now) {
    auto& s = vehicles_[i];
    if (!life_.signed_in(s.spec.id)) {
      return;
    }
    if (s.mode == Mode::Driving) {
      s.location = s.target;
    }
    if (fleet_[i].onboard.empty()) {
      do_admin_remove(i, now);
      return;
    }
    // Riders aboard: hand off waiting requests now, remove after the last dropoff.
    s.pending_admin = true;
    requeue_unboarded(i, now);
    reconcile(i, now);
    retry_queue(s.spec.zone_id, now);
  }

  void on_request_submit(std::size_t k, Seconds now) {
    auto const& src = sc_.requests[k];
    auto [it, inserted] = requests_.emplace(src.id, src);
    auto& req = it->second;
    req.state = {};
    log_.append(now, EventKind::RequestSubmitted, std::nullopt, req.id, req.rider_id,
                {{"zone", req.zone_id},
                 {"origin", req.origin_stop},
                 {"destination", req.destination_stop},
                 {"group_size", req.group_size},
                 {"channel", std::string{to_string(req.channel)}}});
    Seconds const day = now / kSecondsPerDay * kSecondsPerDay;
    if (now >= day + sc_.service_end_s) {
      req.state.phase = RequestPhase::CanceledByRider;
      req.state.cancel_time = now;
      closed_by_service_end_.insert(req.id);
      log_.append(now, EventKind::Canceled, std::nullopt, req.id, req.rider_id, {{"reason", "end_of_service"}});
      return;
    }
    if (!try_assign(req.id, now)) {
      queue_[req.zone_id].push_back(req.id);
    }
  }

  void on_rider_cancel(std::size_t k, Seconds now) {
    auto const it = requests_.find(sc_.requests[k].id);
    if (it == requests_.end()) {
      return;
    }
    auto& req = it->second;
    if (req.state.terminal() || req.state.phase == RequestPhase::Riding) {
      return;
    }
    auto& q = queue_[req.zone_id];
    if (auto const pos = std::find(q.begin(), q.end(), req.id); pos != q.end()) {
      q.erase(pos);
    }
    auto const outcome = handle_cancel(req.id, requests_, fleet_, now);
    log_.append(now, EventKind::Canceled, outcome.vehicle_id, req.id, req.rider_id, {{"reason", "rider"}});
    if (outcome.vehicle_id) {
      reconcile(vehicle_index_.at(*outcome.vehicle_id), now);
    }
    retry_queue(req.zone_id, now);
  }

  void on_rebalance_tick(Seconds now) {
    if (!accepting_) {
      return;
    }
    auto const weights = sc_.forecast.weights_at(hour_of_day(now));
    for (auto const& [zone_id, zone] : sc_.area.zones) {
      std::vector<IdleVehicle> idle;
      for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        auto const& s = vehicles_[i];
        if (s.spec.zone_id == zone_id && s.mode == Mode::Idle && fleet_[i].plan.empty() && !s.draining &&
            life_.signed_in(s.spec.id)) {
          idle.push_back({s.spec.id, s.location});
        }
      }
      std::vector<std::string> idle_stops;
      std::map<std::string, double> zone_weights;
      for (auto const* stop : sc_.area.stops_in_zone(zone_id)) {
        if (stop->is_idle_location) {
          idle_stops.push_back(stop->id);
        }
        if (auto const w = weights.find(stop->id); w != weights.end()) {
          zone_weights[stop->id] = w->second;
        }
      }
      bool const queued = !queue_[zone_id].empty();
      for (auto const& cmd : rebalance(idle, idle_stops, zone_weights, sc_.provider, queued)) {
        auto const i = vehicle_index_.at(cmd.vehicle_id);
        log_.append(now, EventKind::RebalanceCommand, cmd.vehicle_id, std::nullopt, std::nullopt,
                    {{"target", cmd.target_stop}});
        instruct(i, now, Purpose::Rebalance, cmd.target_stop);
      }
    }
    if (now + sc_.dispatch.rebalance_period_s < service_day_end_) {
      schedule(now + sc_.dispatch.rebalance_period_s, EvClass::RebalanceTick, 0);
    }
  }

  SimulationSummary summarize() const {
    SimulationSummary sum;
    sum.requests = requests_.size();
    double wait = 0.0;
    double ride = 0.0;
    for (auto const& [id, r] : requests_) {
      switch (r.state.phase) {
        case RequestPhase::Served:
          ++sum.served;
          wait += static_cast<double>(*r.state.board_time - r.submit_time);
          ride += static_cast<double>(*r.state.alight_time - *r.state.board_time);
          break;
        case RequestPhase::NoShow: ++sum.no_shows; break;
        case RequestPhase::CanceledByRider:
          if (closed_by_service_end_.contains(id)) {
            ++sum.canceled_end_of_service;
          } else {
            ++sum.canceled_by_rider;
          }
          break;
        default: break;
      }
    }
    if (sum.served > 0) {
      sum.mean_wait_s = wait / static_cast<double>(sum.served);
      sum.mean_ride_s = ride / static_cast<double>(sum.served);
      sum.mean_total_s = sum.mean_wait_s + sum.mean_ride_s;
    }
    for (auto const& e : log_) {
      if (e.kind == EventKind::Boarded) sum.boarded_riders += e.payload.value("group_size", 1);
      if (e.kind == EventKind::Alighted) sum.alighted_riders += e.payload.value("group_size", 1);
      if (e.kind == EventKind::DriverResponded) sum.driven_m += e.payload.value("meters", 0.0);
    }
    for (auto const& v : fleet_) {
      sum.onboard_at_close += static_cast<std::size_t>(v.onboard_load());
    }
    sum.removed_by_server = removed_by_server_;
    sum.removed_by_admin = removed_by_admin_;
    return sum;
  }

  Scenario const& sc_;
  Rng rng_;
  FleetLifecycle life_;
  EventLog log_;
  std::vector<SimVehicle> vehicles_;
  std::vector<VehicleSnapshot> fleet_;
  std::map<std::string, std::size_t> vehicle_index_;
  std::map<std::string, std::size_t> request_index_;
  std::map<std::string, Request> requests_;
  std::map<std::string, std::vector<std::string>> queue_;
  std::set<std::string> closed_by_service_end_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> events_;
  std::uint64_t next_event_seq_ = 0;
  bool accepting_ = false;
  Seconds service_day_end_ = 0;
  std::size_t removed_by_server_ = 0;
  std::size_t removed_by_admin_ = 0;
};

}  // namespace

SimulationResult run(Scenario const& scenario) { return Engine{scenario}.run(); }

}  // namespace odmts
