#include <algorithm>
#include <cmath>

#include "stride/harness/experiments.hpp"
#include "stride/harness/walker.hpp"
#include "rng.hpp"
#include "runners.hpp"

namespace stride::harness {

std::vector<std::string> walker_columns()
{
  return {"t",     "phase", "swing", "sag_x",     "sag_v",     "sag_energy_error", "lat_x",
          "lat_v", "left_leg_angle", "left_extension", "right_leg_angle", "right_extension"};
}

std::vector<double> walker_row(double t, const Walker& walker, const gait::GaitParams& gait)
{
  gait::PosePair poses;
  if (walker.stepping()) {
    poses = gait::cpg_waveform(walker.phase(), gait);
  }
  return {t,
          walker.phase().mu,
          walker.swing_leg() == gait::Leg::Left ? 0.0 : 1.0,
          walker.sagittal().offset,
          walker.sagittal().velocity,
          walker.sagittal_energy_error(),
          walker.lateral().offset,
          walker.lateral().velocity,
          poses.left.leg_angle_sagittal,
          poses.left.extension,
          poses.right.leg_angle_sagittal,
          poses.right.extension};
}

namespace {

struct PushPlan
{
  double time = 0.0;
  double sign = 1.0;
  double deadline = 0.0;
};

// Push instants are snapped up to the tick grid so the run is tick-exact.
std::vector<PushPlan> plan_pushes(const Scenario& s)
{
  Rng rng(s.seed);
  std::vector<PushPlan> out;
  double t = s.push.first_after + rng.uniform(0.0, 1.0);
  for (int i = 0; i < s.push.count; ++i) {
    PushPlan p;
    p.time = std::ceil(t / s.tick - 1e-9) * s.tick;
    p.sign = rng.coin() ? 1.0 : -1.0;
    out.push_back(p);
    t += rng.uniform(s.push.min_interval, s.push.max_interval);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].deadline = i + 1 < out.size() ? out[i + 1].time : out[i].time + s.push.min_interval;
  }
  return out;
}

} // namespace

PushTrial push_recovery_trial(const Scenario& s, double delta_v, TrajectoryLog* log)
{
  const auto plans = plan_pushes(s);
  const double band = s.walk.limits.energy_band;
  double end = plans.empty() ? s.duration : plans.back().deadline;
  if (log) {
    end = std::max(end, s.duration);
  }
  const long ticks = std::lround(std::ceil(end / s.tick - 1e-9));

  PushTrial trial;
  trial.pushes.resize(plans.size());
  std::vector<bool> resolved(plans.size(), false);
  std::vector<int> steps(plans.size(), 0);
  std::size_t next = 0;
  int active = -1;

  auto resolve = [&](int i, bool ok) {
    trial.pushes[i].recovered = ok;
    trial.pushes[i].capture_steps = steps[i];
    resolved[i] = true;
    if (active == i) {
      active = -1;
    }
    if (log) {
      log->note(ok ? "recovered" : "not_recovered");
    }
  };

  Walker walker(s);
  if (log) {
    log->append(walker_row(0.0, walker, s.gait));
  }
  for (long k = 0; k < ticks; ++k) {
    const double now = k * s.tick;
    while (next < plans.size() && plans[next].time <= now + 1e-9) {
      if (active >= 0) {
        resolve(active, false);
      }
      const int i = static_cast<int>(next++);
      trial.pushes[i].time = plans[i].time;
      trial.pushes[i].delta_v = plans[i].sign * delta_v;
      walker.push(trial.pushes[i].delta_v);
      if (log) {
        log->note("push");
      }
      active = i;
      const auto& st = walker.sagittal();
      if (std::abs(walker.sagittal_energy_error()) <= band && st.offset * st.velocity <= 1e-12) {
        resolve(i, true);
      }
    }

    const auto exchanges = walker.advance((k + 1) * s.tick - walker.time());
    if (log) {
      log->append(walker_row((k + 1) * s.tick, walker, s.gait));
    }
    for (const auto& ex : exchanges) {
      if (active < 0) {
        continue;
      }
      ++steps[active];
      if (ex.on_cycle) {
        resolve(active, true);
      } else if (steps[active] >= s.walk.max_recovery_steps) {
        resolve(active, false);
      }
    }
    if (walker.fallen()) {
      trial.fell = true;
      if (log) {
        log->note("fall");
      }
      break;
    }
    if (active >= 0 && walker.time() >= plans[active].deadline - 1e-9) {
      resolve(active, false);
    }
  }
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (!resolved[i]) {
      trial.pushes[i].recovered = false;
      trial.pushes[i].capture_steps = steps[i];
    }
  }
  trial.success = !trial.fell && std::all_of(trial.pushes.begin(), trial.pushes.end(),
                                             [](const PushOutcome& p) { return p.recovered; });
  return trial;
}

PushSearch max_recoverable_push(const Scenario& s, double tolerance)
{
  PushSearch r;
  auto ok = [&](double dv) {
    ++r.trials;
    return push_recovery_trial(s, dv).success;
  };
  if (!ok(0.0)) {
    return r;
  }
  double lo = 0.0;
  double hi = s.push.search_max;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) {
      r.lo = r.hi = lo;
      return r;
    }
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  r.lo = lo;
  r.hi = hi;
  return r;
}

ScenarioResult run_walk(const Scenario& s)
{
  ScenarioResult result;
  result.log = TrajectoryLog(walker_columns());
  Walker walker(s);
  result.log.append(walker_row(0.0, walker, s.gait));

  struct Post
  {
    double time, sag_x, sag_v, lat_x, lat_v;
  };
  std::vector<Post> posts;
  const long ticks = std::lround(std::ceil(s.duration / s.tick - 1e-9));
  bool fell = false;
  for (long k = 0; k < ticks && !fell; ++k) {
    const auto exchanges = walker.advance((k + 1) * s.tick - walker.time());
    result.log.append(walker_row((k + 1) * s.tick, walker, s.gait));
    for (const auto& ex : exchanges) {
      posts.push_back({ex.time, ex.sagittal.offset, ex.sagittal.velocity, ex.lateral.offset, ex.lateral.velocity});
    }
    if (walker.fallen()) {
      fell = true;
      result.log.note("fall");
    }
  }

  // One gait cycle is two steps. Lateral errors decay geometrically, so the
  // first half of the run, and at least three cycles, count as transient.
  const std::size_t transient = std::max<std::size_t>(6, posts.size() / 2);
  double periodicity = 0.0;
  for (std::size_t i = transient; i + 2 < posts.size(); ++i) {
    const Post& a = posts[i];
    const Post& b = posts[i + 2];
    const double period = posts[i + 1].time - a.time;
    const double next_period = b.time - posts[i + 1].time;
    periodicity = std::max({periodicity, std::abs(a.sag_x - b.sag_x), std::abs(a.sag_v - b.sag_v),
                            std::abs(a.lat_x - b.lat_x), std::abs(a.lat_v - b.lat_v),
                            std::abs(period - next_period)});
  }

  auto& m = result.metrics;
  m["scenario"] = s.name;
  m["kind"] = to_string(s.kind);
  m["seed"] = s.seed;
  m["steps"] = posts.size();
  m["fallen"] = fell;
  m["periodicity_error"] = periodicity;
  m["events"] = result.log.event_count();
  if (fell) {
    result.failures.push_back("robot fell");
  }
  if (posts.size() > transient + 2 && periodicity > 1e-6) {
    result.failures.push_back("gait is not periodic after the transient");
  }
  return result;
}

ScenarioResult run_push(const Scenario& s)
{
  ScenarioResult result;
  result.log = TrajectoryLog(walker_columns());
  auto& m = result.metrics;
  m["scenario"] = s.name;
  m["kind"] = to_string(s.kind);
  m["seed"] = s.seed;

  std::optional<double> dv = s.push.delta_v;
  if (s.push.retraction) {
    dv = pendulum_push(*s.push.retraction, s.push.pendulum_mass, s.push.transfer, s.robot.pendulum.mass,
                       s.push.pendulum_length, s.robot.pendulum.gravity);
    m["retraction"] = *s.push.retraction;
  }
  if (dv) {
    const auto trial = push_recovery_trial(s, *dv, &result.log);
    m["delta_v"] = *dv;
    m["success"] = trial.success;
    m["fell"] = trial.fell;
    auto pushes = Metrics::array();
    for (const auto& p : trial.pushes) {
      pushes.push_back({{"time", p.time}, {"delta_v", p.delta_v}, {"recovered", p.recovered},
                        {"capture_steps", p.capture_steps}});
    }
    m["pushes"] = pushes;
    if (!trial.success) {
      result.failures.push_back("push not recovered");
    }
  } else {
    // Log a zero-push trial so every run has a trajectory.
    push_recovery_trial(s, 0.0, &result.log);
  }
  if (s.push.find_max) {
    const auto search = max_recoverable_push(s, s.push.tolerance);
    m["max_recoverable_push"] = search.lo;
    m["failing_push"] = search.hi;
    m["search_trials"] = search.trials;
  }
  m["events"] = result.log.event_count();
  return result;
}

} // namespace stride::harness
