#include <cmath>

#include "stride/harness/experiments.hpp"
#include "runners.hpp"

namespace stride::harness {

ScenarioResult run_high_jump(const Scenario& s)
{
  const double g = s.robot.pendulum.gravity;
  const double v = s.jump.takeoff_velocity ? *s.jump.takeoff_velocity : takeoff_velocity(*s.jump.flight_time, g);
  const double airborne = flight_time(v, g);

  ScenarioResult result;
  result.log = TrajectoryLog({"t", "height", "vertical_velocity"});
  const long ticks = std::lround(std::ceil(s.duration / s.tick - 1e-9));
  bool landed = false;
  for (long k = 0; k <= ticks; ++k) {
    const double t = k * s.tick;
    const double tau = std::min(t, airborne);
    const double h = v * tau - 0.5 * g * tau * tau;
    result.log.append({t, h, t < airborne ? v - g * t : 0.0}, k == 0 && v > 0.0 ? "takeoff" : "");
    if (!landed && v > 0.0 && t >= airborne) {
      landed = true;
      result.log.note("landing");
    }
  }

  auto& m = result.metrics;
  m["scenario"] = s.name;
  m["kind"] = to_string(s.kind);
  m["seed"] = s.seed;
  m["takeoff_velocity"] = v;
  m["flight_time"] = airborne;
  m["apex_height"] = v * v / (2.0 * g);
  m["events"] = result.log.event_count();
  return result;
}

ScenarioResult run_scenario(const Scenario& s)
{
  s.validate();
  switch (s.kind) {
  case ScenarioKind::Walk:
    return run_walk(s);
  case ScenarioKind::PushRecovery:
    return run_push(s);
  case ScenarioKind::MovingBall:
    return run_moving_ball(s);
  case ScenarioKind::HighJump:
    return run_high_jump(s);
  case ScenarioKind::TeamPlay:
    return run_team_play(s);
  }
  return {};
}

} // namespace stride::harness
