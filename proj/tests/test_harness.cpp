#include <doctest.h>

#include <cmath>
#include <sstream>

#include "stride/error.hpp"
#include "stride/harness/experiments.hpp"

using namespace stride;
using namespace stride::harness;

namespace {

std::string config_error_path(const std::string& text)
{
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string csv(const TrajectoryLog& log)
{
  std::ostringstream out;
  log.write_csv(out);
  return out.str();
}

} // namespace

TEST_CASE("scenario parsing reports the offending key")
{
  CHECK(config_error_path(R"({"seed": 1})") == "kind");
  CHECK(config_error_path(R"({"kind": "swim"})") == "kind");
  CHECK(config_error_path(R"({"kind": "walk", "walk": {"stepp_length": 0.1}})") == "walk.stepp_length");
  CHECK(config_error_path(R"({"kind": "walk", "tick": -0.01})") == "tick");
  CHECK(config_error_path(R"({"kind": "moving_ball", "ball": {"min_samples": 2}})") == "ball.min_samples");
  CHECK(config_error_path(R"({"kind": "push_recovery", "push": {"retraction": 2.5}})") == "push.retraction");
  CHECK(config_error_path(R"({"kind": "high_jump", "jump": {}})") == "jump");
  CHECK(config_error_path("{ not json") == "");

  const auto s = parse_scenario(R"({"kind": "moving_ball", "seed": 9, "kick": {"leg": "right"}})", "mb");
  CHECK(s.name == "mb");
  CHECK(s.seed == 9);
  REQUIRE(s.kick.leg.has_value());
  CHECK(*s.kick.leg == gait::Leg::Right);
  CHECK_FALSE(parse_scenario(R"({"kind": "moving_ball", "kick": {"leg": "either"}})").kick.leg.has_value());
}

TEST_CASE("pendulum push model")
{
  CHECK(momentum_transfer(1.0, 5.0, 1.0, 17.5) == doctest::Approx(5.0 / 17.5).epsilon(1e-12));
  CHECK(pendulum_push(0.0, 5.0, 0.8, 19.0) == 0.0);
  // Retraction equal to the length lifts the bob by the full length.
  CHECK(pendulum_impact_speed(2.0, 2.0, 9.81) == doctest::Approx(std::sqrt(2.0 * 9.81 * 2.0)).epsilon(1e-12));
  const double half = pendulum_push(0.5, 5.0, 0.4, 19.0);
  CHECK(pendulum_push(0.5, 5.0, 0.8, 19.0) == doctest::Approx(2.0 * half).epsilon(1e-12));
  CHECK(pendulum_push(0.6, 5.0, 0.8, 19.0) > pendulum_push(0.5, 5.0, 0.8, 19.0));
}

TEST_CASE("flight time")
{
  CHECK(takeoff_velocity(0.262, 9.81) == doctest::Approx(1.285).epsilon(1e-3));
  CHECK(flight_time(takeoff_velocity(0.262, 9.81), 9.81) == doctest::Approx(0.262).epsilon(1e-9));
  CHECK(flight_time(0.0, 9.81) == 0.0);
}

TEST_CASE("undisturbed walking is periodic and quiet")
{
  Scenario s;
  s.kind = ScenarioKind::Walk;
  s.duration = 10.0;
  const auto r = run_scenario(s);
  CHECK(r.failures.empty());
  CHECK(r.metrics["events"] == 0);
  CHECK(r.metrics["fallen"] == false);
  CHECK(r.metrics["periodicity_error"].get<double>() < 1e-9);
  CHECK(r.log.size() == 1001);
}

TEST_CASE("zero pushes need no capture steps")
{
  Scenario s;
  s.kind = ScenarioKind::PushRecovery;
  const auto trial = push_recovery_trial(s, 0.0);
  CHECK(trial.success);
  REQUIRE(trial.pushes.size() == 3);
  for (const auto& p : trial.pushes) {
    CHECK(p.recovered);
    CHECK(p.capture_steps == 0);
  }
}

TEST_CASE("push below and above the threshold")
{
  Scenario s;
  s.kind = ScenarioKind::PushRecovery;
  const auto search = max_recoverable_push(s, 0.01);
  CHECK(search.lo > 0.0);
  CHECK(search.hi - search.lo <= 0.01);
  CHECK(push_recovery_trial(s, search.lo).success);
  CHECK_FALSE(push_recovery_trial(s, search.hi).success);
  const auto small = push_recovery_trial(s, 0.5 * search.lo);
  CHECK(small.success);
  for (const auto& p : small.pushes) {
    CHECK(p.capture_steps >= 1);
  }
}

TEST_CASE("standing robot cannot absorb a push")
{
  auto s = parse_scenario(R"({"kind": "push_recovery", "gait": {"frequency": 0}, "push": {"find_max": true}})");
  const auto search = max_recoverable_push(s, 0.005);
  CHECK(search.lo < 0.01);
}

TEST_CASE("ball that stops short of the foot line is never kicked")
{
  Scenario s;
  s.kind = ScenarioKind::MovingBall;
  s.ball.min_distance = s.ball.max_distance = 3.0;
  s.ball.min_speed = s.ball.max_speed = 0.6;
  const auto r = run_scenario(s);
  CHECK(r.metrics["goals"] == 0);
  CHECK(r.metrics["attempts"] == 3);
  bool infeasible = false;
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    infeasible = infeasible || r.log.events(i).find("infeasible") != std::string::npos;
    CHECK(r.log.events(i).find("kick") == std::string::npos);
  }
  CHECK(infeasible);
}

TEST_CASE("noiseless moving ball is met by every kick")
{
  Scenario s;
  s.kind = ScenarioKind::MovingBall;
  s.seed = 4;
  const auto trial = moving_ball_trial(s);
  CHECK(trial.successes == 3);
  for (const auto& a : trial.attempts) {
    REQUIRE(a.apex.has_value());
    REQUIRE(a.true_arrival.has_value());
    CHECK(std::abs(*a.apex - *a.true_arrival) <= s.ball.contact_tolerance);
  }
}

TEST_CASE("team play keeps a striker on each team")
{
  Scenario s;
  s.kind = ScenarioKind::TeamPlay;
  s.duration = 30.0;
  s.team.loss = 0.3;
  std::vector<std::string> trace;
  const auto r = team_play_sim(s, nullptr, &trace);
  CHECK(r.ticks == 3000);
  CHECK(r.violations == 0);
  CHECK(r.dropped > 0);
  REQUIRE_FALSE(trace.empty());
  CHECK(Metrics::parse(trace.front()).contains("epoch"));
}

TEST_CASE("drop-in roles stay fixed")
{
  Scenario s;
  s.kind = ScenarioKind::TeamPlay;
  s.duration = 20.0;
  s.team.mode = behavior::GameMode::DropIn;
  s.team.agent.mode = behavior::GameMode::DropIn;
  s.team.teleport = TeleportConfig{5.0, 0, 1};
  const auto r = team_play_sim(s);
  CHECK(r.violations == 0);
  CHECK(r.swaps == 0);
}

TEST_CASE("same seed, same output")
{
  for (const char* doc : {R"({"kind": "push_recovery", "push": {"delta_v": 0.3}})",
                          R"({"kind": "moving_ball", "ball": {"noise": 0.02}})",
                          R"({"kind": "team_play", "duration": 20, "team": {"loss": 0.2}})"}) {
    const auto s = parse_scenario(doc);
    const auto a = run_scenario(s);
    const auto b = run_scenario(s);
    CHECK(csv(a.log) == csv(b.log));
    CHECK(a.metrics.dump() == b.metrics.dump());
    CHECK(a.trace == b.trace);
  }
}
