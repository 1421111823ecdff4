#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stride/harness/log.hpp"
#include "stride/harness/scenario.hpp"

namespace stride::harness {

/// Impact speed of a pendulum released from a horizontal draw-back of
/// `retraction`: sqrt(2 g L (1 - cos theta)) with sin theta = retraction / L.
double pendulum_impact_speed(double retraction, double pendulum_length = 2.0, double gravity = 9.81);

/// CoM velocity change transferred by an impact at `impact_speed`.
double momentum_transfer(double impact_speed, double pendulum_mass, double transfer, double robot_mass);

/// CoM velocity change for a pendulum drawn back by `retraction`.
double pendulum_push(double retraction, double pendulum_mass, double transfer, double robot_mass,
                     double pendulum_length = 2.0, double gravity = 9.81);

/// Ballistic flight time of a vertical jump, 2 v / g.
double flight_time(double takeoff_velocity, double gravity = 9.81);
/// Inverse of flight_time.
double takeoff_velocity(double flight_time, double gravity = 9.81);

struct PushOutcome
{
  double time = 0.0;
  /// Signed velocity change; the sign is the seeded push direction.
  double delta_v = 0.0;
  bool recovered = false;
  /// Exchanges up to and including the first one back on the cycle.
  int capture_steps = 0;
};

struct PushTrial
{
  bool success = false;
  bool fell = false;
  std::vector<PushOutcome> pushes;
};

/// Walks and applies `push.count` pushes of magnitude `delta_v` at seeded
/// times and directions. A push is recovered when an exchange within
/// `walk.max_recovery_steps` steps lands on the cycle before the next push
/// (or `push.min_interval` after the last one) without a fall.
PushTrial push_recovery_trial(const Scenario& scenario, double delta_v, TrajectoryLog* log = nullptr);

struct PushSearch
{
  /// Largest magnitude known to succeed.
  double lo = 0.0;
  /// Smallest magnitude known to fail.
  double hi = 0.0;
  int trials = 0;
};

/// Bisection on the push magnitude until hi - lo <= tolerance. The bracket
/// always satisfies success(lo) and not success(hi), except that lo = hi = 0
/// when even a zero push fails.
PushSearch max_recoverable_push(const Scenario& scenario, double tolerance);

struct BallAttempt
{
  double launch_time = 0.0;
  double distance = 0.0;
  double speed = 0.0;
  /// Absent when the ball stops short of the foot line.
  std::optional<double> true_arrival;
  std::optional<double> apex;
  bool feasible = false;
  bool success = false;
  double frequency = 0.0;
};

struct BallTrial
{
  int successes = 0;
  std::vector<BallAttempt> attempts;
  /// |predicted - true| arrival for every estimate with a feasible prediction.
  std::vector<double> arrival_errors;
};

/// Rolls `ball.attempts` balls toward a robot walking on the spot. Each
/// detection refits the track, predicts the foot-line arrival and retunes the
/// gait frequency so that a swing window of the kicking leg can host the kick
/// apex at that time. The kick is committed once its start is less than one
/// detection interval away.
BallTrial moving_ball_trial(const Scenario& scenario, TrajectoryLog* log = nullptr);

struct TeamPlayResult
{
  long ticks = 0;
  /// Ticks in which a team had no striker claimant.
  long violations = 0;
  /// Ticks in which a team had more than one claimant (handover overlap).
  long dual_claim_ticks = 0;
  long swaps = 0;
  long messages = 0;
  long dropped = 0;
  int goals[2] = {0, 0};
  /// Time from the teleport until the player next to the ball is the only
  /// striker of its team, in heartbeat periods.
  std::optional<double> swap_rounds;
  /// Striker distance to the ball minus that of the player next to it, at the
  /// teleport. A swap is only owed when this exceeds the hysteresis.
  std::optional<double> teleport_advantage;
};

/// Two teams of point-mass players running the behavior stack, the role
/// protocol over a lossy delayed channel, and collision avoidance.
TeamPlayResult team_play_sim(const Scenario& scenario, TrajectoryLog* log = nullptr,
                             std::vector<std::string>* trace = nullptr);

/// Runs the scenario of its kind. Deterministic in (scenario, seed).
ScenarioResult run_scenario(const Scenario& scenario);

} // namespace stride::harness
