#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "stride/ball.hpp"
#include "stride/behavior.hpp"
#include "stride/gait.hpp"
#include "stride/lipm.hpp"
#include "stride/negotiation.hpp"

namespace stride::harness {

enum class ScenarioKind
{
  Walk,
  PushRecovery,
  MovingBall,
  HighJump,
  TeamPlay,
};

std::string to_string(ScenarioKind kind);

struct RobotConfig
{
  /// "op2" (17.5 kg) or "op2x" (19 kg); an explicit mass overrides it.
  std::string model = "op2x";
  lipm::PendulumParams pendulum;
};

struct WalkConfig
{
  /// Zero walks on the spot.
  double step_length = 0.0;
  /// Lateral distance between the feet.
  double step_width = 0.1;
  lipm::StepLimits limits;
  double max_lateral_step = 0.3;
  /// Steps allowed to bring the energy back into the band after a push.
  int max_recovery_steps = 4;
  /// CoM offset from the support foot counted as a fall while moving away from it.
  double fall_offset = 1.0;
  /// Initial states; the limit-cycle post-exchange states when absent.
  std::optional<lipm::LipmState> initial_sagittal;
  std::optional<lipm::LipmState> initial_lateral;
};

struct PushConfig
{
  /// Push strength as a CoM velocity change, or as pendulum retraction.
  std::optional<double> delta_v;
  std::optional<double> retraction;
  double pendulum_mass = 5.0;
  double pendulum_length = 2.0;
  double transfer = 0.8;
  int count = 3;
  double first_after = 1.0;
  double min_interval = 3.0;
  double max_interval = 4.0;
  /// Also bisect for the largest recoverable push.
  bool find_max = false;
  double tolerance = 0.01;
  double search_max = 4.0;
};

struct BallConfig
{
  int attempts = 3;
  /// Ball distance to the foot line at the first detection.
  double min_distance = 2.0;
  double max_distance = 3.0;
  double min_speed = 1.5;
  double max_speed = 1.8;
  double deceleration = 0.3;
  double detection_interval = 0.1;
  double noise = 0.0;
  double foot_line = 0.0;
  double contact_tolerance = 0.1;
  /// Samples in the track before arrival estimates start.
  std::size_t min_samples = 6;
  /// Use the rolling-ball acceleration prior in the estimator.
  bool use_prior = true;
  ball::TrackParams track;
  /// Parsing sets the measurement sigma to `noise` unless given explicitly.
  ball::AccelerationPrior prior{0.3, 0.1, 0.0};
};

struct KickConfig
{
  double duration = 0.35;
  double amplitude = 0.35;
  double width = 0.25;
  double lead_guard = 0.05;
  double trail_guard = 0.05;
  /// Range the gait frequency may be modulated in to meet the ball.
  double min_frequency = 0.45;
  double max_frequency = 0.9;
  /// Kicking leg; either leg when absent.
  std::optional<gait::Leg> leg;
};

struct JumpConfig
{
  std::optional<double> takeoff_velocity;
  std::optional<double> flight_time;
};

struct TeleportConfig
{
  double time = 0.0;
  int team = 0;
  int player = 1;
};

struct TeamConfig
{
  int players_per_team = 2;
  bool goalie = false;
  behavior::GameMode mode = behavior::GameMode::Tournament;
  double loss = 0.0;
  int latency_ticks = 1;
  behavior::AgentParams agent;
  behavior::AvoidanceParams avoidance;
  double player_speed = 0.5;
  double kick_speed = 3.0;
  double kick_spread = 0.15;
  double ball_deceleration = 0.3;
  bool trace = true;
  std::optional<TeleportConfig> teleport;
};

struct Scenario
{
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::Walk;
  std::uint64_t seed = 1;
  double duration = 10.0;
  double tick = 0.01;
  RobotConfig robot;
  gait::GaitParams gait;
  WalkConfig walk;
  PushConfig push;
  BallConfig ball;
  KickConfig kick;
  JumpConfig jump;
  TeamConfig team;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses a scenario document (JSON). Unknown keys are errors.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

} // namespace stride::harness
