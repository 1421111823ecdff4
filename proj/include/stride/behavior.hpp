#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "stride/error.hpp"

namespace stride::behavior {

using Vec2 = Eigen::Vector2d;

enum class ControlState
{
  Initial,
  Ready,
  Set,
  Play,
  Finished,
};

enum class GameMode
{
  Tournament,
  DropIn,
};

enum class Role
{
  Striker,
  Defender,
  Goalie,
};

enum class Skill
{
  Search,
  Move,
  Stop,
  Kick,
  Dribble,
  Dive,
  Avoid,
};

enum class BehaviorMode
{
  Standby,
  WalkToKickoffPosition,
  AttackBall,
  DefendZone,
  GuardGoal,
};

std::string_view to_string(Role role);
std::string_view to_string(Skill skill);
std::string_view to_string(BehaviorMode mode);

struct GameState
{
  ControlState control = ControlState::Initial;
  GameMode mode = GameMode::Tournament;
};

/// Field dimensions; the own goal is at x = -length / 2.
struct Field
{
  double length = 14.0;
  double width = 9.0;
  double goal_width = 2.6;

  Vec2 own_goal() const { return {-0.5 * length, 0.0}; }
  Vec2 opponent_goal() const { return {0.5 * length, 0.0}; }
  bool contains(const Vec2& p) const;
};

struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct TrackedObject
{
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  /// Seconds since the object was last observed.
  double age = 0.0;
};

struct WorldBelief
{
  Pose2 self;
  std::optional<TrackedObject> ball;
  std::vector<TrackedObject> teammates;
  std::vector<TrackedObject> opponents;

  /// Throws InvalidState on negative ages or positions off the field.
  void validate(const Field& field) const;
};

/// Field-frame walking command.
struct MotionCommand
{
  Vec2 velocity = Vec2::Zero();
  double turn_rate = 0.0;
};

enum class DiveSide
{
  None,
  Left,
  Right,
};

struct SkillOutput
{
  Skill skill = Skill::Stop;
  MotionCommand command;
  DiveSide dive = DiveSide::None;
};

struct SkillParams
{
  Field field;
  double kick_range = 0.3;
  /// Largest heading error toward the opponent goal that still allows a kick.
  double kick_alignment = 10.0 * 3.14159265358979323846 / 180.0;
  double ball_staleness = 3.0;
  double max_speed = 0.5;
  double max_turn_rate = 1.0;
  double scan_turn_rate = 0.6;
  /// Distance behind the ball of the approach pose.
  double approach_offset = 0.2;
  double arrive_tolerance = 0.05;
  /// An opponent this close to the ball turns a kick into a dribble.
  double dribble_clearance = 0.5;
  double dive_speed = 1.0;
  double dive_horizon = 1.0;
  /// Home position of the player: kickoff spot, defence and goal positions.
  Vec2 home{-3.0, 0.0};
};

BehaviorMode upper_fsm_step(const GameState& game, Role role, const WorldBelief& belief);

SkillOutput lower_fsm_step(BehaviorMode mode, const WorldBelief& belief, const SkillParams& params = {});

struct AvoidanceParams
{
  double radius = 0.8;
  double gain = 0.5;
};

/// One-sided potential field: obstacles only push back the part of the
/// command that approaches them, and the result is never faster than `cmd`.
MotionCommand collision_avoidance(const MotionCommand& cmd, const Vec2& self, const std::vector<Vec2>& obstacles,
                                  const AvoidanceParams& params = {});

/// Lower layer followed by collision avoidance against every tracked robot.
/// A Move that had to be deflected is reported as Avoid.
SkillOutput act(BehaviorMode mode, const WorldBelief& belief, const SkillParams& skills = {},
                const AvoidanceParams& avoidance = {});

enum class MessageKind
{
  Request,
  Grant,
  Deny,
  Heartbeat,
  Ack,
};

std::string_view to_string(MessageKind kind);

struct RoleMessage
{
  MessageKind kind = MessageKind::Heartbeat;
  int sender = 0;
  /// Addressee; -1 broadcasts.
  int target = -1;
  /// Distance of the sender to the ball.
  double utility = 0.0;
  std::uint64_t seq = 0;
  /// Striker claim epoch carried by heartbeats, grants and acks.
  std::uint64_t epoch = 0;
  /// Role the sender gives up on promotion (requests only).
  Role role = Role::Defender;
};

struct NegotiationParams
{
  double hysteresis = 0.5;
};

struct Assignment
{
  int player = 0;
  Role role = Role::Defender;
  double utility = 0.0;
};

struct TeamRoles
{
  std::vector<Assignment> players;
  GameMode mode = GameMode::Tournament;
  /// Highest sequence number processed per sender; older messages are stale.
  std::map<int, std::uint64_t> last_seq;

  int striker() const;
};

struct NegotiationResult
{
  TeamRoles roles;
  std::vector<RoleMessage> outbox;
};

/// Non-strikers ask for the striker role only with a margin over the
/// striker's last broadcast utility.
bool should_request(double own_utility, double striker_utility, const NegotiationParams& params = {});

/// One synchronous negotiation round with the striker as the only server.
/// The best qualifying request is granted and the roles swap in the same
/// round; all other requests are denied. Throws InvalidState unless exactly
/// one striker is assigned, and ProtocolViolation for a grant not sent by it.
NegotiationResult negotiate(const TeamRoles& current, const std::vector<RoleMessage>& inbox,
                            const NegotiationParams& params = {});

} // namespace stride::behavior
