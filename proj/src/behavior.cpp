#include "stride/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stride::behavior {

namespace {

constexpr double pi = std::numbers::pi;

double wrap(double a)
{
  a = std::remainder(a, 2.0 * pi);
  return a <= -pi ? a + 2.0 * pi : a;
}

double bearing(const Vec2& from, const Vec2& to)
{
  const Vec2 d = to - from;
  return std::atan2(d.y(), d.x());
}

MotionCommand go_to(const Pose2& self, const Vec2& target, double heading, const SkillParams& params)
{
  MotionCommand cmd;
  const Vec2 d = target - self.position();
  const double dist = d.norm();
  if (dist > 0.0) {
    cmd.velocity = d / dist * std::min(params.max_speed, dist);
  }
  cmd.turn_rate = std::clamp(wrap(heading - self.theta), -params.max_turn_rate, params.max_turn_rate);
  return cmd;
}

bool arrived(const Pose2& self, const Vec2& target, const SkillParams& params)
{
  return (target - self.position()).norm() <= params.arrive_tolerance;
}

SkillOutput move_or_stop(const Pose2& self, const Vec2& target, double heading, const SkillParams& params)
{
  if (arrived(self, target, params)) {
    return {Skill::Stop, {}, DiveSide::None};
  }
  return {Skill::Move, go_to(self, target, heading, params), DiveSide::None};
}

bool ball_visible(const WorldBelief& belief, const SkillParams& params)
{
  return belief.ball && belief.ball->age <= params.ball_staleness;
}

SkillOutput attack(const WorldBelief& belief, const SkillParams& params)
{
  if (!ball_visible(belief, params)) {
    return {Skill::Search, {Vec2::Zero(), params.scan_turn_rate}, DiveSide::None};
  }
  const Vec2 ball = belief.ball->position;
  const Vec2 goal = params.field.opponent_goal();
  const double shot = bearing(ball, goal);
  const Vec2 self = belief.self.position();
  const double dist = (ball - self).norm();

  const bool aligned = std::abs(wrap(belief.self.theta - shot)) <= params.kick_alignment;
  const bool ahead = std::abs(wrap(bearing(self, ball) - belief.self.theta)) <= 0.25 * pi;
  if (dist <= params.kick_range && aligned && ahead) {
    const bool contested = std::any_of(belief.opponents.begin(), belief.opponents.end(), [&](const auto& o) {
      return (o.position - ball).norm() <= params.dribble_clearance;
    });
    MotionCommand cmd = go_to(belief.self, ball, shot, params);
    if (contested) {
      cmd.velocity = Vec2(std::cos(shot), std::sin(shot)) * params.max_speed;
      return {Skill::Dribble, cmd, DiveSide::None};
    }
    return {Skill::Kick, cmd, DiveSide::None};
  }
  const Vec2 approach = ball - params.approach_offset * Vec2(std::cos(shot), std::sin(shot));
  return {Skill::Move, go_to(belief.self, approach, shot, params), DiveSide::None};
}

SkillOutput defend(const WorldBelief& belief, const SkillParams& params)
{
  Vec2 target = params.home;
  double heading = 0.0;
  if (ball_visible(belief, params)) {
    const double half = 0.5 * params.field.width - 0.5;
    target.y() = std::clamp(belief.ball->position.y(), -half, half);
    heading = bearing(belief.self.position(), belief.ball->position);
  }
  return move_or_stop(belief.self, target, heading, params);
}

SkillOutput guard(const WorldBelief& belief, const SkillParams& params)
{
  const Vec2 goal = params.field.own_goal();
  if (ball_visible(belief, params)) {
    const auto& ball = *belief.ball;
    const double toward = -ball.velocity.x();
    if (ball.velocity.norm() >= params.dive_speed && toward > 0.0) {
      const double t_line = (ball.position.x() - goal.x()) / toward;
      const double y_line = ball.position.y() + ball.velocity.y() * t_line;
      if (t_line >= 0.0 && t_line <= params.dive_horizon && std::abs(y_line) <= 0.5 * params.field.goal_width) {
        const DiveSide side = y_line >= belief.self.y ? DiveSide::Left : DiveSide::Right;
        return {Skill::Dive, {}, side};
      }
    }
  }
  return move_or_stop(belief.self, params.home, 0.0, params);
}

} // namespace

std::string_view to_string(Role role)
{
  switch (role) {
  case Role::Striker:
    return "striker";
  case Role::Defender:
    return "defender";
  case Role::Goalie:
    return "goalie";
  }
  return "?";
}

std::string_view to_string(Skill skill)
{
  switch (skill) {
  case Skill::Search:
    return "search";
  case Skill::Move:
    return "move";
  case Skill::Stop:
    return "stop";
  case Skill::Kick:
    return "kick";
  case Skill::Dribble:
    return "dribble";
  case Skill::Dive:
    return "dive";
  case Skill::Avoid:
    return "avoid";
  }
  return "?";
}

std::string_view to_string(BehaviorMode mode)
{
  switch (mode) {
  case BehaviorMode::Standby:
    return "standby";
  case BehaviorMode::WalkToKickoffPosition:
    return "walk_to_kickoff_position";
  case BehaviorMode::AttackBall:
    return "attack_ball";
  case BehaviorMode::DefendZone:
    return "defend_zone";
  case BehaviorMode::GuardGoal:
    return "guard_goal";
  }
  return "?";
}

std::string_view to_string(MessageKind kind)
{
  switch (kind) {
  case MessageKind::Request:
    return "request";
  case MessageKind::Grant:
    return "grant";
  case MessageKind::Deny:
    return "deny";
  case MessageKind::Heartbeat:
    return "heartbeat";
  case MessageKind::Ack:
    return "ack";
  }
  return "?";
}

bool Field::contains(const Vec2& p) const
{
  return std::abs(p.x()) <= 0.5 * length && std::abs(p.y()) <= 0.5 * width;
}

void WorldBelief::validate(const Field& field) const
{
  auto check = [&](const TrackedObject& o) {
    if (!(o.age >= 0.0)) {
      throw InvalidState("negative observation age");
    }
    if (!field.contains(o.position)) {
      throw InvalidState("object position outside the field");
    }
  };
  if (!field.contains(self.position()) || !std::isfinite(self.theta)) {
    throw InvalidState("robot pose outside the field");
  }
  if (ball) {
    check(*ball);
  }
  std::for_each(teammates.begin(), teammates.end(), check);
  std::for_each(opponents.begin(), opponents.end(), check);
}

BehaviorMode upper_fsm_step(const GameState& game, Role role, const WorldBelief& /*belief*/)
{
  switch (game.control) {
  case ControlState::Initial:
  case ControlState::Set:
  case ControlState::Finished:
    return BehaviorMode::Standby;
  case ControlState::Ready:
    return BehaviorMode::WalkToKickoffPosition;
  case ControlState::Play:
    break;
  }
  switch (role) {
  case Role::Striker:
    return BehaviorMode::AttackBall;
  case Role::Defender:
    return BehaviorMode::DefendZone;
  case Role::Goalie:
    return BehaviorMode::GuardGoal;
  }
  return BehaviorMode::Standby;
}

SkillOutput lower_fsm_step(BehaviorMode mode, const WorldBelief& belief, const SkillParams& params)
{
  switch (mode) {
  case BehaviorMode::Standby:
    return {Skill::Stop, {}, DiveSide::None};
  case BehaviorMode::WalkToKickoffPosition:
    return move_or_stop(belief.self, params.home, 0.0, params);
  case BehaviorMode::AttackBall:
    return attack(belief, params);
  case BehaviorMode::DefendZone:
    return defend(belief, params);
  case BehaviorMode::GuardGoal:
    return guard(belief, params);
  }
  return {Skill::Stop, {}, DiveSide::None};
}

MotionCommand collision_avoidance(const MotionCommand& cmd, const Vec2& self, const std::vector<Vec2>& obstacles,
                                  const AvoidanceParams& params)
{
  const double speed = cmd.velocity.norm();
  if (speed == 0.0) {
    return cmd;
  }
  Vec2 delta = Vec2::Zero();
  for (const Vec2& o : obstacles) {
    const Vec2 d = o - self;
    const double dist = d.norm();
    if (dist >= params.radius || dist == 0.0) {
      continue;
    }
    const Vec2 n = d / dist;
    const double approach = cmd.velocity.dot(n);
    if (approach <= 0.0) {
      continue;
    }
    const double w = std::min(1.0, params.gain * (1.0 / dist - 1.0 / params.radius));
    // sidestep to the side the command already leans to, left when head-on
    Vec2 side(-n.y(), n.x());
    if (cmd.velocity.dot(side) < 0.0) {
      side = -side;
    }
    delta += w * approach * (side - n);
  }
  MotionCommand out = cmd;
  out.velocity += delta;
  const double out_speed = out.velocity.norm();
  if (out_speed > speed) {
    out.velocity *= speed / out_speed;
  }
  return out;
}

SkillOutput act(BehaviorMode mode, const WorldBelief& belief, const SkillParams& skills,
                const AvoidanceParams& avoidance)
{
  SkillOutput out = lower_fsm_step(mode, belief, skills);
  if (out.skill != Skill::Move) {
    return out;
  }
  std::vector<Vec2> obstacles;
  for (const auto* group : {&belief.teammates, &belief.opponents}) {
    for (const auto& o : *group) {
      obstacles.push_back(o.position);
    }
  }
  const MotionCommand avoided = collision_avoidance(out.command, belief.self.position(), obstacles, avoidance);
  if ((avoided.velocity - out.command.velocity).norm() > 1e-9) {
    out.skill = Skill::Avoid;
    out.command = avoided;
  }
  return out;
}

int TeamRoles::striker() const
{
  int found = -1;
  int count = 0;
  for (const auto& a : players) {
    if (a.role == Role::Striker) {
      found = a.player;
      ++count;
    }
  }
  return count == 1 ? found : -1;
}

bool should_request(double own_utility, double striker_utility, const NegotiationParams& params)
{
  return own_utility + params.hysteresis < striker_utility;
}

NegotiationResult negotiate(const TeamRoles& current, const std::vector<RoleMessage>& inbox,
                            const NegotiationParams& params)
{
  const int striker = current.striker();
  if (striker < 0) {
    throw InvalidState("negotiation needs exactly one striker");
  }
  NegotiationResult result{current, {}};
  auto& roles = result.roles;
  auto find = [&](int id) -> Assignment* {
    for (auto& a : roles.players) {
      if (a.player == id) {
        return &a;
      }
    }
    return nullptr;
  };
  Assignment* server = find(striker);

  std::vector<RoleMessage> fresh;
  for (const auto& m : inbox) {
    auto [it, inserted] = roles.last_seq.try_emplace(m.sender, m.seq);
    if (!inserted) {
      if (m.seq <= it->second) {
        continue;
      }
      it->second = m.seq;
    }
    if (m.kind == MessageKind::Grant && m.sender != striker) {
      throw ProtocolViolation("grant issued by a non-striker");
    }
    if (Assignment* a = find(m.sender); a && (m.kind == MessageKind::Request || m.kind == MessageKind::Heartbeat)) {
      a->utility = m.utility;
    }
    fresh.push_back(m);
  }

  std::uint64_t seq = roles.last_seq.count(striker) ? roles.last_seq[striker] : 0;
  const RoleMessage* best = nullptr;
  for (const auto& m : fresh) {
    if (m.kind != MessageKind::Request) {
      continue;
    }
    const Assignment* a = find(m.sender);
    if (!a || a->role == Role::Goalie || a->role == Role::Striker) {
      continue;
    }
    const bool qualifies = roles.mode == GameMode::Tournament && should_request(m.utility, server->utility, params);
    if (qualifies && (!best || m.utility < best->utility || (m.utility == best->utility && m.sender < best->sender))) {
      best = &m;
    }
  }

  for (const auto& m : fresh) {
    if (m.kind != MessageKind::Request) {
      continue;
    }
    RoleMessage reply;
    reply.kind = &m == best ? MessageKind::Grant : MessageKind::Deny;
    reply.sender = striker;
    reply.target = m.sender;
    reply.utility = server->utility;
    reply.seq = ++seq;
    result.outbox.push_back(reply);
  }
  if (best) {
    Assignment* winner = find(best->sender);
    std::swap(winner->role, server->role);
  }
  if (!result.outbox.empty()) {
    roles.last_seq[striker] = seq;
  }
  return result;
}

} // namespace stride::behavior
