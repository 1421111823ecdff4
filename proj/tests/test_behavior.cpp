#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>

#include "stride/behavior.hpp"
#include "stride/negotiation.hpp"

using namespace stride::behavior;

namespace {

constexpr double deg = 3.14159265358979323846 / 180.0;

WorldBelief with_ball(Pose2 self, Vec2 ball, double age = 0.0)
{
  WorldBelief b;
  b.self = self;
  b.ball = TrackedObject{ball, Vec2::Zero(), age};
  return b;
}

} // namespace

TEST_CASE("upper fsm table is total")
{
  const WorldBelief belief;
  for (auto control :
       {ControlState::Initial, ControlState::Ready, ControlState::Set, ControlState::Play, ControlState::Finished}) {
    for (auto role : {Role::Striker, Role::Defender, Role::Goalie}) {
      for (auto mode : {GameMode::Tournament, GameMode::DropIn}) {
        const auto m = upper_fsm_step({control, mode}, role, belief);
        switch (control) {
        case ControlState::Initial:
        case ControlState::Set:
        case ControlState::Finished:
          CHECK(m == BehaviorMode::Standby);
          break;
        case ControlState::Ready:
          CHECK(m == BehaviorMode::WalkToKickoffPosition);
          break;
        case ControlState::Play:
          CHECK(m == (role == Role::Striker  ? BehaviorMode::AttackBall
                      : role == Role::Goalie ? BehaviorMode::GuardGoal
                                             : BehaviorMode::DefendZone));
          break;
        }
      }
    }
  }
}

TEST_CASE("lower fsm: attack")
{
  const SkillParams params;
  auto out = lower_fsm_step(BehaviorMode::AttackBall, with_ball({0.0, 0.0, 0.0}, {1.0, 0.0}, 10.0));
  CHECK(out.skill == Skill::Search);
  CHECK(out.command.turn_rate != 0.0);
  CHECK(lower_fsm_step(BehaviorMode::AttackBall, WorldBelief{}).skill == Skill::Search);

  // Ball 0.2 m ahead, heading 5 degrees off the goal direction.
  const Vec2 ball(3.0, 0.0);
  const double shot = std::atan2(-ball.y(), params.field.opponent_goal().x() - ball.x());
  const Pose2 self{ball.x() - 0.2, ball.y(), shot + 5.0 * deg};
  out = lower_fsm_step(BehaviorMode::AttackBall, with_ball(self, ball));
  CHECK(out.skill == Skill::Kick);

  const Pose2 skew{self.x, self.y, shot + 15.0 * deg};
  CHECK(lower_fsm_step(BehaviorMode::AttackBall, with_ball(skew, ball)).skill == Skill::Move);

  out = lower_fsm_step(BehaviorMode::AttackBall, with_ball({0.0, 0.0, 0.0}, ball));
  CHECK(out.skill == Skill::Move);
  CHECK(out.command.velocity.x() > 0.0);
  CHECK(out.command.velocity.norm() <= params.max_speed + 1e-12);

  auto contested = with_ball(self, ball);
  contested.opponents.push_back({ball + Vec2(0.3, 0.0), Vec2::Zero(), 0.0});
  CHECK(lower_fsm_step(BehaviorMode::AttackBall, contested).skill == Skill::Dribble);
}

TEST_CASE("lower fsm: goal guarding and defence")
{
  SkillParams params;
  params.home = Vec2(-6.5, 0.0);
  auto out = lower_fsm_step(BehaviorMode::GuardGoal, with_ball({-6.0, 1.0, 0.0}, {0.0, 0.0}), params);
  CHECK(out.skill == Skill::Move);
  CHECK(out.command.velocity.x() < 0.0);
  CHECK(out.command.velocity.y() < 0.0);

  CHECK(lower_fsm_step(BehaviorMode::GuardGoal, with_ball({-6.5, 0.0, 0.0}, {0.0, 0.0}), params).skill ==
        Skill::Stop);

  auto shot = with_ball({-6.5, 0.0, 0.0}, {-5.0, 0.0});
  shot.ball->velocity = Vec2(-3.0, 0.9);
  out = lower_fsm_step(BehaviorMode::GuardGoal, shot, params);
  CHECK(out.skill == Skill::Dive);
  CHECK(out.dive == DiveSide::Left);
  shot.ball->velocity = Vec2(-3.0, -0.9);
  CHECK(lower_fsm_step(BehaviorMode::GuardGoal, shot, params).dive == DiveSide::Right);
  shot.ball->velocity = Vec2(-3.0, 3.0);
  CHECK(lower_fsm_step(BehaviorMode::GuardGoal, shot, params).skill != Skill::Dive);

  params.home = Vec2(-3.0, 0.0);
  out = lower_fsm_step(BehaviorMode::DefendZone, with_ball({-3.0, 0.0, 0.0}, {1.0, 2.0}), params);
  CHECK(out.skill == Skill::Move);
  CHECK(out.command.velocity.y() > 0.0);
  CHECK(lower_fsm_step(BehaviorMode::Standby, WorldBelief{}).skill == Skill::Stop);
  CHECK(lower_fsm_step(BehaviorMode::WalkToKickoffPosition, WorldBelief{}, params).skill == Skill::Move);
}

TEST_CASE("belief validation")
{
  const Field field;
  auto b = with_ball({0.0, 0.0, 0.0}, {1.0, 1.0});
  CHECK_NOTHROW(b.validate(field));
  b.ball->age = -1.0;
  CHECK_THROWS_AS(b.validate(field), stride::InvalidState);
  b = with_ball({0.0, 0.0, 0.0}, {7.5, 0.0});
  CHECK_THROWS_AS(b.validate(field), stride::InvalidState);
}

TEST_CASE("collision avoidance")
{
  const MotionCommand fwd{Vec2(0.5, 0.0), 0.1};
  auto out = collision_avoidance(fwd, Vec2::Zero(), {});
  CHECK(out.velocity == fwd.velocity);
  CHECK(out.turn_rate == fwd.turn_rate);

  out = collision_avoidance(fwd, Vec2::Zero(), {Vec2(0.3, 0.0)});
  CHECK(out.velocity.x() < fwd.velocity.x());
  CHECK(out.velocity.y() != 0.0);

  out = collision_avoidance(fwd, Vec2::Zero(), {Vec2(-0.3, 0.0)});
  CHECK(out.velocity == fwd.velocity);
  out = collision_avoidance(fwd, Vec2::Zero(), {Vec2(1.0, 0.0)});
  CHECK(out.velocity == fwd.velocity);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const MotionCommand cmd{Vec2(u(rng), u(rng)), 0.0};
    std::vector<Vec2> obstacles;
    for (int k = 0; k < 4; ++k) {
      obstacles.emplace_back(u(rng), u(rng));
    }
    CHECK(collision_avoidance(cmd, Vec2::Zero(), obstacles).velocity.norm() <= cmd.velocity.norm() + 1e-12);
  }

  WorldBelief crowded = with_ball({0.0, 0.0, 0.0}, {3.0, 0.0});
  crowded.teammates.push_back({Vec2(0.4, 0.0), Vec2::Zero(), 0.0});
  CHECK(act(BehaviorMode::AttackBall, crowded).skill == Skill::Avoid);
}

TEST_CASE("negotiate")
{
  TeamRoles team;
  team.players = {{1, Role::Striker, 2.0}, {2, Role::Defender, 1.0}, {3, Role::Goalie, 5.0}};

  auto same = negotiate(team, {});
  CHECK(same.outbox.empty());
  CHECK(same.roles.striker() == 1);

  RoleMessage req;
  req.kind = MessageKind::Request;
  req.sender = 2;
  req.target = 1;
  req.utility = 1.0;
  req.seq = 1;
  auto granted = negotiate(team, {req});
  REQUIRE(granted.outbox.size() == 1);
  CHECK(granted.outbox[0].kind == MessageKind::Grant);
  CHECK(granted.roles.striker() == 2);
  CHECK(granted.roles.players[0].role == Role::Defender);

  req.utility = 1.8;
  auto denied = negotiate(team, {req});
  REQUIRE(denied.outbox.size() == 1);
  CHECK(denied.outbox[0].kind == MessageKind::Deny);
  CHECK(denied.roles.striker() == 1);

  req.utility = 1.0;
  auto stale = negotiate(granted.roles, {req});
  CHECK(stale.outbox.empty());

  TeamRoles dropin = team;
  dropin.mode = GameMode::DropIn;
  auto fixed = negotiate(dropin, {req});
  CHECK(fixed.outbox[0].kind == MessageKind::Deny);
  CHECK(fixed.roles.striker() == 1);

  RoleMessage rogue;
  rogue.kind = MessageKind::Grant;
  rogue.sender = 2;
  rogue.target = 3;
  rogue.seq = 5;
  CHECK_THROWS_AS(negotiate(team, {rogue}), stride::ProtocolViolation);

  TeamRoles headless = team;
  headless.players[0].role = Role::Defender;
  CHECK_THROWS_AS(negotiate(headless, {}), stride::InvalidState);

  CHECK(should_request(1.0, 2.0));
  CHECK_FALSE(should_request(1.5, 2.0));
}

namespace {

struct Team
{
  std::vector<RoleAgent> agents;
  std::deque<std::pair<int, RoleMessage>> wire;

  int effective_claims() const
  {
    int n = 0;
    for (const auto& a : agents) {
      n += a.claims_striker();
    }
    return n;
  }

  std::optional<int> striker() const
  {
    std::optional<Claim> best;
    for (const auto& a : agents) {
      if (a.claims_striker() && (!best || a.claim().beats(*best))) {
        best = a.claim();
      }
    }
    return best ? std::optional<int>(best->player) : std::nullopt;
  }
};

} // namespace

TEST_CASE("role agents: one striker under loss, swap under reliable delivery")
{
  for (double loss : {0.0, 0.2, 0.5}) {
    AgentParams params;
    Team team;
    team.agents.emplace_back(0, Role::Striker, params);
    team.agents.emplace_back(1, Role::Defender, params);
    team.agents.emplace_back(2, Role::Defender, params);
    std::mt19937_64 rng(99);
    std::bernoulli_distribution drop(loss);
    std::uniform_real_distribution<double> util(0.0, 5.0);
    std::vector<double> utility{util(rng), util(rng), util(rng)};
    const double dt = 0.05;
    int zero = 0;
    int swaps = 0;
    int last = 0;
    for (int tick = 0; tick < 20000; ++tick) {
      if (tick % 40 == 0) {
        for (auto& u : utility) {
          u = util(rng);
        }
      }
      std::vector<std::vector<RoleMessage>> inbox(team.agents.size());
      for (auto& [due, msg] : team.wire) {
        for (std::size_t i = 0; i < team.agents.size(); ++i) {
          inbox[i].push_back(msg);
        }
      }
      team.wire.clear();
      for (std::size_t i = 0; i < team.agents.size(); ++i) {
        for (const auto& m : team.agents[i].step(tick * dt, utility[i], inbox[i])) {
          if (!drop(rng)) {
            team.wire.emplace_back(tick + 1, m);
          }
        }
      }
      const auto s = team.striker();
      zero += !s.has_value();
      if (s && *s != last) {
        ++swaps;
        last = *s;
      }
    }
    CHECK(zero == 0);
    CHECK(swaps > 10);
  }
}
