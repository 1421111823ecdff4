#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include "stride/harness/experiments.hpp"
#include "rng.hpp"
#include "runners.hpp"

namespace stride::harness {

namespace {

using behavior::Vec2;

struct Player
{
  int team = 0;
  int id = 0;
  Vec2 pos = Vec2::Zero();
  double heading = 0.0;
  behavior::RoleAgent agent;
};

struct InFlight
{
  long deliver_at = 0;
  int team = 0;
  int recipient = 0;
  behavior::RoleMessage message;
};

// Each team plays toward +x in its own frame; team 1's frame is the world
// frame turned by half a revolution.
Vec2 to_team(int team, const Vec2& world)
{
  return team == 0 ? world : Vec2(-world);
}

double heading_to_team(int team, double heading)
{
  return team == 0 ? heading : gait::wrap_angle(heading + std::numbers::pi);
}

Vec2 clamp_to_field(const behavior::Field& f, const Vec2& p)
{
  return {std::clamp(p.x(), -0.5 * f.length, 0.5 * f.length), std::clamp(p.y(), -0.5 * f.width, 0.5 * f.width)};
}

std::vector<Player> line_up(const TeamConfig& cfg)
{
  std::vector<Player> players;
  for (int team = 0; team < 2; ++team) {
    for (int id = 0; id < cfg.players_per_team; ++id) {
      behavior::Role role = id == 0 ? behavior::Role::Striker : behavior::Role::Defender;
      Vec2 p(-1.0, 0.0);
      if (cfg.goalie && id == cfg.players_per_team - 1) {
        role = behavior::Role::Goalie;
        p = {-6.5, 0.0};
      } else if (id > 0) {
        p = {-2.0 - id, id % 2 == 1 ? 1.5 : -1.5};
      }
      players.push_back({team, id, to_team(team, p), team == 0 ? 0.0 : std::numbers::pi, behavior::RoleAgent(id, role, cfg.agent)});
    }
  }
  return players;
}

std::string trace_line(double t, int team, const behavior::RoleMessage& m, const std::vector<int>& dropped)
{
  Metrics j;
  j["t"] = std::round(t * 1e6) / 1e6;
  j["team"] = team;
  j["kind"] = behavior::to_string(m.kind);
  j["sender"] = m.sender;
  j["target"] = m.target;
  j["epoch"] = m.epoch;
  j["seq"] = m.seq;
  j["role"] = behavior::to_string(m.role);
  j["utility"] = std::round(m.utility * 1e6) / 1e6;
  j["dropped"] = dropped;
  return j.dump();
}

} // namespace

std::vector<std::string> team_play_columns(int players_per_team)
{
  std::vector<std::string> cols{"t", "ball_x", "ball_y", "claimants_0", "claimants_1", "striker_0", "striker_1"};
  for (int team = 0; team < 2; ++team) {
    for (int id = 0; id < players_per_team; ++id) {
      const std::string p = "p" + std::to_string(team) + std::to_string(id);
      cols.push_back(p + "_x");
      cols.push_back(p + "_y");
    }
  }
  return cols;
}

TeamPlayResult team_play_sim(const Scenario& s, TrajectoryLog* log, std::vector<std::string>* trace)
{
  const TeamConfig& cfg = s.team;
  Rng rng(s.seed);
  behavior::SkillParams skills;
  skills.max_speed = cfg.player_speed;
  const behavior::Field& field = skills.field;
  const behavior::GameState game{behavior::ControlState::Play, cfg.mode};

  std::vector<Player> players = line_up(cfg);
  std::vector<int> order(players.size());
  std::iota(order.begin(), order.end(), 0);
  Vec2 ball = Vec2::Zero();
  Vec2 ball_v = Vec2::Zero();
  std::deque<InFlight> channel;
  std::vector<std::vector<behavior::RoleMessage>> inbox(players.size());

  TeamPlayResult r;
  int exclusive[2] = {0, 0};
  std::optional<double> teleported_at;
  int teleport_index = -1;
  std::string pending;
  auto note = [&](const std::string& e) { pending += pending.empty() ? e : ";" + e; };

  const long ticks = std::lround(std::ceil(s.duration / s.tick - 1e-9));
  for (long k = 0; k < ticks; ++k) {
    const double t = k * s.tick;

    if (cfg.teleport && !teleported_at && t >= cfg.teleport->time - 1e-9) {
      teleport_index = cfg.teleport->team * cfg.players_per_team + cfg.teleport->player;
      const Player& p = players[teleport_index];
      ball = clamp_to_field(field, p.pos + to_team(p.team, Vec2(0.3, 0.0)));
      ball_v.setZero();
      teleported_at = t;
      const Player& striker = players[p.team * cfg.players_per_team + exclusive[p.team]];
      r.teleport_advantage = (ball - striker.pos).norm() - (ball - p.pos).norm();
      note("teleport");
    }

    // Deliveries due this tick.
    for (auto& box : inbox) {
      box.clear();
    }
    while (!channel.empty() && channel.front().deliver_at <= k) {
      const InFlight& f = channel.front();
      inbox[f.team * cfg.players_per_team + f.recipient].push_back(f.message);
      channel.pop_front();
    }

    std::shuffle(order.begin(), order.end(), rng.engine());
    for (int i : order) {
      Player& p = players[i];
      const double utility = (ball - p.pos).norm();
      for (const auto& m : p.agent.step(t, utility, inbox[i])) {
        ++r.messages;
        std::vector<int> dropped;
        for (int to = 0; to < cfg.players_per_team; ++to) {
          if (to == p.id || (m.target != -1 && m.target != to)) {
            continue;
          }
          if (rng.chance(cfg.loss)) {
            ++r.dropped;
            dropped.push_back(to);
            continue;
          }
          channel.push_back({k + cfg.latency_ticks, p.team, to, m});
        }
        if (trace && cfg.trace) {
          trace->push_back(trace_line(t, p.team, m, dropped));
        }
      }
    }
    std::stable_sort(channel.begin(), channel.end(),
                     [](const InFlight& a, const InFlight& b) { return a.deliver_at < b.deliver_at; });

    int claimants[2] = {0, 0};
    int striker[2] = {-1, -1};
    for (const Player& p : players) {
      if (p.agent.claims_striker()) {
        ++claimants[p.team];
        striker[p.team] = p.id;
      }
    }
    for (int team = 0; team < 2; ++team) {
      if (claimants[team] == 0) {
        ++r.violations;
        note("no_striker_" + std::to_string(team));
      } else if (claimants[team] > 1) {
        ++r.dual_claim_ticks;
        striker[team] = -2;
      } else if (striker[team] != exclusive[team]) {
        ++r.swaps;
        exclusive[team] = striker[team];
        note("swap_" + std::to_string(team));
      }
    }
    if (teleported_at && !r.swap_rounds) {
      const Player& p = players[teleport_index];
      if (claimants[p.team] == 1 && p.agent.claims_striker()) {
        r.swap_rounds = (t - *teleported_at) / cfg.agent.heartbeat_period;
      }
    }

    // Behavior and motion, in the same shuffled order.
    for (int i : order) {
      Player& p = players[i];
      behavior::WorldBelief belief;
      const Vec2 self = to_team(p.team, p.pos);
      belief.self = {self.x(), self.y(), heading_to_team(p.team, p.heading)};
      belief.ball = behavior::TrackedObject{to_team(p.team, ball), to_team(p.team, ball_v), 0.0};
      for (const Player& o : players) {
        if (&o == &p) {
          continue;
        }
        behavior::TrackedObject obj{to_team(p.team, o.pos), Vec2::Zero(), 0.0};
        (o.team == p.team ? belief.teammates : belief.opponents).push_back(obj);
      }
      const auto mode = behavior::upper_fsm_step(game, p.agent.role(), belief);
      const auto out = behavior::act(mode, belief, skills, cfg.avoidance);

      p.pos = clamp_to_field(field, p.pos + to_team(p.team, out.command.velocity) * s.tick);
      p.heading = gait::wrap_angle(p.heading + out.command.turn_rate * s.tick);

      const Vec2 rel = ball - p.pos;
      if (rel.norm() <= skills.kick_range &&
          (out.skill == behavior::Skill::Kick || out.skill == behavior::Skill::Dribble)) {
        const Vec2 goal = to_team(p.team, field.opponent_goal());
        const double aim = std::atan2(goal.y() - ball.y(), goal.x() - ball.x()) + rng.normal(cfg.kick_spread);
        const double speed = out.skill == behavior::Skill::Kick ? cfg.kick_speed : 1.5 * cfg.player_speed;
        ball_v = speed * Vec2(std::cos(aim), std::sin(aim));
        if (out.skill == behavior::Skill::Kick) {
          note("kick_" + std::to_string(p.team));
        }
      }
    }

    // Ball roll with rolling friction.
    const double speed = ball_v.norm();
    if (speed > 0.0) {
      const double dv = std::min(speed, cfg.ball_deceleration * s.tick);
      const Vec2 next_v = ball_v * ((speed - dv) / speed);
      ball += 0.5 * (ball_v + next_v) * s.tick;
      ball_v = next_v;
    }
    if (std::abs(ball.x()) > 0.5 * field.length) {
      if (std::abs(ball.y()) < 0.5 * field.goal_width) {
        const int scorer = ball.x() > 0.0 ? 0 : 1;
        ++r.goals[scorer];
        note("goal_" + std::to_string(scorer));
        ball.setZero();
      } else {
        ball = clamp_to_field(field, ball);
      }
      ball_v.setZero();
    } else if (std::abs(ball.y()) > 0.5 * field.width) {
      ball = clamp_to_field(field, ball);
      ball_v.setZero();
    }

    ++r.ticks;
    if (log) {
      std::vector<double> row{t + s.tick, ball.x(), ball.y(), double(claimants[0]), double(claimants[1]),
                              double(striker[0]), double(striker[1])};
      for (const Player& p : players) {
        row.push_back(p.pos.x());
        row.push_back(p.pos.y());
      }
      log->append(std::move(row), pending);
    }
    pending.clear();
  }
  return r;
}

ScenarioResult run_team_play(const Scenario& s)
{
  ScenarioResult result;
  result.log = TrajectoryLog(team_play_columns(s.team.players_per_team));
  const auto r = team_play_sim(s, &result.log, &result.trace);

  auto& m = result.metrics;
  m["scenario"] = s.name;
  m["kind"] = to_string(s.kind);
  m["seed"] = s.seed;
  m["ticks"] = r.ticks;
  m["violations"] = r.violations;
  m["dual_claim_ticks"] = r.dual_claim_ticks;
  m["swaps"] = r.swaps;
  m["messages"] = r.messages;
  m["dropped"] = r.dropped;
  m["goals"] = {r.goals[0], r.goals[1]};
  m["swap_rounds"] = r.swap_rounds ? Metrics(*r.swap_rounds) : Metrics(nullptr);
  m["teleport_advantage"] = r.teleport_advantage ? Metrics(*r.teleport_advantage) : Metrics(nullptr);
  m["events"] = result.log.event_count();
  if (r.violations > 0) {
    result.failures.push_back("team without a striker in " + std::to_string(r.violations) + " ticks");
  }
  if (r.teleport_advantage && *r.teleport_advantage > s.team.agent.negotiation.hysteresis &&
      s.team.mode == behavior::GameMode::Tournament && (!r.swap_rounds || *r.swap_rounds > 3.0)) {
    result.failures.push_back("no role swap within 3 rounds of the teleport");
  }
  return result;
}

} // namespace stride::harness
