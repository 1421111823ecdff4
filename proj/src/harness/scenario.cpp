#include "stride/harness/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace stride::harness {

namespace {

using json = nlohmann::json;

// Typed access to one JSON object that remembers which keys were read, so
// anything left over can be reported as unknown.
class Section
{
public:
  Section(const json& node, std::string path)
    : node_(node)
    , path_(std::move(path))
  {
    if (!node_.is_object()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* find(const std::string& key)
  {
    used_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_number()) {
        throw ConfigError(key_path(key), "expected a number");
      }
      out = v->get<double>();
    }
  }

  void number(const std::string& key, std::optional<double>& out)
  {
    if (has(key)) {
      double v = 0.0;
      number(key, v);
      out = v;
    } else {
      used_.insert(key);
    }
  }

  void integer(const std::string& key, int& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) {
        throw ConfigError(key_path(key), "expected an integer");
      }
      out = v->get<int>();
    }
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(key_path(key), "expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void size(const std::string& key, std::size_t& out)
  {
    std::uint64_t v = out;
    unsigned_integer(key, v);
    out = static_cast<std::size_t>(v);
  }

  void boolean(const std::string& key, bool& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) {
        throw ConfigError(key_path(key), "expected true or false");
      }
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_string()) {
        throw ConfigError(key_path(key), "expected a string");
      }
      out = v->get<std::string>();
    }
  }

  void state(const std::string& key, std::optional<lipm::LipmState>& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        throw ConfigError(key_path(key), "expected [offset, velocity]");
      }
      out = lipm::LipmState{(*v)[0].get<double>(), (*v)[1].get<double>(), 0.0};
    }
  }

  std::optional<Section> child(const std::string& key)
  {
    if (const json* v = find(key)) {
      return Section(*v, key_path(key));
    }
    return std::nullopt;
  }

  void finish() const
  {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) {
        throw ConfigError(key_path(it.key()), "unknown key");
      }
    }
  }

private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

ScenarioKind parse_kind(const std::string& s)
{
  if (s == "walk") {
    return ScenarioKind::Walk;
  }
  if (s == "push_recovery") {
    return ScenarioKind::PushRecovery;
  }
  if (s == "moving_ball") {
    return ScenarioKind::MovingBall;
  }
  if (s == "high_jump") {
    return ScenarioKind::HighJump;
  }
  if (s == "team_play") {
    return ScenarioKind::TeamPlay;
  }
  throw ConfigError("kind", "unknown scenario kind '" + s + "'");
}

void parse_robot(Section& s, RobotConfig& robot)
{
  s.string("model", robot.model);
  if (robot.model == "op2") {
    robot.pendulum.mass = 17.5;
  } else if (robot.model == "op2x") {
    robot.pendulum.mass = 19.0;
  } else {
    throw ConfigError(s.key_path("model"), "expected \"op2\" or \"op2x\"");
  }
  s.number("mass", robot.pendulum.mass);
  s.number("com_height", robot.pendulum.com_height);
  s.number("gravity", robot.pendulum.gravity);
}

void parse_gait(Section& s, gait::GaitParams& g)
{
  s.number("frequency", g.frequency);
  s.number("step_height", g.step_height);
  s.number("double_support_ratio", g.double_support_ratio);
  s.number("swing_amplitude", g.swing_amplitude);
  s.number("lean_gain_vel", g.lean_gain_vel);
  s.number("lean_gain_acc", g.lean_gain_acc);
  s.number("nominal_extension", g.nominal_extension);
  s.number("arm_swing_ratio", g.arm_swing_ratio);
}

void parse_walk(Section& s, WalkConfig& w)
{
  s.number("step_length", w.step_length);
  s.number("step_width", w.step_width);
  s.number("max_step_length", w.limits.max_step_length);
  s.number("min_step_duration", w.limits.min_step_duration);
  s.number("max_step_duration", w.limits.max_step_duration);
  s.number("timing_weight", w.limits.timing_weight);
  s.number("energy_band", w.limits.energy_band);
  s.number("scan_resolution", w.limits.scan_resolution);
  s.number("max_lateral_step", w.max_lateral_step);
  s.integer("max_recovery_steps", w.max_recovery_steps);
  s.number("fall_offset", w.fall_offset);
  s.state("initial_sagittal", w.initial_sagittal);
  s.state("initial_lateral", w.initial_lateral);
}

void parse_push(Section& s, PushConfig& p)
{
  s.number("delta_v", p.delta_v);
  s.number("retraction", p.retraction);
  s.number("pendulum_mass", p.pendulum_mass);
  s.number("pendulum_length", p.pendulum_length);
  s.number("transfer", p.transfer);
  s.integer("count", p.count);
  s.number("first_after", p.first_after);
  s.number("min_interval", p.min_interval);
  s.number("max_interval", p.max_interval);
  s.boolean("find_max", p.find_max);
  s.number("tolerance", p.tolerance);
  s.number("search_max", p.search_max);
}

void parse_ball(Section& s, BallConfig& b)
{
  s.integer("attempts", b.attempts);
  s.number("min_distance", b.min_distance);
  s.number("max_distance", b.max_distance);
  s.number("min_speed", b.min_speed);
  s.number("max_speed", b.max_speed);
  s.number("deceleration", b.deceleration);
  s.number("detection_interval", b.detection_interval);
  s.number("noise", b.noise);
  s.number("foot_line", b.foot_line);
  s.number("contact_tolerance", b.contact_tolerance);
  s.boolean("use_prior", b.use_prior);
  s.size("buffer", b.track.capacity);
  s.size("min_samples", b.min_samples);
  s.number("max_range", b.track.max_range);
  s.number("max_jump", b.track.max_jump);
  b.prior.deceleration = b.deceleration;
  s.number("prior_deceleration", b.prior.deceleration);
  s.number("prior_sigma", b.prior.sigma_accel);
  b.prior.sigma_measurement = b.noise;
  s.number("measurement_sigma", b.prior.sigma_measurement);
}

void parse_kick(Section& s, KickConfig& k)
{
  s.number("duration", k.duration);
  s.number("amplitude", k.amplitude);
  s.number("width", k.width);
  s.number("lead_guard", k.lead_guard);
  s.number("trail_guard", k.trail_guard);
  s.number("min_frequency", k.min_frequency);
  s.number("max_frequency", k.max_frequency);
  std::string leg = !k.leg ? "either" : *k.leg == gait::Leg::Left ? "left" : "right";
  s.string("leg", leg);
  if (leg == "left") {
    k.leg = gait::Leg::Left;
  } else if (leg == "right") {
    k.leg = gait::Leg::Right;
  } else if (leg == "either") {
    k.leg.reset();
  } else {
    throw ConfigError(s.key_path("leg"), "expected \"left\", \"right\" or \"either\"");
  }
}

void parse_team(Section& s, TeamConfig& t)
{
  s.integer("players_per_team", t.players_per_team);
  s.boolean("goalie", t.goalie);
  std::string mode = t.mode == behavior::GameMode::DropIn ? "drop_in" : "tournament";
  s.string("mode", mode);
  if (mode != "tournament" && mode != "drop_in") {
    throw ConfigError(s.key_path("mode"), "expected \"tournament\" or \"drop_in\"");
  }
  t.mode = mode == "drop_in" ? behavior::GameMode::DropIn : behavior::GameMode::Tournament;
  s.number("loss", t.loss);
  s.integer("latency_ticks", t.latency_ticks);
  s.number("hysteresis", t.agent.negotiation.hysteresis);
  s.number("heartbeat_period", t.agent.heartbeat_period);
  s.number("heartbeat_timeout", t.agent.heartbeat_timeout);
  s.number("takeover_stagger", t.agent.takeover_stagger);
  s.number("grant_retry_interval", t.agent.grant_retry_interval);
  s.integer("max_grant_retries", t.agent.max_grant_retries);
  s.number("request_interval", t.agent.request_interval);
  s.number("avoidance_radius", t.avoidance.radius);
  s.number("avoidance_gain", t.avoidance.gain);
  s.number("player_speed", t.player_speed);
  s.number("kick_speed", t.kick_speed);
  s.number("kick_spread", t.kick_spread);
  s.number("ball_deceleration", t.ball_deceleration);
  s.boolean("trace", t.trace);
  if (auto tp = s.child("teleport")) {
    TeleportConfig cfg;
    tp->number("time", cfg.time);
    tp->integer("team", cfg.team);
    tp->integer("player", cfg.player);
    tp->finish();
    t.teleport = cfg;
  }
  t.agent.mode = t.mode;
}

// Re-roots errors from library validators under the scenario section.
template <class Fn>
void prefixed(const std::string& section, Fn&& fn)
{
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string& p = e.path();
    throw ConfigError(p.rfind(section + ".", 0) == 0 ? p : section + "." + p, e.message());
  }
}

void require(bool ok, const std::string& path, const std::string& what)
{
  if (!ok) {
    throw ConfigError(path, what);
  }
}

} // namespace

std::string to_string(ScenarioKind kind)
{
  switch (kind) {
  case ScenarioKind::Walk:
    return "walk";
  case ScenarioKind::PushRecovery:
    return "push_recovery";
  case ScenarioKind::MovingBall:
    return "moving_ball";
  case ScenarioKind::HighJump:
    return "high_jump";
  case ScenarioKind::TeamPlay:
    return "team_play";
  }
  return "?";
}

void Scenario::validate() const
{
  require(tick > 0.0 && std::isfinite(tick), "tick", "must be positive");
  require(duration > 0.0 && std::isfinite(duration), "duration", "must be positive");
  require(duration / tick <= 1e8, "duration", "too many ticks");

  prefixed("robot", [&] { robot.pendulum.validate(); });
  // Frequency 0 means standing: stepping disabled.
  if (gait.frequency != 0.0) {
    prefixed("gait", [&] { gait.validate(); });
  }
  require(gait.frequency >= 0.0, "gait.frequency", "must be non-negative");
  prefixed("walk", [&] { walk.limits.validate(); });
  require(walk.step_width >= 0.0, "walk.step_width", "must be non-negative");
  require(walk.max_lateral_step > 0.0, "walk.max_lateral_step", "must be positive");
  require(walk.max_recovery_steps >= 1, "walk.max_recovery_steps", "must be at least 1");
  require(walk.fall_offset > 0.0, "walk.fall_offset", "must be positive");

  switch (kind) {
  case ScenarioKind::Walk:
    break;
  case ScenarioKind::PushRecovery:
    require(push.find_max || (push.delta_v.has_value() != push.retraction.has_value()), "push",
            "give exactly one of delta_v and retraction");
    require(!push.delta_v || *push.delta_v >= 0.0, "push.delta_v", "must be non-negative");
    require(!push.retraction || *push.retraction >= 0.0, "push.retraction", "must be non-negative");
    require(!push.retraction || *push.retraction <= push.pendulum_length, "push.retraction",
            "exceeds the pendulum reach");
    require(push.pendulum_mass > 0.0, "push.pendulum_mass", "must be positive");
    require(push.pendulum_length > 0.0, "push.pendulum_length", "must be positive");
    require(push.transfer > 0.0 && push.transfer <= 1.0, "push.transfer", "must lie in (0, 1]");
    require(push.count >= 0, "push.count", "must be non-negative");
    require(push.first_after >= 0.0, "push.first_after", "must be non-negative");
    require(push.min_interval >= 2.0, "push.min_interval", "pushes must be at least 2 s apart");
    require(push.max_interval >= push.min_interval, "push.max_interval", "must be at least min_interval");
    require(push.tolerance > 0.0, "push.tolerance", "must be positive");
    require(push.search_max > 0.0, "push.search_max", "must be positive");
    break;
  case ScenarioKind::MovingBall:
    require(ball.attempts >= 1, "ball.attempts", "must be at least 1");
    require(ball.min_distance > 0.0 && ball.max_distance >= ball.min_distance, "ball.min_distance",
            "need 0 < min_distance <= max_distance");
    require(ball.min_speed > 0.0 && ball.max_speed >= ball.min_speed, "ball.min_speed",
            "need 0 < min_speed <= max_speed");
    require(ball.deceleration >= 0.0, "ball.deceleration", "must be non-negative");
    require(ball.detection_interval > 0.0, "ball.detection_interval", "must be positive");
    require(ball.noise >= 0.0, "ball.noise", "must be non-negative");
    require(ball.contact_tolerance > 0.0, "ball.contact_tolerance", "must be positive");
    require(ball.min_samples >= 3 && ball.min_samples <= ball.track.capacity, "ball.min_samples",
            "must be between 3 and the buffer size");
    require(ball.prior.sigma_accel > 0.0, "ball.prior_sigma", "must be positive");
    require(ball.prior.sigma_measurement >= 0.0, "ball.measurement_sigma", "must be non-negative");
    prefixed("ball", [&] { ball.track.validate(); });
    require(kick.duration > 0.0, "kick.duration", "must be positive");
    require(kick.width > 0.0 && kick.width <= kick::KickMotion::max_width, "kick.width", "must lie in (0, 0.5]");
    require(kick.lead_guard >= 0.0, "kick.lead_guard", "must be non-negative");
    require(kick.trail_guard >= 0.0, "kick.trail_guard", "must be non-negative");
    require(kick.min_frequency > 0.0 && kick.max_frequency >= kick.min_frequency, "kick.min_frequency",
            "need 0 < min_frequency <= max_frequency");
    require(gait.frequency > 0.0, "gait.frequency", "the kicking robot must be stepping");
    break;
  case ScenarioKind::HighJump:
    require(jump.takeoff_velocity.has_value() != jump.flight_time.has_value(), "jump",
            "give exactly one of takeoff_velocity and flight_time");
    require(!jump.takeoff_velocity || *jump.takeoff_velocity >= 0.0, "jump.takeoff_velocity",
            "must be non-negative");
    require(!jump.flight_time || *jump.flight_time >= 0.0, "jump.flight_time", "must be non-negative");
    break;
  case ScenarioKind::TeamPlay:
    require(team.players_per_team >= 2 && team.players_per_team <= 6, "team.players_per_team",
            "must lie in [2, 6]");
    require(!team.goalie || team.players_per_team >= 3, "team.goalie", "a goalie needs at least 3 players");
    require(team.loss >= 0.0 && team.loss < 1.0, "team.loss", "must lie in [0, 1)");
    require(team.latency_ticks >= 1, "team.latency_ticks", "must be at least 1");
    require(team.agent.negotiation.hysteresis >= 0.0, "team.hysteresis", "must be non-negative");
    require(team.agent.heartbeat_period > 0.0, "team.heartbeat_period", "must be positive");
    require(team.agent.heartbeat_timeout > team.agent.heartbeat_period, "team.heartbeat_timeout",
            "must exceed the heartbeat period");
    require(team.agent.max_grant_retries >= 0, "team.max_grant_retries", "must be non-negative");
    require(team.player_speed > 0.0, "team.player_speed", "must be positive");
    require(team.kick_speed > 0.0, "team.kick_speed", "must be positive");
    require(team.ball_deceleration >= 0.0, "team.ball_deceleration", "must be non-negative");
    if (team.teleport) {
      require(team.teleport->team == 0 || team.teleport->team == 1, "team.teleport.team", "must be 0 or 1");
      require(team.teleport->player >= 0 && team.teleport->player < team.players_per_team, "team.teleport.player",
              "no such player");
      require(team.teleport->time >= 0.0, "team.teleport.time", "must be non-negative");
    }
    break;
  }
}

Scenario parse_scenario(const std::string& text, const std::string& name)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed scenario document: ") + e.what());
  }

  Scenario s;
  s.name = name;
  Section root(doc, "");
  std::string kind;
  if (!root.has("kind")) {
    throw ConfigError("kind", "missing");
  }
  root.string("kind", kind);
  s.kind = parse_kind(kind);
  root.string("name", s.name);
  root.unsigned_integer("seed", s.seed);
  root.number("duration", s.duration);
  root.number("tick", s.tick);

  if (auto sec = root.child("robot")) {
    parse_robot(*sec, s.robot);
    sec->finish();
  }
  if (auto sec = root.child("gait")) {
    parse_gait(*sec, s.gait);
    sec->finish();
  }
  if (auto sec = root.child("walk")) {
    parse_walk(*sec, s.walk);
    sec->finish();
  }
  if (auto sec = root.child("push")) {
    parse_push(*sec, s.push);
    sec->finish();
  }
  if (auto sec = root.child("ball")) {
    parse_ball(*sec, s.ball);
    sec->finish();
  } else {
    s.ball.prior.deceleration = s.ball.deceleration;
    s.ball.prior.sigma_measurement = s.ball.noise;
  }
  if (auto sec = root.child("kick")) {
    parse_kick(*sec, s.kick);
    sec->finish();
  }
  if (auto sec = root.child("jump")) {
    sec->number("takeoff_velocity", s.jump.takeoff_velocity);
    sec->number("flight_time", s.jump.flight_time);
    sec->finish();
  }
  if (auto sec = root.child("team")) {
    parse_team(*sec, s.team);
    sec->finish();
  }
  root.finish();
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot open scenario file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.stem().string());
}

} // namespace stride::harness
