#include <algorithm>
#include <cmath>
#include <limits>

#include "stride/harness/experiments.hpp"
#include "rng.hpp"
#include "runners.hpp"

namespace stride::harness {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Straight roll toward the robot along -x with constant deceleration until
// the ball stops.
struct Roll
{
  double launch = 0.0;
  double start_x = 0.0;
  double speed = 0.0;
  double deceleration = 0.0;

  double stop_after() const { return deceleration > 0.0 ? speed / deceleration : inf; }

  double x(double t) const
  {
    const double tau = std::clamp(t - launch, 0.0, stop_after());
    return start_x - speed * tau + 0.5 * deceleration * tau * tau;
  }

  double v(double t) const
  {
    const double tau = t - launch;
    if (tau < 0.0 || tau >= stop_after()) {
      return 0.0;
    }
    return -(speed - deceleration * tau);
  }

  std::optional<double> arrival(double line) const
  {
    const double d = start_x - line;
    const double disc = speed * speed - 2.0 * deceleration * d;
    if (disc < 0.0) {
      return std::nullopt;
    }
    return launch + 2.0 * d / (speed + std::sqrt(disc));
  }
};

struct Window
{
  kick::KickWindow window;
  gait::Leg leg = gait::Leg::Left;
  double frequency = 0.0;
};

// Apex range [start + lead + L/2, end - trail - L/2] of a window.
double apex_miss(const kick::KickWindow& w, double duration, double apex, double& centre)
{
  const double lo = w.start + w.lead_guard + 0.5 * duration;
  const double hi = w.end - w.trail_guard - 0.5 * duration;
  centre = std::abs(apex - 0.5 * (lo + hi));
  return std::max({0.0, lo - apex, apex - hi});
}

// Searches gait frequencies and kicking legs for the swing whose feasible
// apex range best covers `apex`: first by distance outside the range, then by
// distance to the range centre. Swings that already started are skipped.
std::optional<Window> choose_window(const Scenario& s, gait::GaitPhase phase, double now, double apex)
{
  const auto& k = s.kick;
  std::vector<gait::Leg> legs;
  if (k.leg) {
    legs.push_back(*k.leg);
  } else {
    legs = {gait::Leg::Left, gait::Leg::Right};
  }

  std::optional<Window> best;
  double best_miss = inf;
  double best_centre = inf;
  const int grid = std::max(1, static_cast<int>(std::lround((k.max_frequency - k.min_frequency) / 1e-3)));
  for (int i = 0; i <= grid; ++i) {
    gait::GaitParams g = s.gait;
    g.frequency = k.min_frequency + (k.max_frequency - k.min_frequency) * i / grid;
    const double cycle = 1.0 / g.frequency;
    for (gait::Leg leg : legs) {
      auto sw = gait::swing_interval(phase, leg, g);
      if (sw.start < 0.0) {
        sw.start += cycle;
        sw.end += cycle;
      }
      for (double off = 0.0; now + sw.start + off <= apex; off += cycle) {
        kick::KickWindow w{now + sw.start + off, now + sw.end + off, k.lead_guard, k.trail_guard};
        if (w.end - w.start - w.lead_guard - w.trail_guard <= k.duration) {
          break;
        }
        double centre = 0.0;
        const double miss = apex_miss(w, k.duration, apex, centre);
        if (miss < best_miss - 1e-9 || (miss <= best_miss + 1e-9 && centre < best_centre - 1e-9)) {
          best = Window{w, leg, g.frequency};
          best_miss = miss;
          best_centre = centre;
        }
      }
    }
  }
  return best;
}

} // namespace

BallTrial moving_ball_trial(const Scenario& s, TrajectoryLog* log)
{
  Rng rng(s.seed);
  const auto& b = s.ball;
  const std::optional<ball::AccelerationPrior> prior =
      b.use_prior ? std::optional<ball::AccelerationPrior>(b.prior) : std::nullopt;

  BallTrial trial;
  gait::GaitParams g = s.gait;
  gait::GaitPhase phase;
  long tick = 0;
  auto now = [&] { return tick * s.tick; };

  // Events raised while processing a tick go on that tick's row.
  std::string pending;
  auto append = [&](const Roll& roll, double predicted, double left, double right) {
    if (log) {
      log->append({now(), phase.mu, g.frequency, roll.x(now()), roll.v(now()), predicted, left, right}, pending);
    }
    pending.clear();
  };
  auto note = [&](const std::string& e) { pending += pending.empty() ? e : ";" + e; };

  for (int a = 0; a < b.attempts; ++a) {
    // Each attempt starts one second after the previous one ended, on the tick grid.
    const double launch = now() + 1.0;
    Roll roll{launch, b.foot_line + rng.uniform(b.min_distance, b.max_distance),
              rng.uniform(b.min_speed, b.max_speed), b.deceleration};
    BallAttempt attempt;
    attempt.launch_time = launch;
    attempt.distance = roll.start_x - b.foot_line;
    attempt.speed = roll.speed;
    attempt.true_arrival = roll.arrival(b.foot_line);

    ball::BallTrack track;
    track.params = b.track;
    double next_detection = launch;
    std::optional<Window> chosen;
    std::optional<kick::ScheduledKick> kick;
    bool committed = false;
    bool infeasible_noted = false;
    double predicted = 0.0;
    double end = launch + std::min(attempt.true_arrival ? *attempt.true_arrival - launch : roll.stop_after(), 8.0) + 0.5;

    while (now() < end - 1e-9) {
      const double t = now();
      while (next_detection <= t + 1e-9) {
        const double td = next_detection;
        next_detection += b.detection_interval;
        if (td == launch) {
          note("launch");
        }
        ball::BallDetection det{td, {roll.x(td) + rng.normal(b.noise), rng.normal(b.noise)}};
        track = ball::update_track(track, det);
        if (track.samples.size() < b.min_samples || committed) {
          continue;
        }
        const auto est = ball::estimate(track, b.detection_interval, prior);
        const auto plan = ball::predict_arrival(est, b.foot_line);
        if (!plan.feasible) {
          if (!infeasible_noted) {
            note("infeasible");
            infeasible_noted = true;
          }
          continue;
        }
        predicted = plan.arrival_time;
        if (attempt.true_arrival) {
          trial.arrival_errors.push_back(std::abs(plan.arrival_time - *attempt.true_arrival));
        }
        attempt.feasible = true;
        // The frequency may only change before the chosen swing starts.
        if (!chosen || chosen->window.start > t) {
          chosen = choose_window(s, phase, t, plan.arrival_time);
          if (!chosen) {
            continue;
          }
          g.frequency = chosen->frequency;
        }
        kick = ball::plan_trigger(plan, chosen->window, s.kick.duration, s.kick.amplitude, s.kick.width);
        if (kick::start_time(chosen->window, kick->motion) < t + b.detection_interval) {
          committed = true;
          attempt.apex = kick::apex_time(chosen->window, kick->motion);
          attempt.frequency = chosen->frequency;
          end = std::max(end, *attempt.apex + 0.2);
          note("kick");
        }
      }

      const auto poses = gait::cpg_waveform(phase, g);
      double left = poses.left.leg_angle_sagittal;
      double right = poses.right.leg_angle_sagittal;
      if (committed) {
        double& angle = chosen->leg == gait::Leg::Left ? left : right;
        angle = kick::augment_leg_angle(angle, t, chosen->window, kick->motion);
      }
      append(roll, predicted, left, right);
      phase = gait::advance_phase(phase, g, s.tick);
      ++tick;
    }

    attempt.success = committed && attempt.true_arrival &&
                      std::abs(*attempt.apex - *attempt.true_arrival) <= b.contact_tolerance;
    if (log) {
      log->note(attempt.success ? "success" : "miss");
    }
    trial.successes += attempt.success ? 1 : 0;
    trial.attempts.push_back(attempt);
  }
  return trial;
}

std::vector<std::string> moving_ball_columns()
{
  return {"t", "phase", "frequency", "ball_x", "ball_v", "predicted_arrival", "left_leg_angle", "right_leg_angle"};
}

ScenarioResult run_moving_ball(const Scenario& s)
{
  ScenarioResult result;
  result.log = TrajectoryLog(moving_ball_columns());
  const auto trial = moving_ball_trial(s, &result.log);

  auto& m = result.metrics;
  m["scenario"] = s.name;
  m["kind"] = to_string(s.kind);
  m["seed"] = s.seed;
  m["attempts"] = trial.attempts.size();
  m["goals"] = trial.successes;
  auto attempts = Metrics::array();
  for (const auto& a : trial.attempts) {
    Metrics j;
    j["launch_time"] = a.launch_time;
    j["distance"] = a.distance;
    j["speed"] = a.speed;
    j["true_arrival"] = a.true_arrival ? Metrics(*a.true_arrival) : Metrics(nullptr);
    j["apex"] = a.apex ? Metrics(*a.apex) : Metrics(nullptr);
    j["feasible"] = a.feasible;
    j["success"] = a.success;
    j["frequency"] = a.frequency;
    attempts.push_back(j);
  }
  m["attempt_log"] = attempts;
  double worst = 0.0;
  for (double e : trial.arrival_errors) {
    worst = std::max(worst, e);
  }
  m["estimates"] = trial.arrival_errors.size();
  m["max_arrival_error"] = worst;
  m["events"] = result.log.event_count();
  if (trial.successes < static_cast<int>(trial.attempts.size())) {
    result.failures.push_back("missed " + std::to_string(trial.attempts.size() - trial.successes) + " of " +
                              std::to_string(trial.attempts.size()) + " kicks");
  }
  return result;
}

} // namespace stride::harness
