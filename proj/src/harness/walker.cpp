#include "stride/harness/walker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stride::harness {

Walker::Walker(const Scenario& scenario)
  : params_(scenario.robot.pendulum)
  , limits_(scenario.walk.limits)
  , lateral_limits_(scenario.walk.limits)
  , fall_offset_(scenario.walk.fall_offset)
  , stepping_(scenario.gait.frequency > 0.0)
{
  const double nominal = stepping_ ? scenario.gait.step_duration() : 1.0;
  sagittal_cycle_ = lipm::LimitCycle::progressive(0.5 * scenario.walk.step_length, nominal);
  lateral_cycle_ = lipm::LimitCycle::alternating(0.5 * scenario.walk.step_width, nominal);
  lateral_limits_.max_step_length = scenario.walk.max_lateral_step;
  sagittal_ = scenario.walk.initial_sagittal.value_or(sagittal_cycle_.post_exchange_state(params_));
  lateral_ = scenario.walk.initial_lateral.value_or(lateral_cycle_.post_exchange_state(params_));
  sagittal_.time = 0.0;
  lateral_.time = 0.0;
  replan();
}

void Walker::replan()
{
  if (!stepping_) {
    exchange_at_ = std::numeric_limits<double>::infinity();
    return;
  }
  // A step decided now lands no sooner than min_step_duration from now,
  // whatever the time already spent in the current step.
  const double elapsed = time_ - last_exchange_;
  lipm::StepLimits limits = limits_;
  limits.min_step_duration += elapsed;
  const auto plan = lipm::plan_capture_step(sagittal_, params_, sagittal_cycle_, limits, elapsed);
  exchange_at_ = time_ + plan.step.time_to_step;
}

void Walker::push(double delta_v)
{
  sagittal_.velocity += delta_v;
  replan();
}

void Walker::propagate(double dt)
{
  sagittal_ = lipm::predict(sagittal_, params_, dt);
  lateral_ = lipm::predict(lateral_, params_, dt);
  time_ += dt;
}

Walker::Exchange Walker::exchange()
{
  const double sagittal_target = sagittal_cycle_.target_energy(params_);
  const auto step = lipm::location_for_timing(sagittal_, params_, sagittal_target, 0.0, limits_);
  sagittal_ = lipm::step_exchange(sagittal_, step.step);

  Exchange ex;
  ex.time = time_;
  ex.location = step.step.step_location;
  ex.energy_error = lipm::orbital_energy(sagittal_, params_) - sagittal_target;
  ex.capturable = step.capturable;
  ex.sagittal = sagittal_;
  ex.on_cycle = std::abs(ex.energy_error) <= limits_.energy_band && sagittal_.offset * sagittal_.velocity <= 1e-12;

  swing_ = swing_ == gait::Leg::Left ? gait::Leg::Right : gait::Leg::Left;
  last_exchange_ = time_;
  replan();

  // Lateral foot: the mirrored CoM must reach the cycle's pre-exchange offset
  // d at the next planned exchange. Velocity errors shrink by 1 / cosh(C T).
  const double c = params_.omega();
  const double horizon = exchange_at_ - time_;
  const double d = lateral_cycle_.support_exchange_offset;
  const double offset = (d + lateral_.velocity / c * std::sinh(c * horizon)) / std::cosh(c * horizon);
  const double side =
      std::clamp(lateral_.offset + offset, -lateral_limits_.max_step_length, lateral_limits_.max_step_length);
  lateral_ = lipm::mirrored(lipm::step_exchange(lateral_, {0.0, side}));
  ex.lateral = lateral_;
  return ex;
}

std::vector<Walker::Exchange> Walker::advance(double dt)
{
  std::vector<Exchange> out;
  const double end = time_ + dt;
  while (stepping_ && exchange_at_ <= end) {
    propagate(std::max(0.0, exchange_at_ - time_));
    out.push_back(exchange());
  }
  propagate(std::max(0.0, end - time_));
  time_ = end;
  return out;
}

double Walker::sagittal_energy_error() const
{
  return lipm::orbital_energy(sagittal_, params_) - sagittal_cycle_.target_energy(params_);
}

namespace {

bool diverged(const lipm::LipmState& s, double limit)
{
  return !std::isfinite(s.offset) || !std::isfinite(s.velocity) ||
         (std::abs(s.offset) > limit && s.offset * s.velocity > 0.0);
}

} // namespace

bool Walker::fallen() const
{
  return diverged(sagittal_, fall_offset_) || diverged(lateral_, fall_offset_);
}

gait::GaitPhase Walker::phase() const
{
  if (!stepping_) {
    return {0.0};
  }
  const double span = exchange_at_ - last_exchange_;
  const double frac = span > 0.0 ? std::clamp((time_ - last_exchange_) / span, 0.0, 1.0) : 1.0;
  const double base = swing_ == gait::Leg::Left ? 0.0 : -std::numbers::pi;
  return {gait::wrap_angle(base + std::numbers::pi * frac)};
}

} // namespace stride::harness
