#include "stride/kick.hpp"

#include <algorithm>
#include <cmath>

namespace stride::kick {

void KickWindow::validate() const
{
  if (!std::isfinite(start) || !std::isfinite(end) || !(end > start)) {
    throw ConfigError("kick.window", "end must be after start");
  }
  if (!(lead_guard >= 0.0) || !(trail_guard >= 0.0)) {
    throw ConfigError("kick.window", "guard intervals must be non-negative");
  }
}

void KickMotion::validate() const
{
  if (!(duration > 0.0)) {
    throw ConfigError("kick.duration", "must be positive");
  }
  if (!(timing >= 0.0 && timing <= 1.0)) {
    throw ConfigError("kick.timing", "must lie in [0, 1]");
  }
  if (!(amplitude >= 0.0)) {
    throw ConfigError("kick.amplitude", "must be non-negative");
  }
  if (!(width > 0.0) || width > max_width) {
    throw ConfigError("kick.width", "must lie in (0, 0.5]");
  }
}

double KickMotion::border_activation() const
{
  return amplitude * std::exp(-0.5 / (width * width));
}

double allowed_window(const KickWindow& window)
{
  window.validate();
  const double dt = window.end - window.start - window.lead_guard - window.trail_guard;
  if (dt <= 0.0) {
    throw WindowClosed("kick window has no room between its guard intervals");
  }
  return dt;
}

double delay(const KickWindow& window, const KickMotion& motion)
{
  const double dt = allowed_window(window);
  if (motion.duration >= dt) {
    throw MotionTooLong("kick motion does not fit into the allowed window");
  }
  return motion.timing * (dt - motion.duration);
}

double start_time(const KickWindow& window, const KickMotion& motion)
{
  return window.start + window.lead_guard + delay(window, motion);
}

double kick_phase(double t, const KickWindow& window, const KickMotion& motion)
{
  return 2.0 * (t - start_time(window, motion)) / motion.duration - 1.0;
}

double augment_leg_angle(double leg_angle, double t, const KickWindow& window, const KickMotion& motion)
{
  const double t_k = start_time(window, motion);
  if (t < t_k || t > t_k + motion.duration) {
    return leg_angle;
  }
  const double x = kick_phase(t, window, motion) / motion.width;
  return leg_angle - motion.amplitude * std::exp(-0.5 * x * x);
}

double apex_time(const KickWindow& window, const KickMotion& motion)
{
  return start_time(window, motion) + 0.5 * motion.duration;
}

ScheduledKick schedule_kick(const KickWindow& window, double duration, double amplitude, double width,
                            double apex)
{
  const double dt = allowed_window(window);
  if (duration >= dt) {
    throw MotionTooLong("kick motion does not fit into the allowed window");
  }
  const double lambda = (apex - window.start - window.lead_guard - 0.5 * duration) / (dt - duration);

  ScheduledKick out;
  out.motion = {duration, std::clamp(lambda, 0.0, 1.0), amplitude, width};
  out.apex_clamped = !(lambda >= 0.0 && lambda <= 1.0);
  out.motion.validate();
  return out;
}

} // namespace stride::kick
