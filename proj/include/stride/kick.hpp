#pragma once

#include "stride/error.hpp"

namespace stride::kick {

/// Legal execution window of an in-walk kick inside one swing phase.
///
/// `start` is the end of the previous support transition and `end` the start
/// of the next one. Kicks are prohibited in [start, start + lead_guard] and
/// [end - trail_guard, end].
struct KickWindow
{
  double start = 0.0;
  double end = 0.0;
  double lead_guard = 0.0;
  double trail_guard = 0.0;

  void validate() const;
};

/// Gaussian leg-angle augmentation and its placement inside the window.
struct KickMotion
{
  double duration = 0.35;
  /// Placement of the motion inside the window, 0 = earliest, 1 = latest.
  double timing = 0.0;
  double amplitude = 0.35;
  /// Gaussian width in kick-phase units.
  double width = 0.25;

  static constexpr double max_width = 0.5;
  static constexpr double recommended_width = 0.3;

  void validate() const;
  /// Size of the Gaussian term at the motion borders, A exp(-1/(2 sigma^2)).
  double border_activation() const;
};

struct ScheduledKick
{
  KickMotion motion;
  /// The requested apex fell outside the window and timing was clamped.
  bool apex_clamped = false;
};

/// Length of the interval where a kick can be performed safely.
/// Throws WindowClosed when it is empty.
double allowed_window(const KickWindow& window);

/// Delay of the motion start after the leading guard.
/// Throws MotionTooLong when the motion does not fit.
double delay(const KickWindow& window, const KickMotion& motion);

/// Time at which the kick motion starts.
double start_time(const KickWindow& window, const KickMotion& motion);

/// Kick phase: -1 at the motion start, +1 at its end, linear in between and
/// extrapolated outside.
double kick_phase(double t, const KickWindow& window, const KickMotion& motion);

/// Sagittal leg angle with the kick Gaussian subtracted while the motion runs.
double augment_leg_angle(double leg_angle, double t, const KickWindow& window, const KickMotion& motion);

/// Picks the timing parameter so the Gaussian apex lands on `apex_time`,
/// clamping it to [0, 1] when the apex cannot be reached in this window.
ScheduledKick schedule_kick(const KickWindow& window, double duration, double amplitude, double width,
                            double apex_time);

/// Time of the Gaussian apex (kick phase 0).
double apex_time(const KickWindow& window, const KickMotion& motion);

} // namespace stride::kick
