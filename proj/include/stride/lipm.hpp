#pragma once

#include "stride/error.hpp"

namespace stride::lipm {

/// Point-mass pendulum constants. `omega()` is the characteristic
/// frequency C = sqrt(g / h) of the linearized dynamics x'' = C^2 x.
struct PendulumParams
{
  double com_height = 0.75;
  double gravity = 9.81;
  double mass = 19.0;

  double omega() const;
  void validate() const;
};

/// CoM offset and velocity relative to the current support pivot (one axis).
struct LipmState
{
  double offset = 0.0;
  double velocity = 0.0;
  double time = 0.0;
};

enum class CycleKind
{
  /// Sagittal walking: the CoM passes over each pivot in the same direction.
  Progressive,
  /// Lateral walking: the CoM swings back between feet. States are expressed
  /// in a frame that is mirrored after every support exchange.
  Alternating,
};

/// Periodic orbit of steady walking on one axis.
///
/// Only symmetric orbits are periodic, so the nominal step length must equal
/// twice the exchange offset. Use the named constructors.
struct LimitCycle
{
  double support_exchange_offset = 0.0;
  double nominal_step_duration = 0.5;
  double nominal_step_length = 0.0;
  CycleKind kind = CycleKind::Progressive;

  static LimitCycle progressive(double exchange_offset, double step_duration);
  static LimitCycle alternating(double half_step_width, double step_duration);

  void validate() const;

  /// |velocity| at the support exchange on the orbit.
  double exchange_velocity(const PendulumParams& params) const;
  /// Orbital energy of the orbit.
  double target_energy(const PendulumParams& params) const;
  /// State right after a nominal support exchange.
  LipmState post_exchange_state(const PendulumParams& params) const;
  /// State right before a nominal support exchange.
  LipmState pre_exchange_state(const PendulumParams& params) const;
};

struct StepLimits
{
  double max_step_length = 0.5;
  double min_step_duration = 0.05;
  double max_step_duration = 1.0;
  /// Weight of the timing term in the step selection cost, (m/s)^2 per s^2.
  double timing_weight = 0.01;
  /// |E - E_target| below this counts as on the limit cycle, J/kg.
  double energy_band = 1e-4;
  double scan_resolution = 1e-3;

  void validate() const;
};

struct Footstep
{
  double time_to_step = 0.0;
  /// New pivot relative to the current pivot.
  double step_location = 0.0;
};

struct CapturePlan
{
  Footstep step;
  /// |E_post - E_target| after the planned exchange.
  double energy_error = 0.0;
  /// Selected timing or location sits on a limit.
  bool clamped = false;
  /// energy_error is within the energy band.
  bool capturable = false;
};

class Uncapturable : public Error
{
public:
  explicit Uncapturable(const CapturePlan& best_effort);
  const CapturePlan& best_effort() const noexcept { return best_; }

private:
  CapturePlan best_;
};

/// Closed-form propagation by `dt` seconds.
LipmState predict(const LipmState& state, const PendulumParams& params, double dt);

/// E = v^2/2 - C^2 x^2/2, conserved between support exchanges.
double orbital_energy(const LipmState& state, const PendulumParams& params);

/// Relabels the state about the new pivot; velocity is unchanged.
LipmState step_exchange(const LipmState& state, const Footstep& step);

/// Flips the sign of the frame (used by alternating cycles after an exchange).
LipmState mirrored(const LipmState& state);

/// Step location that makes the post-exchange energy hit `target_energy` when
/// the exchange happens at `time_to_step`. The returned plan is best effort
/// (clamped, not capturable) when no location within the limits does.
CapturePlan location_for_timing(const LipmState& state, const PendulumParams& params,
                                double target_energy, double time_to_step, const StepLimits& limits);

/// Timing and location of the next footstep that returns the state to the
/// limit cycle energy. `time_in_step` is the time already spent on the
/// current support leg; duration limits and the nominal duration are
/// measured from the start of the step. Never throws on uncapturable states.
CapturePlan plan_capture_step(const LipmState& state, const PendulumParams& params, const LimitCycle& cycle,
                              const StepLimits& limits, double time_in_step = 0.0);

/// As plan_capture_step, but throws Uncapturable when the energy band cannot
/// be reached within the limits.
Footstep compute_capture_step(const LipmState& state, const PendulumParams& params, const LimitCycle& cycle,
                              const StepLimits& limits, double time_in_step = 0.0);

} // namespace stride::lipm
