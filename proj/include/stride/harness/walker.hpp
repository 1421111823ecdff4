#pragma once

#include <vector>

#include "stride/gait.hpp"
#include "stride/harness/scenario.hpp"
#include "stride/lipm.hpp"

namespace stride::harness {

/// Point-mass walker: a sagittal and a lateral pendulum sharing footstep
/// timing. The sagittal planner picks every step; the lateral foot is placed
/// so that the lateral CoM reaches the cycle's exchange offset at the next
/// planned exchange, which leaves its velocity error shrinking geometrically.
/// The lateral state lives in a frame mirrored at each exchange. The gait
/// phase is slaved to the planned step time so that exchanges fall on mu = 0
/// and mu = pi.
class Walker
{
public:
  struct Exchange
  {
    double time = 0.0;
    double location = 0.0;
    /// Post-exchange sagittal energy minus the cycle energy.
    double energy_error = 0.0;
    /// Energy within the band and the CoM heading for the new pivot.
    bool on_cycle = false;
    bool capturable = false;
    lipm::LipmState sagittal;
    lipm::LipmState lateral;
  };

  explicit Walker(const Scenario& scenario);

  /// Adds an instantaneous sagittal CoM velocity change.
  void push(double delta_v);

  /// Advances by dt, performing any exchange that falls inside it exactly.
  std::vector<Exchange> advance(double dt);

  double time() const { return time_; }
  const lipm::LipmState& sagittal() const { return sagittal_; }
  const lipm::LipmState& lateral() const { return lateral_; }
  double sagittal_energy_error() const;
  bool stepping() const { return stepping_; }
  bool fallen() const;
  gait::GaitPhase phase() const;
  gait::Leg swing_leg() const { return swing_; }
  /// Absolute time of the next planned exchange.
  double next_exchange() const { return exchange_at_; }
  const lipm::LimitCycle& sagittal_cycle() const { return sagittal_cycle_; }
  const lipm::PendulumParams& pendulum() const { return params_; }

private:
  void replan();
  void propagate(double dt);
  Exchange exchange();

  lipm::PendulumParams params_;
  lipm::LimitCycle sagittal_cycle_;
  lipm::LimitCycle lateral_cycle_;
  lipm::StepLimits limits_;
  lipm::StepLimits lateral_limits_;
  double fall_offset_;
  bool stepping_;

  lipm::LipmState sagittal_;
  lipm::LipmState lateral_;
  double time_ = 0.0;
  double last_exchange_ = 0.0;
  double exchange_at_ = 0.0;
  gait::Leg swing_ = gait::Leg::Left;
};

} // namespace stride::harness
