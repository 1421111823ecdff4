#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

#include "stride/error.hpp"

namespace stride::gait {

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Gait phase angle. One full turn is one left plus one right step; the left
/// leg swings for mu in (0, pi), the right leg for mu in (-pi, 0).
struct GaitPhase
{
  double mu = 0.0;
};

struct GaitParams
{
  double frequency = 0.9;
  /// Leg shortening at mid swing, in leg-extension units.
  double step_height = 0.08;
  /// Fraction of each half cycle spent in double support.
  double double_support_ratio = 0.1;
  double swing_amplitude = 0.12;
  double lean_gain_vel = 0.1;
  double lean_gain_acc = 0.02;
  double nominal_extension = 0.95;
  /// Arm swing relative to the leg angle of the same side.
  double arm_swing_ratio = -0.5;

  void validate() const;
  /// Duration of one step (half cycle).
  double step_duration() const { return 0.5 / frequency; }
};

/// Leg pose in abstract space. Lateral angles share one robot frame for both
/// legs (positive toward the robot's left).
struct AbstractPose
{
  double leg_angle_sagittal = 0.0;
  double leg_angle_lateral = 0.0;
  /// 1 = fully extended, 0 = foot at the hip.
  double extension = 1.0;
  double foot_angle = 0.0;
  double arm_angle = 0.0;
};

struct PosePair
{
  AbstractPose left;
  AbstractPose right;
};

enum class Leg
{
  Left,
  Right,
};

struct SupportCoefficients
{
  double left = 0.5;
  double right = 0.5;
};

GaitPhase advance_phase(GaitPhase phase, const GaitParams& params, double dt);

/// Phase of one leg; the right leg runs half a cycle behind the left.
double leg_phase(GaitPhase phase, Leg leg);

/// Open-loop waveform of a single leg as a function of its leg phase.
AbstractPose leg_waveform(double leg_phase, const GaitParams& params);

PosePair cpg_waveform(GaitPhase phase, const GaitParams& params);

/// Support duty of a leg: 1 in stance, 0 in swing, linear ramps through
/// double support. The two legs always sum to 1.
double support_coefficient(double leg_phase, const GaitParams& params);
SupportCoefficients support_coefficients(GaitPhase phase, const GaitParams& params);

/// Time offsets (relative to now) of the swing phase of `leg`: the current
/// swing if the leg is swinging, otherwise the next one.
struct SwingInterval
{
  double start = 0.0;
  double end = 0.0;
};
SwingInterval swing_interval(GaitPhase phase, Leg leg, const GaitParams& params);

struct FootPose
{
  /// Ankle position relative to the hip, x forward, y left, z up.
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Eigen::Matrix3d rotation() const;
};

FootPose abstract_to_cartesian(const AbstractPose& pose, double leg_length);
AbstractPose cartesian_to_abstract(const FootPose& foot, double leg_length);

struct LegLinks
{
  double thigh = 0.4;
  double shank = 0.4;
};

struct JointAngles
{
  double hip_yaw = 0.0;
  double hip_roll = 0.0;
  double hip_pitch = 0.0;
  double knee = 0.0;
  double ankle_pitch = 0.0;
  double ankle_roll = 0.0;

  std::array<double, 6> as_array() const { return {hip_yaw, hip_roll, hip_pitch, knee, ankle_pitch, ankle_roll}; }
};

struct JointLimits
{
  JointAngles lower{-1.0, -0.8, -2.0, 0.0, -1.3, -0.8};
  JointAngles upper{1.0, 0.8, 1.5, 2.6, 1.3, 0.8};

  bool contains(const JointAngles& q) const;
};

/// Forward kinematics of the serial leg (hip yaw-roll-pitch, knee pitch,
/// ankle pitch-roll) with the hip at the origin.
FootPose joint_to_cartesian(const JointAngles& q, const LegLinks& links);

/// Analytic inverse kinematics. The knee is always bent forward (knee >= 0).
/// Throws OutOfWorkspace when the ankle is out of reach or, when `limits`
/// is given, when the solution leaves them.
JointAngles cartesian_to_joint(const FootPose& foot, const LegLinks& links,
                               const std::optional<JointLimits>& limits = std::nullopt);

struct PidGains
{
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct FeedbackGains
{
  PidGains arm_angle;
  PidGains hip_angle;
  PidGains continuous_foot_angle;
  PidGains support_foot_angle;
  PidGains com_shift;
  PidGains virtual_slope;
  /// Bound on each integral contribution, radians.
  double integral_limit = 0.1;

  void validate() const;
};

/// Trunk tilt error fed to the corrective mechanisms.
struct TiltError
{
  double pitch = 0.0;
  double roll = 0.0;
  double pitch_rate = 0.0;
  double roll_rate = 0.0;
};

/// Integrator state of each mechanism. Index order: arm, hip (pitch),
/// hip (roll), continuous foot, support foot, CoM shift, virtual slope.
struct FeedbackState
{
  std::array<double, 7> integral{};
};

/// Integrates the error for `dt` seconds with per-mechanism anti-windup.
FeedbackState update_feedback(const FeedbackState& state, const TiltError& error, const FeedbackGains& gains,
                              double dt);

/// Adds the corrective offsets of all six mechanisms to the waveform output.
PosePair apply_feedback(const PosePair& poses, const TiltError& error, const FeedbackGains& gains,
                        const FeedbackState& state = {}, const SupportCoefficients& support = {});

/// Velocity and acceleration based sagittal leaning.
PosePair lean(const PosePair& poses, double cmd_vel, double cmd_acc, const GaitParams& params);

} // namespace stride::gait
