#include "stride/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace stride::gait {

namespace {

constexpr double pi = std::numbers::pi;

Eigen::Matrix3d rot_x(double a)
{
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

Eigen::Matrix3d rot_y(double a)
{
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY()).toRotationMatrix();
}

Eigen::Matrix3d rot_z(double a)
{
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

double pid(const PidGains& g, double error, double integral, double rate)
{
  return g.kp * error + g.ki * integral + g.kd * rate;
}

double clamp_integral(double integral, double ki, double limit)
{
  if (ki <= 0.0) {
    return integral;
  }
  const double bound = limit / ki;
  return std::clamp(integral, -bound, bound);
}

} // namespace

double wrap_angle(double angle)
{
  double a = std::remainder(angle, 2.0 * pi);
  if (a <= -pi) {
    a += 2.0 * pi;
  }
  return a;
}

void GaitParams::validate() const
{
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw ConfigError("gait.frequency", "must be positive");
  }
  if (!(double_support_ratio >= 0.0 && double_support_ratio < 0.5)) {
    throw ConfigError("gait.double_support_ratio", "must lie in [0, 0.5)");
  }
  if (!(nominal_extension >= 0.0 && nominal_extension <= 1.0)) {
    throw ConfigError("gait.nominal_extension", "must lie in [0, 1]");
  }
  if (!(step_height >= 0.0)) {
    throw ConfigError("gait.step_height", "must be non-negative");
  }
}

GaitPhase advance_phase(GaitPhase phase, const GaitParams& params, double dt)
{
  return {wrap_angle(phase.mu + 2.0 * pi * params.frequency * dt)};
}

double leg_phase(GaitPhase phase, Leg leg)
{
  return leg == Leg::Left ? phase.mu : wrap_angle(phase.mu + pi);
}

AbstractPose leg_waveform(double psi, const GaitParams& params)
{
  if (psi >= pi) {
    psi -= 2.0 * pi;
  }
  const double ds = params.double_support_ratio * pi;

  // theta runs 0 -> pi through swing and pi -> 2 pi through stance.
  double theta = 0.0;
  double lift = 0.0;
  if (psi >= ds) {
    const double progress = (psi - ds) / (pi - ds);
    theta = pi * progress;
    lift = std::sin(pi * progress);
  } else {
    theta = pi + pi * (psi + pi) / (pi + ds);
  }

  AbstractPose pose;
  pose.leg_angle_sagittal = -params.swing_amplitude * std::cos(theta);
  pose.leg_angle_lateral = 0.0;
  pose.extension = std::clamp(params.nominal_extension - params.step_height * lift, 0.0, 1.0);
  pose.foot_angle = 0.0;
  pose.arm_angle = params.arm_swing_ratio * pose.leg_angle_sagittal;
  return pose;
}

PosePair cpg_waveform(GaitPhase phase, const GaitParams& params)
{
  return {leg_waveform(leg_phase(phase, Leg::Left), params), leg_waveform(leg_phase(phase, Leg::Right), params)};
}

double support_coefficient(double psi, const GaitParams& params)
{
  if (psi >= pi) {
    psi -= 2.0 * pi;
  }
  const double ds = params.double_support_ratio * pi;
  if (psi >= 0.0 && psi < ds) {
    return 1.0 - psi / ds;
  }
  if (psi >= ds) {
    return 0.0;
  }
  if (psi < -pi + ds) {
    return (psi + pi) / ds;
  }
  return 1.0;
}

SupportCoefficients support_coefficients(GaitPhase phase, const GaitParams& params)
{
  return {support_coefficient(leg_phase(phase, Leg::Left), params),
          support_coefficient(leg_phase(phase, Leg::Right), params)};
}

SwingInterval swing_interval(GaitPhase phase, Leg leg, const GaitParams& params)
{
  const double psi = leg_phase(phase, leg);
  const double ds = params.double_support_ratio * pi;
  const double rate = 2.0 * pi * params.frequency;
  const double since_start = psi - ds;
  double start = 0.0;
  if (since_start >= 0.0) {
    start = -since_start / rate;
  } else {
    start = (ds - psi) / rate;
  }
  return {start, start + (pi - ds) / rate};
}

Eigen::Matrix3d FootPose::rotation() const
{
  return rot_z(yaw) * rot_x(roll) * rot_y(pitch);
}

FootPose abstract_to_cartesian(const AbstractPose& pose, double leg_length)
{
  const double r = pose.extension * leg_length;
  const double sp = std::sin(pose.leg_angle_sagittal);
  const double cp = std::cos(pose.leg_angle_sagittal);
  const double sl = std::sin(pose.leg_angle_lateral);
  const double cl = std::cos(pose.leg_angle_lateral);
  FootPose foot;
  foot.position = r * Eigen::Vector3d(sp, cp * sl, -cp * cl);
  foot.pitch = pose.foot_angle;
  return foot;
}

AbstractPose cartesian_to_abstract(const FootPose& foot, double leg_length)
{
  const Eigen::Vector3d& p = foot.position;
  const double r = p.norm();
  AbstractPose pose;
  pose.extension = r / leg_length;
  pose.leg_angle_sagittal = r > 0.0 ? std::asin(std::clamp(p.x() / r, -1.0, 1.0)) : 0.0;
  pose.leg_angle_lateral = std::atan2(p.y(), -p.z());
  pose.foot_angle = foot.pitch;
  return pose;
}

bool JointLimits::contains(const JointAngles& q) const
{
  const auto v = q.as_array();
  const auto lo = lower.as_array();
  const auto hi = upper.as_array();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < lo[i] || v[i] > hi[i]) {
      return false;
    }
  }
  return true;
}

FootPose joint_to_cartesian(const JointAngles& q, const LegLinks& links)
{
  const Eigen::Matrix3d hip = rot_z(q.hip_yaw) * rot_x(q.hip_roll) * rot_y(q.hip_pitch);
  const Eigen::Matrix3d shank = hip * rot_y(q.knee);
  const Eigen::Matrix3d foot = shank * rot_y(q.ankle_pitch) * rot_x(q.ankle_roll);

  FootPose out;
  out.position = hip * Eigen::Vector3d(0.0, 0.0, -links.thigh) + shank * Eigen::Vector3d(0.0, 0.0, -links.shank);
  // yaw-roll-pitch extraction of the foot rotation
  out.pitch = std::atan2(-foot(2, 0), foot(2, 2));
  out.roll = std::atan2(foot(2, 1), std::hypot(foot(2, 0), foot(2, 2)));
  out.yaw = std::atan2(-foot(0, 1), foot(1, 1));
  return out;
}

JointAngles cartesian_to_joint(const FootPose& foot, const LegLinks& links, const std::optional<JointLimits>& limits)
{
  const double a = links.thigh;
  const double b = links.shank;
  const Eigen::Matrix3d rf = foot.rotation();
  // hip relative to the ankle, in the foot frame
  const Eigen::Vector3d r = rf.transpose() * (-foot.position);
  const double c = r.norm();
  constexpr double slack = 1e-12;
  if (c > a + b + slack || c < std::abs(a - b) - slack) {
    throw OutOfWorkspace("ankle target out of reach");
  }

  JointAngles q;
  q.ankle_roll = std::atan2(r.y(), r.z());
  const Eigen::Vector3d w = rot_x(q.ankle_roll) * r;

  // law of cosines, knee bent forward
  const double cos_knee = std::clamp((c * c - a * a - b * b) / (2.0 * a * b), -1.0, 1.0);
  q.knee = std::acos(cos_knee);

  // w = Ry(-ankle_pitch) applied to the knee-bent base vector
  const double base = std::atan2(-a * std::sin(q.knee), a * std::cos(q.knee) + b);
  q.ankle_pitch = -(std::atan2(w.x(), w.z()) - base);

  const Eigen::Matrix3d hip = rf * rot_x(-q.ankle_roll) * rot_y(-q.ankle_pitch - q.knee);
  q.hip_yaw = std::atan2(-hip(0, 1), hip(1, 1));
  q.hip_roll = std::atan2(hip(2, 1), std::hypot(hip(2, 0), hip(2, 2)));
  q.hip_pitch = std::atan2(-hip(2, 0), hip(2, 2));

  if (limits && !limits->contains(q)) {
    throw OutOfWorkspace("inverse kinematics solution violates joint limits");
  }
  return q;
}

void FeedbackGains::validate() const
{
  for (const PidGains* g : {&arm_angle, &hip_angle, &continuous_foot_angle, &support_foot_angle, &com_shift,
                            &virtual_slope}) {
    if (!(g->kp >= 0.0) || !(g->ki >= 0.0) || !(g->kd >= 0.0) || !std::isfinite(g->kp) ||
        !std::isfinite(g->ki) || !std::isfinite(g->kd)) {
      throw ConfigError("feedback", "gains must be finite and non-negative");
    }
  }
  if (!(integral_limit >= 0.0)) {
    throw ConfigError("feedback.integral_limit", "must be non-negative");
  }
}

FeedbackState update_feedback(const FeedbackState& state, const TiltError& error, const FeedbackGains& gains,
                              double dt)
{
  const std::array<const PidGains*, 7> g{&gains.arm_angle,          &gains.hip_angle,  &gains.hip_angle,
                                         &gains.continuous_foot_angle, &gains.support_foot_angle,
                                         &gains.com_shift,          &gains.virtual_slope};
  const std::array<double, 7> e{error.pitch, error.pitch, error.roll, error.pitch,
                                error.pitch, error.roll,  error.pitch};
  FeedbackState next = state;
  for (std::size_t i = 0; i < next.integral.size(); ++i) {
    next.integral[i] = clamp_integral(state.integral[i] + e[i] * dt, g[i]->ki, gains.integral_limit);
  }
  return next;
}

PosePair apply_feedback(const PosePair& poses, const TiltError& error, const FeedbackGains& gains,
                        const FeedbackState& state, const SupportCoefficients& support)
{
  const auto& in = state.integral;
  const double arm = pid(gains.arm_angle, error.pitch, in[0], error.pitch_rate);
  const double hip_pitch = pid(gains.hip_angle, error.pitch, in[1], error.pitch_rate);
  const double hip_roll = pid(gains.hip_angle, error.roll, in[2], error.roll_rate);
  const double foot = pid(gains.continuous_foot_angle, error.pitch, in[3], error.pitch_rate);
  const double support_foot = pid(gains.support_foot_angle, error.pitch, in[4], error.pitch_rate);
  const double shift = pid(gains.com_shift, error.roll, in[5], error.roll_rate);
  const double slope = pid(gains.virtual_slope, error.pitch, in[6], error.pitch_rate);

  PosePair out = poses;
  auto adjust = [&](AbstractPose& p, double support_coef) {
    const double leg_angle = p.leg_angle_sagittal;
    p.arm_angle += arm;
    p.leg_angle_sagittal += hip_pitch;
    p.leg_angle_lateral += hip_roll + shift;
    p.foot_angle += foot + support_coef * support_foot;
    // virtual slope: shorten the leading leg, lengthen the trailing one
    if (slope != 0.0) {
      p.extension = std::clamp(p.extension - slope * leg_angle, 0.0, 1.0);
    }
  };
  adjust(out.left, support.left);
  adjust(out.right, support.right);
  return out;
}

PosePair lean(const PosePair& poses, double cmd_vel, double cmd_acc, const GaitParams& params)
{
  const double offset = params.lean_gain_vel * cmd_vel + params.lean_gain_acc * cmd_acc;
  PosePair out = poses;
  out.left.leg_angle_sagittal += offset;
  out.right.leg_angle_sagittal += offset;
  return out;
}

} // namespace stride::gait
