#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stride/gait.hpp"

using namespace stride::gait;
constexpr double pi = std::numbers::pi;

namespace {

double max_channel_diff(const AbstractPose& a, const AbstractPose& b)
{
  return std::max({std::abs(a.leg_angle_sagittal - b.leg_angle_sagittal),
                   std::abs(a.leg_angle_lateral - b.leg_angle_lateral), std::abs(a.extension - b.extension),
                   std::abs(a.foot_angle - b.foot_angle), std::abs(a.arm_angle - b.arm_angle)});
}

} // namespace

TEST_CASE("phase advance")
{
  GaitParams p;
  p.frequency = 1.0;
  CHECK(advance_phase({0.0}, p, 0.5).mu == doctest::Approx(pi));
  CHECK(advance_phase({1.234}, p, 0.0).mu == 1.234);

  p.frequency = 2.0;
  const double expected = 3.0 + 0.4 * pi - 2.0 * pi;
  const double mu = advance_phase({3.0}, p, 0.1).mu;
  CHECK(mu == doctest::Approx(expected).epsilon(1e-12));
  CHECK(mu > -pi);
  CHECK(mu <= pi);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> any(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const double w = wrap_angle(any(rng));
    CHECK((w > -pi && w <= pi));
  }
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
}

TEST_CASE("cpg: zero amplitude gait is constant")
{
  GaitParams p;
  p.double_support_ratio = 0.0;
  p.swing_amplitude = 0.0;
  p.step_height = 0.0;
  const auto ref = cpg_waveform({0.0}, p);
  for (double mu = -pi + 0.01; mu <= pi; mu += 0.01) {
    const auto w = cpg_waveform({mu}, p);
    CHECK(max_channel_diff(w.left, ref.left) == 0.0);
    CHECK(max_channel_diff(w.right, ref.right) == 0.0);
    CHECK(w.left.extension == p.nominal_extension);
  }
}

TEST_CASE("cpg: leg symmetry, continuity, swing leg shortening")
{
  GaitParams p;
  for (double mu = -pi + 1e-3; mu <= pi; mu += 1e-3) {
    const auto a = cpg_waveform({mu}, p);
    const auto b = cpg_waveform({wrap_angle(mu + pi)}, p);
    CHECK(max_channel_diff(a.left, b.right) < 1e-12);
  }

  double worst = 0.0;
  auto prev = cpg_waveform({-pi + 1e-12}, p);
  for (long k = 1; k <= static_cast<long>(2.0 * pi / 1e-4); ++k) {
    const auto cur = cpg_waveform({wrap_angle(-pi + 1e-12 + static_cast<double>(k) * 1e-4)}, p);
    worst = std::max({worst, max_channel_diff(prev.left, cur.left), max_channel_diff(prev.right, cur.right)});
    prev = cur;
  }
  CHECK(worst <= 1e-3);

  for (double mu : {pi / 2, -pi / 2}) {
    const auto w = cpg_waveform({mu}, p);
    const int shortened = (w.left.extension < p.nominal_extension) + (w.right.extension < p.nominal_extension);
    CHECK(shortened == 1);
  }
  CHECK(cpg_waveform({pi / 2}, p).left.extension < p.nominal_extension);
  CHECK(cpg_waveform({-pi / 2}, p).right.extension < p.nominal_extension);
}

TEST_CASE("support coefficients")
{
  GaitParams p;
  for (double mu = -pi + 1e-3; mu <= pi; mu += 1e-3) {
    const auto s = support_coefficients({mu}, p);
    CHECK(s.left + s.right == doctest::Approx(1.0));
    CHECK(s.left >= 0.0);
    CHECK(s.left <= 1.0);
  }
  CHECK(support_coefficients({pi / 2}, p).left == 0.0);
  CHECK(support_coefficients({pi / 2}, p).right == 1.0);

  const auto iv = swing_interval({0.0}, Leg::Left, p);
  const double ds_time = p.double_support_ratio * 0.5 / p.frequency;
  CHECK(iv.start == doctest::Approx(ds_time));
  CHECK(iv.end - iv.start == doctest::Approx((1.0 - p.double_support_ratio) * p.step_duration()));
  const auto cur = swing_interval({pi / 2}, Leg::Left, p);
  CHECK(cur.start < 0.0);
  CHECK(cur.end > 0.0);
}

TEST_CASE("abstract to cartesian")
{
  const double len = 0.8;
  AbstractPose pose;
  auto foot = abstract_to_cartesian(pose, len);
  CHECK(foot.position.x() == doctest::Approx(0.0));
  CHECK(foot.position.y() == doctest::Approx(0.0));
  CHECK(foot.position.z() == doctest::Approx(-len));

  pose.leg_angle_sagittal = 0.3;
  foot = abstract_to_cartesian(pose, len);
  CHECK(foot.position.x() == doctest::Approx(len * std::sin(0.3)));
  CHECK(foot.position.z() == doctest::Approx(-len * std::cos(0.3)));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(-1.2, 1.2);
  std::uniform_real_distribution<double> ext(0.05, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const AbstractPose in{ang(rng), ang(rng), ext(rng), ang(rng), 0.0};
    const auto out = cartesian_to_abstract(abstract_to_cartesian(in, len), len);
    CHECK(std::abs(out.leg_angle_sagittal - in.leg_angle_sagittal) <= 1e-9);
    CHECK(std::abs(out.leg_angle_lateral - in.leg_angle_lateral) <= 1e-9);
    CHECK(std::abs(out.extension - in.extension) <= 1e-9);
    CHECK(std::abs(out.foot_angle - in.foot_angle) <= 1e-9);
  }
}

TEST_CASE("inverse kinematics")
{
  const LegLinks links{0.42, 0.38};
  FootPose straight;
  straight.position = {0.0, 0.0, -(links.thigh + links.shank)};
  const auto q = cartesian_to_joint(straight, links);
  CHECK(q.knee == doctest::Approx(0.0));
  CHECK(q.hip_pitch == doctest::Approx(0.0));
  CHECK(q.ankle_pitch == doctest::Approx(0.0));

  FootPose far = straight;
  far.position.z() -= 1e-6;
  CHECK_THROWS_AS(cartesian_to_joint(far, links), stride::OutOfWorkspace);

  FootPose bent;
  bent.position = {0.05, 0.02, -0.7};
  JointLimits tight;
  tight.upper.knee = 0.01;
  CHECK_THROWS_AS(cartesian_to_joint(bent, links, tight), stride::OutOfWorkspace);
  CHECK_NOTHROW(cartesian_to_joint(bent, links, JointLimits{}));
}

TEST_CASE("inverse kinematics: forward kinematics reproduces random targets")
{
  const LegLinks links{0.42, 0.38};
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-0.6, 0.6);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double reach = 0.05 + (links.thigh + links.shank - 0.05) * unit(rng);
    const double theta = 0.9 * pi * unit(rng);
    const double az = 2.0 * pi * unit(rng);
    FootPose target;
    target.position = reach * Eigen::Vector3d(std::sin(theta) * std::cos(az), std::sin(theta) * std::sin(az),
                                              -std::cos(theta));
    target.roll = ang(rng);
    target.pitch = ang(rng);
    target.yaw = ang(rng);
    const auto fk = joint_to_cartesian(cartesian_to_joint(target, links), links);
    worst = std::max(worst, (fk.position - target.position).norm());
    worst = std::max(worst, (fk.rotation() - target.rotation()).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("feedback")
{
  GaitParams params;
  const auto base = cpg_waveform({0.7}, params);
  FeedbackGains gains;
  for (PidGains* g : {&gains.arm_angle, &gains.hip_angle, &gains.continuous_foot_angle, &gains.support_foot_angle,
                      &gains.com_shift, &gains.virtual_slope}) {
    *g = {0.3, 0.0, 0.05};
  }
  const auto same = apply_feedback(base, {}, gains);
  CHECK(max_channel_diff(same.left, base.left) == 0.0);
  CHECK(max_channel_diff(same.right, base.right) == 0.0);

  const TiltError err{0.02, -0.01, 0.0, 0.0};
  FeedbackGains doubled = gains;
  for (PidGains* g : {&doubled.arm_angle, &doubled.hip_angle, &doubled.continuous_foot_angle,
                      &doubled.support_foot_angle, &doubled.com_shift, &doubled.virtual_slope}) {
    g->kp *= 2.0;
  }
  const auto one = apply_feedback(base, err, gains);
  const auto two = apply_feedback(base, err, doubled);
  auto offsets = [&](const PosePair& p) {
    return std::array<double, 5>{p.left.arm_angle - base.left.arm_angle,
                                 p.left.leg_angle_sagittal - base.left.leg_angle_sagittal,
                                 p.left.leg_angle_lateral - base.left.leg_angle_lateral,
                                 p.left.foot_angle - base.left.foot_angle, p.left.extension - base.left.extension};
  };
  const auto o1 = offsets(one);
  const auto o2 = offsets(two);
  for (std::size_t i = 0; i < o1.size(); ++i) {
    CHECK(o2[i] == doctest::Approx(2.0 * o1[i]).epsilon(1e-12));
  }

  FeedbackGains foot_only;
  foot_only.continuous_foot_angle.kp = 0.8;
  const auto f = apply_feedback(base, {0.05, 0.0, 0.0, 0.0}, foot_only);
  CHECK(f.left.foot_angle - base.left.foot_angle == doctest::Approx(0.8 * 0.05));
  CHECK(f.right.foot_angle - base.right.foot_angle == doctest::Approx(0.8 * 0.05));
  CHECK(f.left.leg_angle_sagittal == base.left.leg_angle_sagittal);
}

TEST_CASE("feedback integral anti-windup")
{
  FeedbackGains gains;
  gains.arm_angle = {0.0, 2.0, 0.0};
  FeedbackState state;
  for (int i = 0; i < 1000; ++i) {
    state = update_feedback(state, {0.5, 0.0, 0.0, 0.0}, gains, 0.01);
  }
  const auto out = apply_feedback({}, {}, gains, state);
  CHECK(out.left.arm_angle == doctest::Approx(gains.integral_limit));
}

TEST_CASE("lean")
{
  GaitParams p;
  const auto base = cpg_waveform({0.3}, p);
  const auto none = lean(base, 0.0, 0.0, p);
  CHECK(none.left.leg_angle_sagittal == base.left.leg_angle_sagittal);
  const auto vel = lean(base, 0.4, 0.0, p);
  CHECK(vel.left.leg_angle_sagittal - base.left.leg_angle_sagittal == doctest::Approx(p.lean_gain_vel * 0.4));
  const auto acc = lean(base, 0.0, -1.5, p);
  const auto both = lean(base, 0.4, -1.5, p);
  CHECK(both.right.leg_angle_sagittal - base.right.leg_angle_sagittal ==
        doctest::Approx((vel.right.leg_angle_sagittal - base.right.leg_angle_sagittal) +
                        (acc.right.leg_angle_sagittal - base.right.leg_angle_sagittal)));
}
