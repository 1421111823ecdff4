#pragma once

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "stride/error.hpp"
#include "stride/kick.hpp"

namespace stride::ball {

using Vec2 = Eigen::Vector2d;

/// Ball position in the robot's egocentric frame (x forward, y left).
struct BallDetection
{
  double t = 0.0;
  Vec2 position = Vec2::Zero();
};

struct TrackParams
{
  std::size_t capacity = 6;
  double max_range = 10.0;
  /// Largest accepted displacement between consecutive accepted samples.
  double max_jump = 3.0;

  void validate() const;
};

/// Sliding buffer of the most recent accepted detections.
struct BallTrack
{
  TrackParams params;
  std::deque<BallDetection> samples;
  /// Timestamp of the last detection offered, accepted or not.
  std::optional<double> last_time;
  std::size_t rejected = 0;
};

/// Appends a detection, dropping the oldest sample once the buffer is full.
/// Out-of-range detections and jumps beyond `max_jump` are counted and
/// ignored. Throws NonMonotonicTime unless t increases strictly.
BallTrack update_track(BallTrack track, const BallDetection& detection);

/// Gaussian prior on the acceleration of a rolling ball: magnitude
/// `deceleration`, directed against the motion.
struct AccelerationPrior
{
  double deceleration = 0.3;
  double sigma_accel = 0.1;
  double sigma_measurement = 0.02;
};

/// Quadratic motion model about `t_ref` (the newest sample):
/// p(t) = p + v (t - t_ref) + a (t - t_ref)^2 / 2.
struct BallEstimate
{
  Vec2 p = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  Vec2 a = Vec2::Zero();
  double t_ref = 0.0;
  /// RMS distance between the samples and the fitted trajectory.
  double residual = 0.0;

  Vec2 position_at(double t) const;
};

/// Least-squares quadratic fit over the buffer. Walking back from the newest
/// sample, detections closer than epsilon / 2 to the previously used one are
/// skipped. Without a prior the fit is plain least squares and reproduces
/// noiseless quadratics exactly. Throws InsufficientData below 3 samples.
BallEstimate estimate(const BallTrack& track, double epsilon = 0.1,
                      const std::optional<AccelerationPrior>& prior = std::nullopt);

struct InterceptPlan
{
  double arrival_time = 0.0;
  /// Time to launch a motion whose effect lags its start by `lead`.
  double trigger_time = 0.0;
  bool feasible = false;
};

/// First time the ball crosses the line `axis . p = foot_line_distance`.
/// A decelerating ball is assumed to stop rather than roll back, so a
/// crossing after the stop is not a crossing.
InterceptPlan predict_arrival(const BallEstimate& est, double foot_line_distance, double lead = 0.0,
                              const Vec2& axis = Vec2::UnitX());

/// Schedules an in-walk kick whose apex meets the predicted arrival.
/// Throws InvalidState for an infeasible plan.
kick::ScheduledKick plan_trigger(const InterceptPlan& plan, const kick::KickWindow& window, double duration,
                                 double amplitude, double width);

/// Reads a detection log with header `t,x,y`.
std::vector<BallDetection> read_detections_csv(std::istream& in);

} // namespace stride::ball
