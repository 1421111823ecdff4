#include "stride/ball.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/QR>

namespace stride::ball {

namespace {

// Roots of a*t^2 + b*t + c = 0 in ascending order; empty when none are real.
std::vector<double> quadratic_roots(double a, double b, double c)
{
  if (a == 0.0) {
    if (b == 0.0) {
      return {};
    }
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    return {};
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  if (r1 > r2) {
    std::swap(r1, r2);
  }
  return {r1, r2};
}

std::vector<BallDetection> select_samples(const BallTrack& track, double epsilon)
{
  std::vector<BallDetection> out;
  for (auto it = track.samples.rbegin(); it != track.samples.rend(); ++it) {
    if (out.empty() || out.back().t - it->t >= 0.5 * epsilon) {
      out.push_back(*it);
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

} // namespace

void TrackParams::validate() const
{
  if (capacity < 3) {
    throw ConfigError("ball.capacity", "must be at least 3");
  }
  if (!(max_range > 0.0)) {
    throw ConfigError("ball.max_range", "must be positive");
  }
  if (!(max_jump > 0.0)) {
    throw ConfigError("ball.max_jump", "must be positive");
  }
}

BallTrack update_track(BallTrack track, const BallDetection& detection)
{
  if (!std::isfinite(detection.t) || !detection.position.allFinite()) {
    throw InvalidState("non-finite ball detection");
  }
  if (track.last_time && detection.t <= *track.last_time) {
    throw NonMonotonicTime("ball detection timestamps must increase strictly");
  }
  track.last_time = detection.t;

  const bool out_of_range = detection.position.norm() > track.params.max_range;
  const bool jump =
      !track.samples.empty() && (detection.position - track.samples.back().position).norm() > track.params.max_jump;
  if (out_of_range || jump) {
    ++track.rejected;
    return track;
  }
  track.samples.push_back(detection);
  while (track.samples.size() > track.params.capacity) {
    track.samples.pop_front();
  }
  return track;
}

Vec2 BallEstimate::position_at(double t) const
{
  const double tau = t - t_ref;
  return p + v * tau + 0.5 * a * tau * tau;
}

BallEstimate estimate(const BallTrack& track, double epsilon, const std::optional<AccelerationPrior>& prior)
{
  const auto samples = select_samples(track, epsilon);
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 3) {
    throw InsufficientData("need at least 3 ball detections");
  }

  BallEstimate est;
  est.t_ref = samples.back().t;
  const Eigen::Index rows = prior ? n + 1 : n;
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(rows, 3);
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(rows, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tau = samples[static_cast<std::size_t>(i)].t - est.t_ref;
    design.row(i) << 1.0, tau, 0.5 * tau * tau;
    target.row(i) = samples[static_cast<std::size_t>(i)].position.transpose();
  }

  if (prior) {
    // Direction of motion from a straight-line fit.
    const Eigen::MatrixXd line = design.topLeftCorner(n, 2).colPivHouseholderQr().solve(target.topRows(n));
    const Vec2 vel = line.row(1).transpose();
    const Vec2 mean_accel = vel.norm() > 0.0 ? Vec2(-prior->deceleration * vel.normalized()) : Vec2::Zero();
    const double weight = prior->sigma_measurement / prior->sigma_accel;
    design(n, 2) = weight;
    target.row(n) = weight * mean_accel.transpose();
  }

  const Eigen::MatrixXd coef = design.colPivHouseholderQr().solve(target);
  est.p = coef.row(0).transpose();
  est.v = coef.row(1).transpose();
  est.a = coef.row(2).transpose();

  double sq = 0.0;
  for (const auto& s : samples) {
    sq += (s.position - est.position_at(s.t)).squaredNorm();
  }
  est.residual = std::sqrt(sq / static_cast<double>(n));
  return est;
}

InterceptPlan predict_arrival(const BallEstimate& est, double foot_line_distance, double lead, const Vec2& axis)
{
  const double p = est.p.dot(axis);
  const double v = est.v.dot(axis);
  const double a = est.a.dot(axis);

  // Rolling friction stops the ball; it never reverses.
  double stop = std::numeric_limits<double>::infinity();
  if (v * a < 0.0) {
    stop = -v / a;
  }

  InterceptPlan plan;
  for (double tau : quadratic_roots(0.5 * a, v, p - foot_line_distance)) {
    if (tau > 0.0 && tau <= stop) {
      plan.arrival_time = est.t_ref + tau;
      plan.trigger_time = plan.arrival_time - lead;
      plan.feasible = true;
      break;
    }
  }
  return plan;
}

kick::ScheduledKick plan_trigger(const InterceptPlan& plan, const kick::KickWindow& window, double duration,
                                 double amplitude, double width)
{
  if (!plan.feasible) {
    throw InvalidState("cannot trigger a kick for an infeasible intercept");
  }
  return kick::schedule_kick(window, duration, amplitude, width, plan.arrival_time);
}

std::vector<BallDetection> read_detections_csv(std::istream& in)
{
  std::vector<BallDetection> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    if (line_no == 1 && line.rfind("t", 0) == 0) {
      continue;
    }
    std::istringstream fields(line);
    std::string cell;
    double values[3];
    int count = 0;
    while (count < 3 && std::getline(fields, cell, ',')) {
      try {
        std::size_t used = 0;
        values[count] = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line_no), "malformed number '" + cell + "'");
      }
      ++count;
    }
    if (count != 3) {
      throw ConfigError("line " + std::to_string(line_no), "expected columns t,x,y");
    }
    out.push_back({values[0], Vec2(values[1], values[2])});
  }
  return out;
}

} // namespace stride::ball
