#include <algorithm>
#include <cmath>

#include "stride/harness/experiments.hpp"

namespace stride::harness {

double pendulum_impact_speed(double retraction, double pendulum_length, double gravity)
{
  const double theta = std::asin(std::min(1.0, retraction / pendulum_length));
  const double drop = pendulum_length * (1.0 - std::cos(theta));
  return std::sqrt(2.0 * gravity * drop);
}

double momentum_transfer(double impact_speed, double pendulum_mass, double transfer, double robot_mass)
{
  return transfer * pendulum_mass * impact_speed / robot_mass;
}

double pendulum_push(double retraction, double pendulum_mass, double transfer, double robot_mass,
                     double pendulum_length, double gravity)
{
  return momentum_transfer(pendulum_impact_speed(retraction, pendulum_length, gravity), pendulum_mass, transfer,
                           robot_mass);
}

double flight_time(double takeoff_velocity, double gravity)
{
  return 2.0 * takeoff_velocity / gravity;
}

double takeoff_velocity(double flight_time, double gravity)
{
  return 0.5 * gravity * flight_time;
}

} // namespace stride::harness
