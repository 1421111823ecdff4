#include "stride/lipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

namespace stride::lipm {

namespace {

bool finite(const LipmState& s)
{
  return std::isfinite(s.offset) && std::isfinite(s.velocity) && std::isfinite(s.time);
}

int sign(double x)
{
  return (x > 0.0) - (x < 0.0);
}

struct Candidate
{
  double time = 0.0;
  double location = 0.0;
  double error = 0.0;
  double cost = 0.0;
  bool exact = false;
};

// Best location for a fixed exchange time. The post-exchange offset is
// u = x_T - s and the energy condition reads u^2 = (v_T^2 - 2 E*) / C^2.
Candidate evaluate(const LipmState& state, const PendulumParams& params, double target_energy, double t,
                   double max_step)
{
  const double c = params.omega();
  const double ch = std::cosh(c * t);
  const double sh = std::sinh(c * t);
  const double x = state.offset * ch + state.velocity / c * sh;
  const double v = state.offset * c * sh + state.velocity * ch;

  const double wanted = (v * v - 2.0 * target_energy) / (c * c);

  // Only placements that leave the CoM moving toward the new pivot (u * v <= 0)
  // are considered; the other root lies on the diverging branch.
  const int dir = sign(v);
  double lo = x - max_step;
  double hi = x + max_step;
  if (dir > 0) {
    hi = std::min(hi, 0.0);
  } else if (dir < 0) {
    lo = std::max(lo, 0.0);
  }

  double u = 0.0;
  double q = 0.0;
  if (lo > hi) {
    // Cannot get the pivot ahead of the CoM: longest step, wrong branch.
    u = dir > 0 ? x - max_step : x + max_step;
    q = u * u;
  } else {
    const double min_sq = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
    const double max_sq = std::max(lo * lo, hi * hi);
    q = std::clamp(wanted, min_sq, max_sq);
    const double mag = std::sqrt(q);
    if (dir != 0) {
      u = std::clamp(-dir * mag, lo, hi);
    } else {
      const bool neg_ok = -mag >= lo && -mag <= hi;
      const bool pos_ok = mag >= lo && mag <= hi;
      if (neg_ok && pos_ok) {
        u = std::abs(x + mag) <= std::abs(x - mag) ? -mag : mag;
      } else {
        u = neg_ok ? -mag : std::clamp(mag, lo, hi);
      }
    }
  }

  Candidate cand;
  cand.time = t;
  cand.location = x - u;
  cand.error = 0.5 * c * c * std::abs(u * u - wanted);
  cand.exact = wanted >= 0.0 && q == wanted;
  return cand;
}

double cost(const LipmState& state, const PendulumParams& params, double exchange_velocity, double nominal,
            double weight, double t)
{
  const LipmState p = predict(state, params, t);
  const double dv = std::abs(p.velocity) - exchange_velocity;
  const double dt = t - nominal;
  return dv * dv + weight * dt * dt;
}

} // namespace

double PendulumParams::omega() const
{
  return std::sqrt(gravity / com_height);
}

void PendulumParams::validate() const
{
  if (!(com_height > 0.0) || !std::isfinite(com_height)) {
    throw ConfigError("com_height", "must be positive");
  }
  if (!(gravity > 0.0) || !std::isfinite(gravity)) {
    throw ConfigError("gravity", "must be positive");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ConfigError("mass", "must be positive");
  }
}

LimitCycle LimitCycle::progressive(double exchange_offset, double step_duration)
{
  LimitCycle cycle{exchange_offset, step_duration, 2.0 * exchange_offset, CycleKind::Progressive};
  cycle.validate();
  return cycle;
}

LimitCycle LimitCycle::alternating(double half_step_width, double step_duration)
{
  LimitCycle cycle{half_step_width, step_duration, 2.0 * half_step_width, CycleKind::Alternating};
  cycle.validate();
  return cycle;
}

void LimitCycle::validate() const
{
  if (!(nominal_step_duration > 0.0) || !std::isfinite(nominal_step_duration)) {
    throw ConfigError("nominal_step_duration", "must be positive");
  }
  if (!std::isfinite(support_exchange_offset)) {
    throw ConfigError("support_exchange_offset", "must be finite");
  }
  if (std::abs(nominal_step_length - 2.0 * support_exchange_offset) > 1e-12 * std::max(1.0, std::abs(nominal_step_length))) {
    throw ConfigError("nominal_step_length", "must equal twice the exchange offset");
  }
}

double LimitCycle::exchange_velocity(const PendulumParams& params) const
{
  const double c = params.omega();
  const double half = 0.5 * c * nominal_step_duration;
  const double d = std::abs(support_exchange_offset);
  if (kind == CycleKind::Progressive) {
    return d == 0.0 ? 0.0 : c * d / std::tanh(half);
  }
  return c * d * std::tanh(half);
}

double LimitCycle::target_energy(const PendulumParams& params) const
{
  return orbital_energy(pre_exchange_state(params), params);
}

LipmState LimitCycle::post_exchange_state(const PendulumParams& params) const
{
  const double v = exchange_velocity(params);
  if (kind == CycleKind::Progressive) {
    return {-support_exchange_offset, v, 0.0};
  }
  return {support_exchange_offset, -v, 0.0};
}

LipmState LimitCycle::pre_exchange_state(const PendulumParams& params) const
{
  return {support_exchange_offset, exchange_velocity(params), nominal_step_duration};
}

void StepLimits::validate() const
{
  if (!(max_step_length > 0.0)) {
    throw ConfigError("max_step_length", "must be positive");
  }
  if (!(min_step_duration >= 0.0) || !(max_step_duration > min_step_duration)) {
    throw ConfigError("min_step_duration", "need 0 <= min_step_duration < max_step_duration");
  }
  if (!(timing_weight >= 0.0)) {
    throw ConfigError("timing_weight", "must be non-negative");
  }
  if (!(energy_band > 0.0)) {
    throw ConfigError("energy_band", "must be positive");
  }
  if (!(scan_resolution > 0.0)) {
    throw ConfigError("scan_resolution", "must be positive");
  }
}

Uncapturable::Uncapturable(const CapturePlan& best_effort)
  : Error("no footstep within limits reaches the limit cycle energy (best error " +
          std::to_string(best_effort.energy_error) + " J/kg)")
  , best_(best_effort)
{
}

LipmState predict(const LipmState& state, const PendulumParams& params, double dt)
{
  if (!finite(state) || !std::isfinite(dt)) {
    throw InvalidState("non-finite pendulum state");
  }
  if (dt < 0.0) {
    throw InvalidState("negative propagation time");
  }
  const double c = params.omega();
  const double ch = std::cosh(c * dt);
  const double sh = std::sinh(c * dt);
  return {state.offset * ch + state.velocity / c * sh, state.offset * c * sh + state.velocity * ch, state.time + dt};
}

double orbital_energy(const LipmState& state, const PendulumParams& params)
{
  const double c = params.omega();
  return 0.5 * state.velocity * state.velocity - 0.5 * c * c * state.offset * state.offset;
}

LipmState step_exchange(const LipmState& state, const Footstep& step)
{
  return {state.offset - step.step_location, state.velocity, state.time};
}

LipmState mirrored(const LipmState& state)
{
  return {-state.offset, -state.velocity, state.time};
}

CapturePlan location_for_timing(const LipmState& state, const PendulumParams& params, double target_energy,
                                double time_to_step, const StepLimits& limits)
{
  if (!finite(state) || !std::isfinite(time_to_step) || time_to_step < 0.0) {
    throw InvalidState("invalid state or step time");
  }
  const Candidate c = evaluate(state, params, target_energy, time_to_step, limits.max_step_length);
  CapturePlan plan;
  plan.step = {time_to_step, c.location};
  plan.energy_error = c.error;
  plan.clamped = !c.exact;
  plan.capturable = c.error <= limits.energy_band;
  return plan;
}

CapturePlan plan_capture_step(const LipmState& state, const PendulumParams& params, const LimitCycle& cycle,
                              const StepLimits& limits, double time_in_step)
{
  if (!finite(state) || !std::isfinite(time_in_step)) {
    throw InvalidState("non-finite pendulum state");
  }
  const double target = cycle.target_energy(params);
  const double v_exchange = cycle.exchange_velocity(params);
  const double lo = std::max(0.0, limits.min_step_duration - time_in_step);
  const double hi = std::max(lo, limits.max_step_duration - time_in_step);
  const double nominal = cycle.nominal_step_duration - time_in_step;
  const double res = limits.scan_resolution;

  const auto n = static_cast<long>(std::floor((hi - lo) / res + 1e-9));
  Candidate best_exact;
  Candidate best_any;
  bool have_exact = false;
  bool have_any = false;
  long exact_index = 0;
  long any_index = 0;

  auto time_at = [&](long k) { return k == n + 1 ? hi : lo + static_cast<double>(k) * res; };
  const long last = (lo + static_cast<double>(n) * res < hi - 1e-12) ? n + 1 : n;

  for (long k = 0; k <= last; ++k) {
    const double t = time_at(k);
    Candidate c = evaluate(state, params, target, t, limits.max_step_length);
    if (c.exact) {
      c.cost = cost(state, params, v_exchange, nominal, limits.timing_weight, t);
      if (!have_exact || c.cost < best_exact.cost ||
          (c.cost == best_exact.cost && std::abs(c.location) < std::abs(best_exact.location))) {
        best_exact = c;
        exact_index = k;
        have_exact = true;
      }
    }
    if (!have_any || c.error < best_any.error ||
        (c.error == best_any.error && std::abs(c.location) < std::abs(best_any.location))) {
      best_any = c;
      any_index = k;
      have_any = true;
    }
  }

  constexpr int bits = std::numeric_limits<double>::digits / 2;
  Candidate chosen;
  if (have_exact) {
    chosen = best_exact;
    const double a = exact_index > 0 ? time_at(exact_index - 1) : lo;
    const double b = exact_index < last ? time_at(exact_index + 1) : hi;
    if (b > a) {
      auto f = [&](double t) { return cost(state, params, v_exchange, nominal, limits.timing_weight, t); };
      const auto [t_ref, j_ref] = boost::math::tools::brent_find_minima(f, a, b, bits);
      if (j_ref < chosen.cost) {
        Candidate c = evaluate(state, params, target, t_ref, limits.max_step_length);
        if (c.exact) {
          c.cost = j_ref;
          chosen = c;
        }
      }
    }
  } else {
    chosen = best_any;
    const double a = any_index > 0 ? time_at(any_index - 1) : lo;
    const double b = any_index < last ? time_at(any_index + 1) : hi;
    if (b > a) {
      auto f = [&](double t) { return evaluate(state, params, target, t, limits.max_step_length).error; };
      const auto [t_ref, e_ref] = boost::math::tools::brent_find_minima(f, a, b, bits);
      if (e_ref < chosen.error) {
        chosen = evaluate(state, params, target, t_ref, limits.max_step_length);
      }
    }
  }

  CapturePlan plan;
  plan.step = {chosen.time, chosen.location};
  plan.energy_error = chosen.error;
  plan.capturable = chosen.error <= limits.energy_band;
  const double eps = 1e-12;
  plan.clamped = !chosen.exact || chosen.time <= lo + eps || chosen.time >= hi - eps ||
                 std::abs(chosen.location) >= limits.max_step_length - eps;
  return plan;
}

Footstep compute_capture_step(const LipmState& state, const PendulumParams& params, const LimitCycle& cycle,
                              const StepLimits& limits, double time_in_step)
{
  const CapturePlan plan = plan_capture_step(state, params, cycle, limits, time_in_step);
  if (!plan.capturable) {
    throw Uncapturable(plan);
  }
  return plan.step;
}

} // namespace stride::lipm
