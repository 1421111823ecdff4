#include <doctest.h>

#include <cmath>
#include <random>

#include "stride/kick.hpp"

using namespace stride::kick;

TEST_CASE("allowed window")
{
  CHECK(allowed_window({0.0, 1.0, 0.1, 0.1}) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(allowed_window({2.0, 3.5, 0.25, 0.25}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(allowed_window({0.0, 0.2, 0.1, 0.1}), stride::WindowClosed);
  CHECK_THROWS_AS(allowed_window({0.0, 0.1, 0.1, 0.1}), stride::WindowClosed);
  CHECK_THROWS_AS(allowed_window({1.0, 0.5, 0.0, 0.0}), stride::ConfigError);
}

TEST_CASE("delay and start time")
{
  const KickWindow w{0.0, 1.0, 0.1, 0.1};
  CHECK(delay(w, {0.4, 0.0, 0.35, 0.25}) == 0.0);
  CHECK(delay(w, {0.4, 1.0, 0.35, 0.25}) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(delay(w, {0.4, 0.5, 0.35, 0.25}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(delay(w, {0.8, 0.5, 0.35, 0.25}), stride::MotionTooLong);

  CHECK(start_time(w, {0.4, 0.5, 0.35, 0.25}) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(start_time(w, {0.4, 0.0, 0.35, 0.25}) == doctest::Approx(w.start + w.lead_guard));
  const KickMotion late{0.4, 1.0, 0.35, 0.25};
  CHECK(start_time(w, late) + late.duration == doctest::Approx(w.end - w.trail_guard).epsilon(1e-12));
}

TEST_CASE("kick phase")
{
  const KickWindow w{0.5, 1.7, 0.05, 0.15};
  const KickMotion m{0.35, 0.3, 0.35, 0.25};
  const double tk = start_time(w, m);
  CHECK(kick_phase(tk, w, m) == doctest::Approx(-1.0));
  CHECK(kick_phase(tk + m.duration, w, m) == doctest::Approx(1.0));
  CHECK(kick_phase(tk + 0.5 * m.duration, w, m) == doctest::Approx(0.0));
}

TEST_CASE("augmented leg angle")
{
  const KickWindow w{0.0, 1.0, 0.1, 0.1};
  const KickMotion m{0.4, 0.5, 0.35, 0.25};
  const double tk = start_time(w, m);
  const double phi = 0.12;
  CHECK(augment_leg_angle(phi, tk - 1e-9, w, m) == phi);
  CHECK(augment_leg_angle(phi, tk + m.duration + 1e-9, w, m) == phi);
  CHECK(augment_leg_angle(phi, tk + 0.5 * m.duration, w, m) == doctest::Approx(phi - m.amplitude));
  CHECK(augment_leg_angle(phi, tk, w, m) == doctest::Approx(phi - std::exp(-8.0) * m.amplitude).epsilon(1e-12));
  CHECK(std::exp(-8.0) == doctest::Approx(3.35e-4).epsilon(1e-3));
}

TEST_CASE("schedule kick")
{
  const KickWindow w{0.0, 1.0, 0.1, 0.1};
  auto k = schedule_kick(w, 0.4, 0.35, 0.25, 0.5);
  CHECK(k.motion.timing == doctest::Approx(0.5));
  CHECK_FALSE(k.apex_clamped);
  CHECK(start_time(w, k.motion) + 0.2 == doctest::Approx(0.5));

  CHECK(schedule_kick(w, 0.4, 0.35, 0.25, 0.1 + 0.2).motion.timing == doctest::Approx(0.0));
  CHECK(schedule_kick(w, 0.4, 0.35, 0.25, 0.9 - 0.2).motion.timing == doctest::Approx(1.0));

  k = schedule_kick(w, 0.4, 0.35, 0.25, 0.05);
  CHECK(k.motion.timing == 0.0);
  CHECK(k.apex_clamped);
  k = schedule_kick(w, 0.4, 0.35, 0.25, 2.0);
  CHECK(k.motion.timing == 1.0);
  CHECK(k.apex_clamped);

  CHECK_THROWS_AS(schedule_kick(w, 0.9, 0.35, 0.25, 0.5), stride::MotionTooLong);
  CHECK_THROWS_AS(schedule_kick(w, 0.4, 0.35, 0.6, 0.5), stride::ConfigError);
}

TEST_CASE("properties: window safety, monotonicity, border smoothness")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    KickWindow w;
    w.start = 10.0 * unit(rng);
    w.lead_guard = 0.2 * unit(rng);
    w.trail_guard = 0.2 * unit(rng);
    w.end = w.start + w.lead_guard + w.trail_guard + 0.05 + unit(rng);
    const double dt = allowed_window(w);
    const double duration = dt * (0.01 + 0.98 * unit(rng));
    const double width = 0.05 + 0.25 * unit(rng);
    const KickMotion a{duration, unit(rng), 0.35, width};
    KickMotion b = a;
    b.timing = std::min(1.0, a.timing + 0.1 * unit(rng));

    const double tk = start_time(w, a);
    CHECK(tk >= w.start + w.lead_guard - 1e-12);
    CHECK(tk + duration <= w.end - w.trail_guard + 1e-12);
    CHECK(start_time(w, b) >= tk);

    const double slope = (kick_phase(tk + 0.3, w, a) - kick_phase(tk + 0.1, w, a)) / 0.2;
    CHECK(slope == doctest::Approx(2.0 / duration).epsilon(1e-9));

    const double border = a.amplitude * std::exp(-0.5 / (width * width));
    CHECK(std::abs(augment_leg_angle(0.0, tk, w, a)) == doctest::Approx(border).epsilon(1e-9));
    CHECK(std::abs(augment_leg_angle(0.0, tk + duration, w, a)) == doctest::Approx(border).epsilon(1e-6));
    if (width <= 0.3) {
      CHECK(border <= 4e-3 * a.amplitude);
    }
  }
}
