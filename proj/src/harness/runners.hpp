#pragma once

#include <string>
#include <vector>

#include "stride/harness/log.hpp"
#include "stride/harness/scenario.hpp"
#include "stride/harness/walker.hpp"

namespace stride::harness {

std::vector<std::string> walker_columns();
std::vector<double> walker_row(double t, const Walker& walker, const gait::GaitParams& gait);

ScenarioResult run_walk(const Scenario& s);
ScenarioResult run_push(const Scenario& s);
ScenarioResult run_moving_ball(const Scenario& s);
ScenarioResult run_high_jump(const Scenario& s);
ScenarioResult run_team_play(const Scenario& s);

} // namespace stride::harness
