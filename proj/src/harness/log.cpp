#include "stride/harness/log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "stride/error.hpp"

namespace stride::harness {

TrajectoryLog::TrajectoryLog(std::vector<std::string> columns)
  : columns_(std::move(columns))
{
}

void TrajectoryLog::append(std::vector<double> values, std::string events)
{
  if (values.size() != columns_.size()) {
    throw InvalidState("log row width does not match the columns");
  }
  if (!rows_.empty() && !(values.front() > rows_.back().front())) {
    throw InvalidState("log time must increase strictly");
  }
  rows_.push_back(std::move(values));
  events_.push_back(std::move(events));
}

void TrajectoryLog::note(const std::string& event)
{
  if (events_.empty()) {
    throw InvalidState("no log row to annotate");
  }
  std::string& e = events_.back();
  e += e.empty() ? event : ";" + event;
}

std::size_t TrajectoryLog::event_count() const
{
  std::size_t n = 0;
  for (const auto& e : events_) {
    if (!e.empty()) {
      n += 1 + static_cast<std::size_t>(std::count(e.begin(), e.end(), ';'));
    }
  }
  return n;
}

std::string format_fixed(double v)
{
  char buf[64];
  // Avoid "-0.000000" so equal logs compare equal byte for byte.
  if (std::abs(v) < 5e-7) {
    v = 0.0;
  }
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void TrajectoryLog::write_csv(std::ostream& out) const
{
  for (const auto& c : columns_) {
    out << c << ',';
  }
  out << "events\n";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (double v : rows_[i]) {
      out << format_fixed(v) << ',';
    }
    out << events_[i] << '\n';
  }
}

void write_result(const ScenarioResult& result, const std::filesystem::path& dir, const std::string& stem)
{
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
    result.log.write_csv(csv);
  }
  {
    std::ofstream metrics(dir / (stem + ".metrics.json"), std::ios::binary);
    metrics << result.metrics.dump(2) << '\n';
  }
  if (!result.trace.empty()) {
    std::ofstream trace(dir / (stem + ".messages.jsonl"), std::ios::binary);
    for (const auto& line : result.trace) {
      trace << line << '\n';
    }
  }
}

} // namespace stride::harness
