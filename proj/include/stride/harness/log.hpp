#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace stride::harness {

/// Key order is insertion order, so serialized metrics are reproducible.
using Metrics = nlohmann::ordered_json;

/// One row per tick: numeric columns plus a `;`-joined event list.
class TrajectoryLog
{
public:
  TrajectoryLog() = default;
  explicit TrajectoryLog(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  const std::string& events(std::size_t i) const { return events_[i]; }

  /// Throws InvalidState when the width is wrong or time does not increase.
  void append(std::vector<double> values, std::string events = {});
  /// Adds an event to the latest row.
  void note(const std::string& event);

  std::size_t event_count() const;

  /// CSV with fixed six-decimal numbers.
  void write_csv(std::ostream& out) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> events_;
};

std::string format_fixed(double v);

struct ScenarioResult
{
  TrajectoryLog log;
  Metrics metrics = Metrics::object();
  /// JSON lines, one per message (team play only).
  std::vector<std::string> trace;
  /// Violated invariants or failed trials; empty on success.
  std::vector<std::string> failures;
};

/// Writes <stem>.csv, <stem>.metrics.json and, when present,
/// <stem>.messages.jsonl into `dir`.
void write_result(const ScenarioResult& result, const std::filesystem::path& dir, const std::string& stem);

} // namespace stride::harness
