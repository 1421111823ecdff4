// Command-line runner for harness scenarios.
//
//   stride run <scenario.json> [--seed N] [--out DIR]
//   stride batch <dir> [--out DIR] [--jobs N]
//   stride report <out-dir>
//
// Exit codes: 0 success, 1 scenario failure, 2 configuration error.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "stride/error.hpp"
#include "stride/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace stride;

namespace {

struct Outcome
{
  int code = 0;
  std::string line;
};

Outcome run_file(const fs::path& file, std::optional<std::uint64_t> seed, const fs::path& out)
{
  try {
    auto scenario = harness::load_scenario(file);
    if (seed) {
      scenario.seed = *seed;
    }
    const auto result = harness::run_scenario(scenario);
    harness::write_result(result, out, file.stem().string());
    if (!result.failures.empty()) {
      std::string why;
      for (const auto& f : result.failures) {
        why += (why.empty() ? "" : "; ") + f;
      }
      return {1, file.stem().string() + ": FAIL (" + why + ")"};
    }
    return {0, file.stem().string() + ": ok"};
  } catch (const ConfigError& e) {
    return {2, file.string() + ": config error: " + e.what()};
  } catch (const Error& e) {
    return {1, file.stem().string() + ": FAIL (" + e.what() + ")"};
  }
}

std::vector<fs::path> files_with(const fs::path& dir, const std::string& suffix)
{
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int batch(const fs::path& dir, const fs::path& out, unsigned jobs)
{
  const auto files = files_with(dir, ".json");
  std::vector<Outcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::max(1u, jobs); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < files.size(); i = next++) {
        outcomes[i] = run_file(files[i], std::nullopt, out);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  int code = 0;
  for (const auto& o : outcomes) {
    std::cout << o.line << '\n';
    code = std::max(code, o.code);
  }
  return code;
}

std::string csv_cell(const harness::Metrics& v)
{
  if (v.is_number_float()) {
    return harness::format_fixed(v.get<double>());
  }
  if (v.is_string()) {
    return v.get<std::string>();
  }
  return v.dump();
}

int report(const fs::path& dir)
{
  harness::Metrics summary = harness::Metrics::object();
  std::vector<std::string> columns;
  std::set<std::string> seen;
  for (const auto& file : files_with(dir, ".metrics.json")) {
    std::ifstream in(file);
    const auto m = harness::Metrics::parse(in);
    std::string stem = file.filename().string();
    stem.resize(stem.size() - std::string(".metrics.json").size());
    summary[stem] = m;
    for (const auto& [key, value] : m.items()) {
      if (value.is_primitive() && seen.insert(key).second) {
        columns.push_back(key);
      }
    }
  }
  {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << '\n';
  }
  std::ofstream csv(dir / "summary.csv", std::ios::binary);
  csv << "run";
  for (const auto& c : columns) {
    csv << ',' << c;
  }
  csv << '\n';
  for (const auto& [stem, m] : summary.items()) {
    csv << stem;
    for (const auto& c : columns) {
      csv << ',' << (m.contains(c) ? csv_cell(m[c]) : "");
    }
    csv << '\n';
  }
  std::cout << "wrote " << (dir / "summary.json").string() << " and " << (dir / "summary.csv").string() << " ("
            << summary.size() << " runs)\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Scenario runner for the stride control stack"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Run one scenario and write its log and metrics");
  run->add_option("scenario", scenario_file, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory");

  std::string batch_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* bat = app.add_subcommand("batch", "Run every scenario in a directory");
  bat->add_option("dir", batch_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  bat->add_option("--out", out_dir, "Output directory");
  bat->add_option("--jobs", jobs, "Parallel scenarios");

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Aggregate metrics of an output directory");
  rep->add_option("out-dir", report_dir, "Directory written by run or batch")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) {
    const auto o = run_file(scenario_file, seed, out_dir);
    (o.code == 2 ? std::cerr : std::cout) << o.line << '\n';
    return o.code;
  }
  if (*bat) {
    return batch(batch_dir, out_dir, jobs);
  }
  return report(report_dir);
}
