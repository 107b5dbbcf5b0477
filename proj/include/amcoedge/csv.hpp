#ifndef AMCOEDGE_CSV_HPP_
#define AMCOEDGE_CSV_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "amcoedge/config.hpp"
#include "amcoedge/simulator.hpp"

namespace amcoedge {

/// Version of the column layouts produced below; bumped on any change.
inline constexpr int kCsvSchemaVersion = 1;

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name; throws if absent.
  std::size_t column(std::string_view name) const;
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Comma separated, '\n' terminated; fields with ',', '"' or newlines quoted.
std::string to_csv_string(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Throws std::runtime_error naming the path on I/O failure.
void write_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

/// policy, alloc, seed, episode, mean_make_span, failure_rate, mean_waiting,
/// mean_transmission, mean_computing, tasks_arrived, tasks_dropped
CsvTable metrics_table(const std::vector<MetricsRecord>& records, const RunConfig& config);
std::vector<MetricsRecord> parse_metrics_table(const CsvTable& table);

/// policy, alloc, seed, episode, decision_ms
CsvTable timing_table(const std::vector<MetricsRecord>& records, const RunConfig& config);

}  // namespace amcoedge

#endif  // AMCOEDGE_CSV_HPP_
