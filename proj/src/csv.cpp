#include "amcoedge/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace amcoedge {

std::size_t CsvTable::column(std::string_view name) const
{
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("csv: no column named '" + std::string(name) + "'");
}

std::string format_number(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_number failed");
  return {buf, res.ptr};
}

namespace {

void write_field(std::ostream& out, const std::string& f)
{
  if (f.find_first_of(",\"\n\r") == std::string::npos) {
    out << f;
    return;
  }
  out << '"';
  for (char c : f) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row)
{
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    write_field(out, row[i]);
  }
  out << '\n';
}

double parse_double(const std::string& s)
{
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s)
{
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::invalid_argument("csv: bad integer '" + s + "'");
  return v;
}

std::vector<std::string> run_prefix(const RunConfig& config, int episode)
{
  return {to_string(config.policy), to_string(config.effective_alloc()), std::to_string(config.seed),
          std::to_string(episode)};
}

}  // namespace

std::string to_csv_string(const CsvTable& table)
{
  std::ostringstream out;
  write_row(out, table.header);
  for (const auto& r : table.rows) write_row(out, r);
  return out.str();
}

CsvTable parse_csv(std::string_view text)
{
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  for (const auto& r : table.rows)
    if (r.size() != table.header.size()) throw std::invalid_argument("csv: row width does not match header");
  return table;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << to_csv_string(table);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

CsvTable metrics_table(const std::vector<MetricsRecord>& records, const RunConfig& config)
{
  CsvTable t;
  t.header = {"policy",          "alloc",          "seed",          "episode",
              "mean_make_span",  "failure_rate",   "mean_waiting",  "mean_transmission",
              "mean_computing",  "tasks_arrived",  "tasks_dropped"};
  for (const auto& r : records) {
    auto row = run_prefix(config, r.episode);
    for (double v : {r.mean_make_span, r.failure_rate, r.mean_waiting, r.mean_transmission, r.mean_computing})
      row.push_back(format_number(v));
    row.push_back(std::to_string(r.tasks_arrived));
    row.push_back(std::to_string(r.tasks_dropped));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<MetricsRecord> parse_metrics_table(const CsvTable& table)
{
  const std::size_t episode = table.column("episode"), ms = table.column("mean_make_span"),
                    fr = table.column("failure_rate"), wait = table.column("mean_waiting"),
                    tx = table.column("mean_transmission"), comp = table.column("mean_computing"),
                    arrived = table.column("tasks_arrived"), dropped = table.column("tasks_dropped");
  std::vector<MetricsRecord> out;
  for (const auto& row : table.rows) {
    MetricsRecord r;
    r.episode = static_cast<int>(parse_int(row[episode]));
    r.mean_make_span = parse_double(row[ms]);
    r.failure_rate = parse_double(row[fr]);
    r.mean_waiting = parse_double(row[wait]);
    r.mean_transmission = parse_double(row[tx]);
    r.mean_computing = parse_double(row[comp]);
    r.tasks_arrived = parse_int(row[arrived]);
    r.tasks_dropped = parse_int(row[dropped]);
    out.push_back(r);
  }
  return out;
}

CsvTable timing_table(const std::vector<MetricsRecord>& records, const RunConfig& config)
{
  CsvTable t;
  t.header = {"policy", "alloc", "seed", "episode", "decision_ms"};
  for (const auto& r : records) {
    auto row = run_prefix(config, r.episode);
    row.push_back(format_number(r.decision_ms));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace amcoedge
