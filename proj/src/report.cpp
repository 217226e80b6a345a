#include "emon/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "emon/errors.hpp"

namespace emon {

std::string iso8601_utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return buf;
}

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_csv: cannot open " + path);
  out << "# generated_at=" << iso8601_utc_now() << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ConfigError("write_csv: row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << row[c];
    out << "\n";
  }
}

void write_json_report(Json payload, const Json& config,
                       const std::string& path) {
  payload["schema_version"] = kSchemaVersion;
  payload["generated_at"] = iso8601_utc_now();
  payload["config"] = config;
  std::ofstream out(path);
  if (!out) throw ConfigError("write_json_report: cannot open " + path);
  out << payload.dump(2) << "\n";
}

}  // namespace emon
