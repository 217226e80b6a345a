#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace emon {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

// UTC wall-clock timestamp, e.g. 2026-08-25T14:03:07Z.
std::string iso8601_utc_now();

// Scientific notation with 12 significant digits; the CSV number dialect.
std::string format_number(double x);

// Cells are preformatted strings; numeric cells go through format_number.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Emits a "# generated_at=<timestamp>" metadata line, the mandatory header,
// then one comma-joined line per row.  Cells must not contain commas.
void write_csv(const CsvTable& table, const std::string& path);

// Pretty-prints with sorted keys after stamping schema_version, generated_at,
// and the resolved config under "config".
void write_json_report(Json payload, const Json& config, const std::string& path);

}  // namespace emon
