#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "chokefit/data/dataset.hpp"

namespace chokefit::data {

class SchemaError : public DataError {
 public:
  explicit SchemaError(const std::string& column)
      : DataError("missing column: " + column), column_(column) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

/// Column names and unit conversions applied while reading a CSV file.
/// Values are converted as si = value * factor + offset.
struct SchemaConfig {
  std::string timestamp = "timestamp";  // optional column
  std::string p1 = "p1";
  std::string p2 = "p2";
  std::string t1 = "t1";
  std::string u = "u";
  std::string eta_g = "eta_g";
  std::string eta_o = "eta_o";
  std::string q_o = "q_o";
  double pressure_factor = 1.0;     // e.g. 1e5 for bar
  double temperature_offset = 0.0;  // e.g. 273.15 for Celsius
  double choke_factor = 1.0;        // e.g. 0.01 for percent
  double rate_factor = 1.0;         // to m3/h
  double max_bad_row_fraction = 0.5;
};

struct RowIssue {
  std::size_t line = 0;  // 1-based file line
  std::string message;
};

struct CsvLoadResult {
  Dataset dataset;
  std::vector<RowIssue> issues;
};

CsvLoadResult load_csv(const std::filesystem::path& path, const SchemaConfig& schema = {});

/// Writes the canonical column layout with round-trip precision.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

}  // namespace chokefit::data
