#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "chokefit/data/dataset.hpp"

namespace chokefit::data {

struct FilterOptions {
  bool drop_reverse_pressure = false;  // remove rows with p2 >= p1
};

namespace reason {
inline constexpr const char* kNonFinite = "non-finite value";
inline constexpr const char* kNegativePressure = "negative pressure";
inline constexpr const char* kNegativeRate = "negative flow rate";
inline constexpr const char* kNonPositiveTemperature = "non-positive temperature";
inline constexpr const char* kChokeRange = "choke opening out of range";
inline constexpr const char* kComposition = "invalid composition";
inline constexpr const char* kReversePressure = "reverse pressure";
}  // namespace reason

struct FilterReport {
  std::size_t input_rows = 0;
  std::size_t kept_rows = 0;
  std::map<std::string, std::size_t> removed;  // reason -> count

  [[nodiscard]] std::size_t total_removed() const noexcept;
};

/// Removes rows violating physical sanity. Each row is attributed to the
/// first failing check. Throws DataError when nothing remains.
std::pair<Dataset, FilterReport> filter_outliers(const Dataset& ds, const FilterOptions& options = {});

/// Test-set selection: exactly one of the fields should be set. `cutoff`
/// and `last_days` need timestamps; rows at or after the cutoff are test.
struct SplitSpec {
  std::optional<double> test_fraction;
  std::optional<Timestamp> cutoff;
  std::optional<double> last_days;
};

/// Chronological split. Rows are stably sorted by timestamp when present,
/// otherwise the row order is pseudo-time.
std::pair<Dataset, Dataset> chronological_split(const Dataset& ds, const SplitSpec& spec);

}  // namespace chokefit::data
