#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chokefit/physics.hpp"

namespace chokefit::data {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Parses "YYYY-MM-DD", "YYYY-MM-DD[T| ]HH:MM[:SS[.fff]]" with an optional
/// trailing 'Z'. Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

struct Row {
  std::optional<Timestamp> timestamp;
  physics::ChokeInput x;
  double y = 0.0;  // oil rate [m3/h]
};

enum class Provenance { synthetic, ingested };

struct GeneratorTruth {
  physics::PhysicalParams params;
  physics::AreaSpec area;
};

struct Dataset {
  std::vector<Row> rows;
  Provenance provenance = Provenance::ingested;
  std::optional<GeneratorTruth> generator_truth;

  [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
  [[nodiscard]] bool empty() const noexcept { return rows.empty(); }
  [[nodiscard]] bool has_timestamps() const noexcept;
  [[nodiscard]] std::vector<double> targets() const;
};

}  // namespace chokefit::data
