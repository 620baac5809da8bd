#pragma once

#include <cstddef>
#include <span>

namespace chokefit::estimation {

struct Metrics {
  double mae = 0.0;   // [m3/h]
  double mape = 0.0;  // [%]
  std::size_t mape_excluded = 0;  // rows with |y| below the floor
};

inline constexpr double kMapeFloor = 1e-6;

/// Throws std::invalid_argument on empty or mismatched inputs.
Metrics metrics(std::span<const double> y_true, std::span<const double> y_pred, double mape_floor = kMapeFloor);

double median(std::span<const double> values);

}  // namespace chokefit::estimation
