#include "chokefit/estimation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace chokefit::estimation {

Metrics metrics(std::span<const double> y_true, std::span<const double> y_pred, double mape_floor) {
  if (y_true.empty()) throw std::invalid_argument("metrics: empty input");
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("metrics: length mismatch");
  double abs_sum = 0.0;
  double pct_sum = 0.0;
  std::size_t pct_n = 0;
  Metrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = std::abs(y_true[i] - y_pred[i]);
    abs_sum += e;
    if (std::abs(y_true[i]) < mape_floor) {
      ++m.mape_excluded;
    } else {
      pct_sum += e / std::abs(y_true[i]);
      ++pct_n;
    }
  }
  m.mae = abs_sum / static_cast<double>(y_true.size());
  m.mape = pct_n ? 100.0 * pct_sum / static_cast<double>(pct_n) : std::numeric_limits<double>::quiet_NaN();
  return m;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace chokefit::estimation
