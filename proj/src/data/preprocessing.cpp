#include "chokefit/data/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chokefit::data {

namespace {

const char* rejection_reason(const Row& r, const FilterOptions& options) {
  const auto& x = r.x;
  for (double v : {x.p1, x.p2, x.t1, x.u, x.composition.eta_g, x.composition.eta_o, r.y}) {
    if (!std::isfinite(v)) return reason::kNonFinite;
  }
  if (x.p1 <= 0.0 || x.p2 <= 0.0) return reason::kNegativePressure;
  if (r.y < 0.0) return reason::kNegativeRate;
  if (x.t1 <= 0.0) return reason::kNonPositiveTemperature;
  if (x.u < 0.0 || x.u > 1.0) return reason::kChokeRange;
  if (!x.composition.valid()) return reason::kComposition;
  if (options.drop_reverse_pressure && x.p2 >= x.p1) return reason::kReversePressure;
  return nullptr;
}

}  // namespace

std::size_t FilterReport::total_removed() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, count] : removed) n += count;
  return n;
}

std::pair<Dataset, FilterReport> filter_outliers(const Dataset& ds, const FilterOptions& options) {
  Dataset out;
  out.provenance = ds.provenance;
  out.generator_truth = ds.generator_truth;
  FilterReport report;
  report.input_rows = ds.size();
  for (const Row& r : ds.rows) {
    if (const char* why = rejection_reason(r, options)) {
      ++report.removed[why];
    } else {
      out.rows.push_back(r);
    }
  }
  report.kept_rows = out.size();
  if (out.empty()) throw DataError("outlier filtering removed every row");
  return {std::move(out), std::move(report)};
}

std::pair<Dataset, Dataset> chronological_split(const Dataset& ds, const SplitSpec& spec) {
  const int chosen = static_cast<int>(spec.test_fraction.has_value()) + static_cast<int>(spec.cutoff.has_value()) +
                     static_cast<int>(spec.last_days.has_value());
  if (chosen != 1) throw DataError("split needs exactly one of test_fraction, cutoff, last_days");
  if (ds.empty()) throw DataError("cannot split an empty dataset");

  const bool any_ts = std::any_of(ds.rows.begin(), ds.rows.end(), [](const Row& r) { return r.timestamp.has_value(); });
  const bool all_ts = ds.has_timestamps();
  if (any_ts && !all_ts) throw DataError("split: some rows lack timestamps");

  std::vector<Row> rows = ds.rows;
  if (all_ts) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return *a.timestamp < *b.timestamp; });
  }

  std::size_t n_train = 0;
  if (spec.test_fraction) {
    const double f = *spec.test_fraction;
    if (!(f > 0.0 && f < 1.0)) throw DataError("split: test_fraction must lie in (0, 1)");
    const auto n_test = static_cast<std::size_t>(std::llround(f * static_cast<double>(rows.size())));
    n_train = rows.size() - std::min(n_test, rows.size());
  } else {
    if (!all_ts) throw DataError("split: cutoff requires timestamps");
    Timestamp cutoff = 0;
    if (spec.cutoff) {
      cutoff = *spec.cutoff;
    } else {
      if (!(*spec.last_days > 0.0)) throw DataError("split: last_days must be positive");
      cutoff = *rows.back().timestamp - static_cast<Timestamp>(std::llround(*spec.last_days * 86400.0));
    }
    const auto first_test = std::find_if(rows.begin(), rows.end(), [&](const Row& r) { return *r.timestamp >= cutoff; });
    n_train = static_cast<std::size_t>(first_test - rows.begin());
  }
  if (n_train == 0) throw DataError("split: training side is empty");
  if (n_train == rows.size()) throw DataError("split: test side is empty");

  Dataset train;
  Dataset test;
  train.provenance = test.provenance = ds.provenance;
  train.generator_truth = test.generator_truth = ds.generator_truth;
  train.rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
  test.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  return {std::move(train), std::move(test)};
}

}  // namespace chokefit::data
