#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "chokefit/data/dataset.hpp"

namespace chokefit::data {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sampling intervals for synthetic operating points. p2 is drawn as
/// pr_raw * p1, so pr_raw spans both critical and sub-critical flow.
struct InputRanges {
  Interval p1{50e5, 150e5};      // [Pa]
  Interval pr_raw{0.3, 0.99};
  Interval t1{310.0, 370.0};     // [K]
  Interval u{0.05, 1.0};
  Interval eta_g{0.01, 0.6};
  Interval eta_o{0.2, 0.9};      // rejected while eta_g + eta_o > 1
};

struct SyntheticConfig {
  physics::PhysicalParams true_params = physics::PhysicalParams::synthetic_truth();
  physics::AreaSpec area;
  physics::FluidConstants consts;
  std::size_t n_points = 2000;
  std::size_t n_test_points = 500;
  InputRanges ranges;
  double noise_sigma = 0.0;  // [m3/h]
  std::uint64_t seed = 0;

  /// Throws DataError naming the offending field.
  void validate() const;
};

/// Noise-free (or noisy) data generated by the mechanistic model.
Dataset generate_synthetic(const SyntheticConfig& cfg);

/// Training rows followed by an independently drawn test grid.
std::pair<Dataset, Dataset> generate_synthetic_split(const SyntheticConfig& cfg);

/// Same sampling as generate_synthetic but the generating area curve has
/// the given shape, so a quadratic-area mechanistic fit is misspecified.
Dataset generate_mismatch_synthetic(const SyntheticConfig& cfg, physics::AreaShape alt_shape);

/// Row-count concatenation that keeps provenance and truth of `head`.
Dataset concatenate(const Dataset& head, const Dataset& tail);

}  // namespace chokefit::data
