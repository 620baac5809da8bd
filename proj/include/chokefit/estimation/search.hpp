#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chokefit/data/synthetic.hpp"
#include "chokefit/estimation/train.hpp"

namespace chokefit::estimation {

struct SearchSpace {
  data::Interval learning_rate{1e-4, 1e-2};
  data::Interval lambda{1e-6, 1e-2};

  void validate() const;
};

struct SearchTrial {
  std::size_t index = 0;
  double learning_rate = 0.0;
  double lambda = 0.0;
  bool ok = false;
  double validation_mae = 0.0;  // median over the trial's restarts
  double validation_mape = 0.0;
  std::string message;
};

struct SearchResult {
  std::vector<SearchTrial> trials;
  std::size_t best = 0;  // index into trials

  [[nodiscard]] const SearchTrial& incumbent() const { return trials.at(best); }
};

/// Log-uniform random search over the learning rate and lambda. Each trial
/// trains with `base` (its restarts, epochs and seed) on `train_set` and is
/// scored by median validation MAE. Throws TrainingError if every trial fails.
SearchResult hyperparameter_search(const data::Dataset& train_set, const data::Dataset& validation_set,
                                   const ModelSetup& setup, const PriorSpec& priors,
                                   const RegularizationConfig& reg, const FitConfig& base,
                                   const SearchSpace& space, std::size_t budget, std::uint64_t seed);

}  // namespace chokefit::estimation
