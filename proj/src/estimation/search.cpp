#include "chokefit/estimation/search.hpp"

#include <cmath>
#include <random>

#include "chokefit/random.hpp"

namespace chokefit::estimation {

namespace {

double log_uniform(std::mt19937_64& rng, const data::Interval& iv) {
  if (iv.lo == iv.hi) return iv.lo;
  std::uniform_real_distribution<double> d(std::log(iv.lo), std::log(iv.hi));
  return std::exp(d(rng));
}

void check(const data::Interval& iv, const char* name) {
  if (!(iv.lo > 0.0) || !(iv.hi >= iv.lo) || !std::isfinite(iv.hi)) {
    throw std::invalid_argument(std::string("search.") + name + ": range must be positive and ordered");
  }
}

}  // namespace

void SearchSpace::validate() const {
  check(learning_rate, "learning_rate");
  check(lambda, "lambda");
  if (learning_rate.hi > 1.0) throw std::invalid_argument("search.learning_rate: upper bound above 1");
}

SearchResult hyperparameter_search(const data::Dataset& train_set, const data::Dataset& validation_set,
                                   const ModelSetup& setup, const PriorSpec& priors,
                                   const RegularizationConfig& reg, const FitConfig& base,
                                   const SearchSpace& space, std::size_t budget, std::uint64_t seed) {
  if (budget == 0) throw std::invalid_argument("search budget must be at least 1");
  space.validate();
  SearchResult out;
  bool any_ok = false;
  for (std::size_t k = 0; k < budget; ++k) {
    auto rng = make_rng(seed, k, StreamPurpose::search);
    SearchTrial trial;
    trial.index = k;
    trial.learning_rate = log_uniform(rng, space.learning_rate);
    trial.lambda = log_uniform(rng, space.lambda);
    FitConfig fit = base;
    fit.learning_rate = trial.learning_rate;
    RegularizationConfig r = reg;
    r.lambda = trial.lambda;
    try {
      const FitResult res = train(train_set, validation_set, setup, priors, r, fit);
      trial.ok = true;
      trial.validation_mae = res.summary.at("mae").median;
      trial.validation_mape = res.summary.at("mape").median;
    } catch (const TrainingError& e) {
      trial.message = e.what();
    }
    if (trial.ok && (!any_ok || trial.validation_mae < out.trials[out.best].validation_mae)) {
      out.best = k;
      any_ok = true;
    }
    out.trials.push_back(std::move(trial));
  }
  if (!any_ok) {
    std::string msg = "all search trials failed:";
    for (const auto& t : out.trials) msg += " [" + std::to_string(t.index) + "] " + t.message + ";";
    throw TrainingError(msg);
  }
  return out;
}

}  // namespace chokefit::estimation
