#include "chokefit/estimation/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "chokefit/random.hpp"

namespace chokefit::estimation {

using physics::Param;

namespace {

constexpr int kMaxInitialDraws = 100;
constexpr Eigen::Index kPhys = static_cast<Eigen::Index>(physics::kNumParams);

bool feasible_value(Param p, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  if (p == Param::kappa) return v > 1.0;
  if (p == Param::p_rc) return v < 1.0;
  return true;
}

// Maps optimizer coordinates to physical values: phi = offset + scale * theta.
struct Coordinates {
  physics::ParamVector offset{};
  physics::ParamVector scale{};

  Coordinates(const PriorSpec& priors, ParamScaling s) {
    for (Param p : physics::kAllParams) {
      const auto k = physics::index(p);
      offset[k] = priors[p].mu;
      scale[k] = s == ParamScaling::prior_mean ? priors[p].mu : priors[p].sigma;
    }
  }
};

struct RestartProblem {
  const data::Dataset& train;
  const ModelSetup& setup;
  const PriorSpec& priors;
  const RegularizationConfig& reg;
  const FitConfig& fit;
  Coordinates coords;
};

Eigen::VectorXd pack(const ModelParams& params, const RestartProblem& pb) {
  const Eigen::Index n_net = params.network ? static_cast<Eigen::Index>(params.network->num_parameters()) : 0;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(kPhys + n_net);
  for (Param p : model_parameters(params.mode)) {
    const auto k = physics::index(p);
    theta[static_cast<Eigen::Index>(k)] = (params.physical.get(p) - pb.coords.offset[k]) / pb.coords.scale[k];
  }
  if (params.network) theta.tail(n_net) = nnet::flatten(*params.network);
  return theta;
}

// Writes theta into `params`, leaving fixed and absorbed parameters untouched.
void unpack(const Eigen::VectorXd& theta, const RestartProblem& pb, ModelParams& params) {
  for (Param p : model_parameters(params.mode)) {
    if (pb.fit.is_fixed(p)) continue;
    const auto k = physics::index(p);
    params.physical.set(p, pb.coords.offset[k] + pb.coords.scale[k] * theta[static_cast<Eigen::Index>(k)]);
  }
  if (params.network) {
    const auto n_net = static_cast<std::size_t>(theta.size() - kPhys);
    nnet::unflatten(std::span<const double>(theta.data() + kPhys, n_net), *params.network);
  }
}

Eigen::VectorXd update_mask(const ModelParams& params, const FitConfig& fit, Eigen::Index size) {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(size);
  for (Param p : model_parameters(params.mode)) {
    if (!fit.is_fixed(p)) mask[static_cast<Eigen::Index>(physics::index(p))] = 1.0;
  }
  mask.tail(size - kPhys).setOnes();
  return mask;
}

RestartRecord run_restart(const RestartProblem& pb, const data::Dataset& test, std::size_t r) {
  RestartRecord rec;
  rec.index = r;
  rec.initial = initial_params(pb.setup, pb.priors, pb.fit, r);

  ModelParams current = rec.initial;
  ObjectiveWorkspace work;
  ObjectiveValue value;
  auto objective = [&](std::span<const std::size_t> rows, double weight, const Eigen::VectorXd& theta,
                       Eigen::VectorXd& grad) {
    unpack(theta, pb, current);
    evaluate_objective(pb.train, rows, weight, current, pb.setup, &pb.priors, &pb.reg, work, value);
    for (Eigen::Index k = 0; k < kPhys; ++k) {
      grad[k] = value.gradient.physical[static_cast<std::size_t>(k)] * pb.coords.scale[static_cast<std::size_t>(k)];
    }
    if (value.gradient.network) grad.tail(grad.size() - kPhys) = nnet::flatten(*value.gradient.network);
    return BatchEvaluation{value.loss, value.failed_rows};
  };

  MinibatchOptions opt;
  opt.optimizer = pb.fit.optimizer;
  opt.learning_rate = pb.fit.learning_rate;
  opt.schedule = pb.fit.lr_schedule;
  opt.lr_final_fraction = pb.fit.lr_final_fraction;
  opt.batch_size = pb.fit.batch_size;
  opt.epochs = pb.fit.epochs;

  Eigen::VectorXd theta0 = pack(rec.initial, pb);
  const Eigen::VectorXd mask = update_mask(rec.initial, pb.fit, theta0.size());
  auto shuffle = make_rng(pb.fit.seed, r, StreamPurpose::shuffle);
  MinimizeResult res = minimize_minibatch(pb.train.size(), objective, std::move(theta0), mask, opt, shuffle);

  rec.final_params = rec.initial;
  unpack(res.theta, pb, rec.final_params);
  rec.loss_trace = std::move(res.loss_trace);
  rec.rejected_steps = res.rejected_steps;
  rec.message = res.message;
  if (res.diverged) {
    rec.status = RestartStatus::diverged;
    return rec;
  }
  if (res.aborted) {
    rec.status = RestartStatus::aborted;
    return rec;
  }
  try {
    rec.test = evaluate(test, rec.final_params, pb.setup);
  } catch (const std::exception& e) {
    rec.status = RestartStatus::evaluation_failed;
    rec.message = e.what();
  }
  return rec;
}

}  // namespace

std::string_view scaling_name(ParamScaling s) noexcept {
  return s == ParamScaling::prior_mean ? "prior_mean" : "prior_sigma";
}

std::optional<ParamScaling> scaling_from_name(std::string_view s) noexcept {
  if (s == "prior_mean") return ParamScaling::prior_mean;
  if (s == "prior_sigma") return ParamScaling::prior_sigma;
  return std::nullopt;
}

std::string_view status_name(RestartStatus s) noexcept {
  switch (s) {
    case RestartStatus::ok: return "ok";
    case RestartStatus::diverged: return "diverged";
    case RestartStatus::aborted: return "aborted";
    case RestartStatus::evaluation_failed: return "evaluation_failed";
  }
  return "ok";
}

std::optional<RestartStatus> status_from_name(std::string_view s) noexcept {
  for (auto st : {RestartStatus::ok, RestartStatus::diverged, RestartStatus::aborted,
                  RestartStatus::evaluation_failed}) {
    if (status_name(st) == s) return st;
  }
  return std::nullopt;
}

void FitConfig::validate() const {
  if (!(learning_rate > 0.0) || !(learning_rate <= 1.0)) {
    throw std::invalid_argument("fit.learning_rate must be in (0, 1]");
  }
  if (!(lr_final_fraction > 0.0) || !(lr_final_fraction <= 1.0)) {
    throw std::invalid_argument("fit.lr_final_fraction must be in (0, 1]");
  }
  if (batch_size == 0) throw std::invalid_argument("fit.batch_size must be positive");
  if (restarts == 0) throw std::invalid_argument("fit.restarts must be at least 1");
  if (threads == 0) throw std::invalid_argument("fit.threads must be at least 1");
  for (const auto& [p, v] : fixed_params) {
    if (mode == ModelMode::hm && p == Param::c_d) {
      throw std::invalid_argument("fit.fixed_params: c_d is not a parameter of the hybrid model");
    }
    if (!feasible_value(p, v)) {
      throw std::invalid_argument("fit.fixed_params." + std::string(physics::param_name(p)) + ": infeasible value");
    }
  }
}

const SummaryStat& FitSummary::at(std::string_view name) const {
  for (const auto& s : stats) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("no summary statistic named " + std::string(name));
}

FitSummary summarize(const std::vector<RestartRecord>& restarts, ModelMode mode) {
  FitSummary out;
  std::vector<const RestartRecord*> ok;
  for (const auto& r : restarts) {
    if (r.status == RestartStatus::ok) ok.push_back(&r);
  }
  out.successful_restarts = ok.size();
  if (ok.empty()) return out;
  auto stat = [&](std::string name, auto get) {
    std::vector<double> v;
    v.reserve(ok.size());
    for (const auto* r : ok) v.push_back(get(*r));
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    out.stats.push_back({std::move(name), *lo, median(v), *hi});
  };
  stat("mae", [](const RestartRecord& r) { return r.test.mae; });
  stat("mape", [](const RestartRecord& r) { return r.test.mape; });
  for (Param p : model_parameters(mode)) {
    stat(std::string(physics::param_name(p)), [p](const RestartRecord& r) { return r.final_params.physical.get(p); });
  }
  return out;
}

ModelParams initial_params(const ModelSetup& setup, const PriorSpec& priors, const FitConfig& fit, std::size_t r) {
  ModelParams params;
  params.mode = fit.mode;
  auto rng = make_rng(fit.seed, r, StreamPurpose::physical_init);
  for (Param p : physics::kAllParams) {
    const Prior& pr = priors[p];
    std::normal_distribution<double> dist(pr.mu, pr.sigma);
    double v = pr.mu;
    // Every parameter consumes its draws so that fixing one does not shift
    // the initial values of the others.
    for (int attempt = 0; attempt < kMaxInitialDraws; ++attempt) {
      const double d = dist(rng);
      if (feasible_value(p, d)) {
        v = d;
        break;
      }
    }
    if (auto it = fit.fixed_params.find(p); it != fit.fixed_params.end()) v = it->second;
    params.physical.set(p, v);
  }
  if (fit.mode == ModelMode::hm) {
    params.physical.c_d = 1.0;
    params.physical.c_d_absorbed = true;
    params.network = nnet::he_init(derive_seed(fit.seed, r, StreamPurpose::network_init), setup.network.sizes,
                                   nnet::OutputHead::softplus, setup.network.output_scale);
  }
  return params;
}

Metrics evaluate(const data::Dataset& ds, const ModelParams& params, const ModelSetup& setup) {
  const auto pred = predict(ds, params, setup);
  const auto y = ds.targets();
  return metrics(y, pred);
}

FitResult train(const data::Dataset& train_set, const data::Dataset& test_set, const ModelSetup& setup,
                const PriorSpec& priors, const RegularizationConfig& reg, const FitConfig& fit) {
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  if (test_set.empty()) throw std::invalid_argument("test set is empty");
  fit.validate();
  priors.validate();
  reg.validate();

  FitResult result;
  result.setup = setup;
  result.config = fit;
  result.priors = priors;
  result.regularization = reg;
  result.train_rows = train_set.size();
  result.test_rows = test_set.size();
  result.restarts.resize(fit.restarts);

  const RestartProblem pb{train_set, setup, priors, reg, fit, Coordinates(priors, fit.scaling)};
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < fit.restarts; r = next++) {
      try {
        result.restarts[r] = run_restart(pb, test_set, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(fit.threads, fit.restarts);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.summary = summarize(result.restarts, fit.mode);
  if (result.summary.successful_restarts == 0) {
    std::string msg = "all restarts failed:";
    for (const auto& r : result.restarts) {
      msg += " [" + std::to_string(r.index) + "] " + std::string(status_name(r.status)) + ": " + r.message + ";";
    }
    throw TrainingError(msg);
  }
  return result;
}

}  // namespace chokefit::estimation
