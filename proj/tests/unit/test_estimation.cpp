#include <cmath>
#include <filesystem>
#include <limits>

#include "chokefit/data/synthetic.hpp"
#include "chokefit/estimation/linear.hpp"
#include "chokefit/estimation/metrics.hpp"
#include "chokefit/estimation/objective.hpp"
#include "chokefit/estimation/optimizer.hpp"
#include "chokefit/estimation/result_io.hpp"
#include "chokefit/estimation/search.hpp"
#include "chokefit/estimation/sensitivity.hpp"
#include "chokefit/estimation/train.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chokefit;
using namespace chokefit::estimation;
using physics::Param;

namespace {

data::Dataset small_dataset(std::size_t n, std::uint64_t seed = 0,
                            const physics::PhysicalParams& truth = physics::PhysicalParams::synthetic_truth()) {
  data::SyntheticConfig cfg;
  cfg.n_points = n;
  cfg.seed = seed;
  cfg.true_params = truth;
  return data::generate_synthetic(cfg);
}

ModelParams mm_params(const physics::PhysicalParams& p = physics::PhysicalParams::synthetic_truth()) {
  return ModelParams{ModelMode::mm, p, std::nullopt};
}

ModelParams hm_params(std::uint64_t seed, std::vector<std::size_t> sizes = {1, 6, 5, 4, 1}) {
  ModelParams p;
  p.mode = ModelMode::hm;
  p.physical = physics::PhysicalParams::synthetic_truth();
  p.physical.c_d_absorbed = true;
  p.network = nnet::he_init(seed, sizes);
  for (auto& l : p.network->layers) l.bias.setConstant(0.05);
  // Keeps the softplus head out of saturation so data terms dominate.
  p.network->layers.back().bias.setConstant(1.0);
  return p;
}

ModelSetup small_setup() {
  ModelSetup s;
  s.network.sizes = {1, 6, 5, 4, 1};
  return s;
}

FitConfig quick_fit(ModelMode mode = ModelMode::mm) {
  FitConfig f;
  f.mode = mode;
  f.learning_rate = 1e-2;
  f.epochs = 5;
  f.restarts = 3;
  f.seed = 17;
  return f;
}

}  // namespace

TEST_SUITE("estimation") {
  TEST_CASE("model parameters per mode") {
    CHECK(model_parameters(ModelMode::mm).size() == 6);
    CHECK(model_parameters(ModelMode::hm).size() == 5);
    CHECK(mode_from_name("hm") == ModelMode::hm);
    CHECK_FALSE(mode_from_name("xx").has_value());
  }

  TEST_CASE("noise-free data at the generating parameters") {
    const auto ds = small_dataset(40);
    const auto v = mle_objective(ds, mm_params(), ModelSetup{});
    CHECK(v.loss == 0.0);
    for (double g : v.gradient.physical) CHECK(g == 0.0);
    CHECK(v.failed_rows == 0);
  }

  TEST_CASE("zero prediction stub") {
    data::Dataset ds;
    data::Row r;
    r.x = {1e7, 5e6, 300.0, 0.0, {0.2, 0.5}};
    r.y = 3.0;
    ds.rows.push_back(r);
    CHECK(mle_objective(ds, mm_params(), ModelSetup{}).loss == 9.0);
    CHECK_THROWS_AS((void)mle_objective(data::Dataset{}, mm_params(), ModelSetup{}), std::invalid_argument);
  }

  TEST_CASE("MAP objective algebra") {
    const auto priors = PriorSpec::defaults();
    physics::PhysicalParams at_mean;
    for (Param p : physics::kAllParams) at_mean.set(p, priors[p].mu);
    const auto perfect = small_dataset(20, 1, at_mean);
    const RegularizationConfig reg{10.0, 1e-4, true};
    CHECK(map_objective(perfect, mm_params(at_mean), ModelSetup{}, priors, reg).loss == 0.0);

    for (Param p : physics::kAllParams) {
      physics::PhysicalParams shifted = at_mean;
      shifted.set(p, priors[p].mu + priors[p].sigma);
      const auto ds = small_dataset(10, 2, shifted);
      const auto v = map_objective(ds, mm_params(shifted), ModelSetup{}, priors, reg);
      CHECK(v.data_loss == 0.0);
      CHECK(v.loss == doctest::Approx(100.0).epsilon(1e-12));
    }
  }

  TEST_CASE("disabled regularization reduces to MLE bit for bit") {
    const auto ds = small_dataset(30);
    physics::PhysicalParams off = physics::PhysicalParams::synthetic_truth();
    off.rho_o = 800.0;
    off.c_d = 0.93;
    const RegularizationConfig disabled{10.0, 1e-4, false};
    const auto priors = PriorSpec::defaults();
    const auto a = mle_objective(ds, mm_params(off), ModelSetup{});
    const auto b = map_objective(ds, mm_params(off), ModelSetup{}, priors, disabled);
    CHECK(a.loss == b.loss);
    CHECK(a.gradient.physical == b.gradient.physical);

    const auto setup = small_setup();
    const auto h = hm_params(4);
    const auto c = mle_objective(ds, h, setup);
    const auto d = map_objective(ds, h, setup, priors, disabled);
    CHECK(c.loss == d.loss);
    CHECK(nnet::flatten(*c.gradient.network) == nnet::flatten(*d.gradient.network));
  }

  TEST_CASE("network weight decay term") {
    const auto ds = small_dataset(10);
    const auto setup = small_setup();
    const auto h = hm_params(8);
    const RegularizationConfig reg{10.0, 0.01, true};
    const auto v = map_objective(ds, h, setup, PriorSpec::defaults(), reg);
    CHECK(v.network_penalty == doctest::Approx(0.01 * nnet::l2_norm_sq(*h.network)).epsilon(1e-14));
  }

  TEST_CASE("objective gradients match central differences") {
    const auto ds = small_dataset(25, 3);
    const auto priors = PriorSpec::defaults();
    const RegularizationConfig reg{3.0, 1e-3, true};
    physics::PhysicalParams phi = physics::PhysicalParams::synthetic_truth();
    phi.rho_o = 790.0;
    phi.kappa = 1.33;
    phi.m_g = 0.024;
    phi.p_rc = 0.58;
    phi.c_d = 0.92;

    SUBCASE("mechanistic") {
      const auto v = map_objective(ds, mm_params(phi), ModelSetup{}, priors, reg);
      for (Param p : physics::kAllParams) {
        auto f = [&](double x) {
          auto q = phi;
          q.set(p, x);
          return map_objective(ds, mm_params(q), ModelSetup{}, priors, reg).loss;
        };
        const double fd = oracle::central_difference(f, phi.get(p), 1e-6);
        CHECK(oracle::rel_err(fd, v.gradient.physical[physics::index(p)]) <= 1e-4);
      }
    }
    SUBCASE("hybrid") {
      const auto setup = small_setup();
      auto h = hm_params(5);
      // Targets near the hybrid prediction keep residuals O(1).
      auto hds = ds;
      const auto hn = h;
      const auto base = predict(hds, h, setup);
      for (std::size_t i = 0; i < hds.rows.size(); ++i) hds.rows[i].y = base[i] + 2.0 * std::sin(1.0 + i);
      h.physical.rho_o = 790.0;
      h.physical.kappa = 1.33;
      const auto v = map_objective(hds, h, setup, priors, reg);
      for (Param p : model_parameters(ModelMode::hm)) {
        auto f = [&](double x) {
          auto q = h;
          q.physical.set(p, x);
          return map_objective(hds, q, setup, priors, reg).loss;
        };
        const double fd = oracle::central_difference(f, h.physical.get(p), 1e-6);
        CHECK(oracle::rel_err(fd, v.gradient.physical[physics::index(p)]) <= 1e-4);
      }
      CHECK(v.gradient.physical[physics::index(Param::c_d)] == 0.0);
      const auto vn = map_objective(hds, hn, setup, priors, reg);
      const Eigen::VectorXd flat = nnet::flatten(*hn.network);
      const Eigen::VectorXd g = nnet::flatten(*vn.gradient.network);
      double worst = 0.0;
      for (Eigen::Index k = 0; k < flat.size(); ++k) {
        auto f = [&](double x) {
          Eigen::VectorXd q = flat;
          q[k] = x;
          auto hp = hn;
          nnet::unflatten(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), *hp.network);
          return map_objective(hds, hp, setup, priors, reg).loss;
        };
        const double step = 1e-5;
        const double fd = (f(flat[k] + step) - f(flat[k] - step)) / (2 * step);
        if (std::abs(fd) < 1e-12 && g[k] == 0.0) continue;
        worst = std::max(worst, oracle::rel_err(fd, g[k]));
      }
      CHECK(worst <= 1e-4);
    }
  }

  TEST_CASE("failing rows receive the fixed penalty") {
    const auto ds = small_dataset(12);
    auto bad = physics::PhysicalParams::synthetic_truth();
    bad.kappa = 0.8;
    const auto v = mle_objective(ds, mm_params(bad), ModelSetup{});
    CHECK(v.failed_rows == 12);
    CHECK(v.loss == doctest::Approx(12 * kFailurePenalty));
    for (double g : v.gradient.physical) CHECK(g == 0.0);
  }

  TEST_CASE("Adam update") {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 1.5);
    AdamState s = AdamState::zeros(2);
    CHECK(adam_step(x, Eigen::VectorXd::Zero(2), s, 0.1));
    CHECK(x == Eigen::VectorXd::Constant(2, 1.5));

    Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
    AdamState t = AdamState::zeros(1);
    double last = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double before = y[0];
      adam_step(y, Eigen::VectorXd::Constant(1, 0.37), t, 0.01);
      last = before - y[0];
    }
    CHECK(last == doctest::Approx(0.01).epsilon(1e-6));

    Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
    AdamState qs = AdamState::zeros(1);
    for (int i = 0; i < 10; ++i) adam_step(q, Eigen::VectorXd::Constant(1, 2.0 * (q[0] - 3.0)), qs, 0.1);
    CHECK(oracle::rel_err(q[0], oracle::kAdamTen) < 1e-12);

    Eigen::VectorXd r = Eigen::VectorXd::Ones(2);
    AdamState rs = AdamState::zeros(2);
    Eigen::VectorXd bad(2);
    bad << 1.0, std::numeric_limits<double>::infinity();
    CHECK_FALSE(adam_step(r, bad, rs, 0.1));
    CHECK(r == Eigen::VectorXd::Ones(2));
    CHECK(rs.t == 0);
  }

  TEST_CASE("SGD update") {
    Eigen::VectorXd x(2);
    x << 1.0, -2.0;
    CHECK(sgd_step(x, Eigen::VectorXd::Zero(2), 0.5));
    CHECK(x[0] == 1.0);
    Eigen::VectorXd g(2);
    g << 0.25, 4.0;
    sgd_step(x, g, 1.0);
    CHECK(x[0] == 0.75);
    CHECK(x[1] == -6.0);
    sgd_step(x, g, 0.5);
    CHECK(x[0] == 0.625);
    CHECK(x[1] == -8.0);
    g[0] = std::nan("");
    CHECK_FALSE(sgd_step(x, g, 0.5));
  }

  TEST_CASE("learning-rate schedule") {
    CHECK(scheduled_rate(0.1, LrSchedule::constant, 0.01, 7, 10) == 0.1);
    CHECK(scheduled_rate(0.1, LrSchedule::cosine, 0.01, 0, 10) == doctest::Approx(0.1));
    CHECK(scheduled_rate(0.1, LrSchedule::cosine, 0.01, 5, 10) == doctest::Approx(0.1 * (0.01 + 0.99 * 0.5)));
    CHECK(scheduled_rate(0.1, LrSchedule::cosine, 0.01, 10, 10) == doctest::Approx(0.001));
  }

  TEST_CASE("metrics") {
    const std::vector<double> y{10.0, 20.0};
    const std::vector<double> p{9.0, 22.0};
    const auto m = metrics(y, p);
    CHECK(m.mae == doctest::Approx(1.5));
    CHECK(m.mape == doctest::Approx(10.0));
    const auto same = metrics(y, y);
    CHECK(same.mae == 0.0);
    CHECK(same.mape == 0.0);
    const std::vector<double> one{10.0};
    const std::vector<double> nine{9.0};
    CHECK(metrics(one, nine).mape == doctest::Approx(10.0));
    const std::vector<double> with_zero{0.0, 10.0};
    const auto z = metrics(with_zero, std::vector<double>{1.0, 9.0});
    CHECK(z.mape_excluded == 1);
    CHECK(z.mape == doctest::Approx(10.0));
    CHECK_THROWS_AS((void)metrics(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS((void)metrics(one, y), std::invalid_argument);
    CHECK(median(std::vector<double>{3.0, 1.0, 2.0}) == 2.0);
    CHECK(median(std::vector<double>{4.0, 1.0, 2.0, 3.0}) == 2.5);
  }

  TEST_CASE("zero epochs return the initial draws") {
    const auto train_set = small_dataset(50, 1);
    const auto test_set = small_dataset(20, 2);
    FitConfig fit = quick_fit();
    fit.restarts = 1;
    fit.epochs = 0;
    const auto res = train(train_set, test_set, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{}, fit);
    const auto& r = res.restarts.at(0);
    CHECK(r.final_params.physical.values() == r.initial.physical.values());
    CHECK(r.initial.physical.values() == initial_params(ModelSetup{}, PriorSpec::defaults(), fit, 0).physical.values());
    const auto m = evaluate(test_set, r.initial, ModelSetup{});
    CHECK(r.test.mae == m.mae);
    CHECK(r.loss_trace.empty());
  }

  TEST_CASE("initial draws are feasible and reproducible") {
    FitConfig fit = quick_fit();
    for (std::size_t r = 0; r < 50; ++r) {
      const auto p = initial_params(ModelSetup{}, PriorSpec::defaults(), fit, r);
      CHECK(p.physical.valid());
    }
    PriorSpec wide = PriorSpec::defaults();
    wide[Param::rho_o] = {1.0, 1000.0};
    for (std::size_t r = 0; r < 50; ++r) CHECK(initial_params(ModelSetup{}, wide, fit, r).physical.rho_o > 0.0);
  }

  TEST_CASE("training is deterministic and summaries are recomputable") {
    const auto train_set = small_dataset(64, 1);
    const auto test_set = small_dataset(20, 2);
    const auto fit = quick_fit();
    const auto a = train(train_set, test_set, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{}, fit);
    const auto b = train(train_set, test_set, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{}, fit);
    REQUIRE(a.restarts.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(a.restarts[r].final_params.physical.values() == b.restarts[r].final_params.physical.values());
      CHECK(a.restarts[r].loss_trace == b.restarts[r].loss_trace);
    }
    const auto re = summarize(a.restarts, ModelMode::mm);
    REQUIRE(re.stats.size() == a.summary.stats.size());
    for (std::size_t k = 0; k < re.stats.size(); ++k) {
      CHECK(re.stats[k].name == a.summary.stats[k].name);
      CHECK(re.stats[k].median == a.summary.stats[k].median);
      CHECK(re.stats[k].min == a.summary.stats[k].min);
      CHECK(re.stats[k].max == a.summary.stats[k].max);
    }
    std::vector<double> maes;
    for (const auto& r : a.restarts) maes.push_back(r.test.mae);
    CHECK(a.summary.at("mae").median == median(maes));

    FitConfig threaded = fit;
    threaded.threads = 2;
    const auto c = train(train_set, test_set, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{}, threaded);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(c.restarts[r].final_params.physical.values() == a.restarts[r].final_params.physical.values());
    }
  }

  TEST_CASE("fixed parameters are held constant") {
    const auto train_set = small_dataset(64, 1);
    const auto test_set = small_dataset(20, 2);
    FitConfig fit = quick_fit();
    fit.fixed_params[Param::c_d] = 1.0;
    fit.fixed_params[Param::kappa] = 1.3;
    const auto res = train(train_set, test_set, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{}, fit);
    for (const auto& r : res.restarts) {
      CHECK(r.final_params.physical.c_d == 1.0);
      CHECK(r.final_params.physical.kappa == 1.3);
      CHECK(r.final_params.physical.rho_o != r.initial.physical.rho_o);
    }
    FitConfig hm = quick_fit(ModelMode::hm);
    hm.fixed_params[Param::c_d] = 1.0;
    CHECK_THROWS_AS(hm.validate(), std::invalid_argument);
  }

  TEST_CASE("hybrid training runs and keeps c_d absorbed") {
    const auto train_set = small_dataset(64, 1);
    const auto test_set = small_dataset(20, 2);
    FitConfig fit = quick_fit(ModelMode::hm);
    fit.restarts = 2;
    fit.learning_rate = 1e-3;
    const auto res = train(train_set, test_set, small_setup(), PriorSpec::defaults(), RegularizationConfig{}, fit);
    for (const auto& r : res.restarts) {
      CHECK(r.final_params.network.has_value());
      CHECK(r.final_params.physical.c_d_absorbed);
      CHECK(nnet::flatten(*r.final_params.network) != nnet::flatten(*r.initial.network));
    }
    CHECK_THROWS_AS((void)res.summary.at("c_d"), std::out_of_range);
  }

  TEST_CASE("all restarts failing is a training error") {
    auto train_set = small_dataset(32, 1);
    train_set.rows[0].y = std::numeric_limits<double>::infinity();
    const auto test_set = small_dataset(10, 2);
    CHECK_THROWS_AS(train(train_set, test_set, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{}, quick_fit()),
                    TrainingError);

    // Every draw infeasible: each epoch fails on all rows and the run aborts.
    PriorSpec bad = PriorSpec::defaults();
    bad[Param::kappa] = {0.5, 1e-6};
    FitConfig fit = quick_fit();
    fit.epochs = 30;
    RegularizationConfig off;
    off.enabled = false;
    try {
      (void)train(small_dataset(32, 1), test_set, ModelSetup{}, bad, off, fit);
      FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("aborted") != std::string::npos);
    }
  }

  TEST_CASE("mini-batch minimizer leaves masked entries alone") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 0, 0, 1, 1, 1, 2, 1;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    Eigen::VectorXd mask(2);
    mask << 1.0, 0.0;
    std::mt19937_64 rng(1);
    MinibatchOptions opt;
    opt.epochs = 20;
    opt.batch_size = 2;
    const auto res = minimize_minibatch(4, linear_objective(X, y), Eigen::VectorXd::Constant(2, 0.5), mask, opt, rng);
    CHECK(res.theta[1] == 0.5);
    CHECK(res.theta[0] != 0.5);
    CHECK(res.loss_trace.size() == 20);
  }

  TEST_CASE("sensitivity matrix") {
    const auto ds = small_dataset(30, 4);
    const auto priors = PriorSpec::defaults();
    const auto rep = sensitivity_matrix(ds, mm_params(), ModelSetup{}, priors);
    CHECK(rep.jacobian.rows() == 30);
    CHECK(rep.jacobian.cols() == 6);
    for (Eigen::Index i = 0; i < rep.jacobian.rows(); ++i) {
      const auto g = physics::mm_param_gradient(ds.rows[static_cast<std::size_t>(i)].x,
                                                physics::PhysicalParams::synthetic_truth(), physics::FluidConstants{},
                                                physics::AreaSpec{});
      for (Eigen::Index k = 0; k < 6; ++k) CHECK(rep.jacobian(i, k) == g[static_cast<std::size_t>(k)]);
    }
    for (Eigen::Index k = 1; k < rep.singular_values.size(); ++k) {
      CHECK(rep.singular_values[k] <= rep.singular_values[k - 1]);
      CHECK(rep.singular_values[k] >= 0.0);
    }
    const double cut = rep.rank_tolerance * rep.singular_values[0];
    CHECK(rep.numerical_rank == static_cast<std::size_t>((rep.singular_values.array() > cut).count()));
    const auto again = sensitivity_matrix(ds, mm_params(), ModelSetup{}, priors);
    CHECK(again.singular_values == rep.singular_values);

    auto closed = ds;
    for (auto& r : closed.rows) r.x.u = 0.0;
    const auto zero = sensitivity_matrix(closed, mm_params(), ModelSetup{}, priors);
    CHECK(zero.numerical_rank < 6);
    CHECK_FALSE(zero.identifiable);
    CHECK(zero.jacobian.col(5).isZero(0.0));
  }

  TEST_CASE("hybrid sensitivity uses the Gram path for wide Jacobians") {
    const auto ds = small_dataset(12, 4);
    const auto h = hm_params(2);
    const auto rep = sensitivity_matrix(ds, h, small_setup(), PriorSpec::defaults());
    CHECK(rep.jacobian.cols() == static_cast<Eigen::Index>(5 + h.network->num_parameters()));
    CHECK(rep.singular_values.size() == 12);
    CHECK_FALSE(rep.identifiable);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.jacobian * rep.column_scales.asDiagonal());
    CHECK(oracle::rel_err(svd.singularValues()[0], rep.singular_values[0]) < 1e-8);
  }

  TEST_CASE("random search") {
    const auto train_set = small_dataset(48, 1);
    const auto val = small_dataset(16, 2);
    FitConfig base = quick_fit();
    base.restarts = 1;
    base.epochs = 3;
    SearchSpace space;
    const auto one = hyperparameter_search(train_set, val, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{},
                                           base, space, 1, 5);
    CHECK(one.trials.size() == 1);
    CHECK(one.best == 0);
    const auto a = hyperparameter_search(train_set, val, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{},
                                         base, space, 4, 5);
    const auto b = hyperparameter_search(train_set, val, ModelSetup{}, PriorSpec::defaults(), RegularizationConfig{},
                                         base, space, 4, 5);
    REQUIRE(a.trials.size() == 4);
    std::vector<double> maes;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(a.trials[k].learning_rate == b.trials[k].learning_rate);
      CHECK(a.trials[k].lambda == b.trials[k].lambda);
      CHECK(a.trials[k].validation_mae == b.trials[k].validation_mae);
      CHECK(a.trials[k].learning_rate >= space.learning_rate.lo);
      CHECK(a.trials[k].learning_rate <= space.learning_rate.hi);
      CHECK(a.incumbent().validation_mae <= a.trials[k].validation_mae);
      maes.push_back(a.trials[k].validation_mae);
    }
    CHECK(a.incumbent().validation_mae <= median(maes));
    CHECK(one.trials[0].learning_rate == a.trials[0].learning_rate);
  }

  TEST_CASE("fit results round trip through JSON") {
    const auto train_set = small_dataset(40, 1);
    const auto test_set = small_dataset(10, 2);
    FitConfig fit = quick_fit(ModelMode::hm);
    fit.restarts = 2;
    fit.fixed_params[Param::kappa] = 1.3;
    const auto res = train(train_set, test_set, small_setup(), PriorSpec::defaults(), RegularizationConfig{}, fit);
    const auto path = std::filesystem::temp_directory_path() / "chokefit_result.json";
    save_result(res, path);
    const auto back = load_result(path);
    std::filesystem::remove(path);
    REQUIRE(back.restarts.size() == res.restarts.size());
    for (std::size_t r = 0; r < res.restarts.size(); ++r) {
      const auto& x = res.restarts[r];
      const auto& y = back.restarts[r];
      CHECK(x.final_params.physical.values() == y.final_params.physical.values());
      CHECK(nnet::flatten(*x.final_params.network) == nnet::flatten(*y.final_params.network));
      CHECK(nnet::flatten(*x.initial.network) == nnet::flatten(*y.initial.network));
      CHECK(x.loss_trace == y.loss_trace);
      CHECK(x.test.mae == y.test.mae);
      CHECK(x.test.mape == y.test.mape);
    }
    CHECK(back.config.fixed_params == res.config.fixed_params);
    CHECK(back.config.mode == ModelMode::hm);
    CHECK(back.summary.at("mape").median == res.summary.at("mape").median);
    CHECK(back.setup.network.sizes == res.setup.network.sizes);

    auto j = result_to_json(res);
    j["version"] = 2;
    CHECK_THROWS_AS((void)result_from_json(j), ResultFormatError);
    j["version"] = 1;
    j["format"] = "something else";
    CHECK_THROWS_AS((void)result_from_json(j), ResultFormatError);
  }
}
