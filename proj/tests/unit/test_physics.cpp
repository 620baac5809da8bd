#include <cmath>
#include <random>

#include "chokefit/data/synthetic.hpp"
#include "chokefit/physics.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chokefit::physics;

namespace {

const FluidConstants kConsts{};
const PhysicalParams kTruth = PhysicalParams::synthetic_truth();

}  // namespace

TEST_SUITE("physics") {
  TEST_CASE("upstream gas density follows the real gas law") {
    const double base = gas_density_upstream(1e7, 300.0, 0.021, kConsts);
    CHECK(std::abs(base - 84.190) <= 0.001);
    CHECK(gas_density_upstream(2e7, 300.0, 0.021, kConsts) == 2.0 * base);
    CHECK(gas_density_upstream(1e7, 600.0, 0.021, kConsts) == doctest::Approx(0.5 * base).epsilon(1e-15));
    CHECK_THROWS_AS((void)gas_density_upstream(0.0, 300.0, 0.021, kConsts), DomainError);
    CHECK_THROWS_AS((void)gas_density_upstream(1e7, -1.0, 0.021, kConsts), DomainError);
    CHECK_THROWS_AS((void)gas_density_upstream(1e7, 300.0, 0.0, kConsts), DomainError);
  }

  TEST_CASE("downstream gas density expands adiabatically") {
    CHECK(gas_density_downstream(80.0, 1.0, 1.3) == 80.0);
    CHECK(std::abs(gas_density_downstream(80.0, 0.55, 1.3) - oracle::kDownstream80) <= 0.01);
    CHECK(gas_density_downstream(80.0, 1e-12, 1.3) < 1e-7);
    CHECK_THROWS_AS((void)gas_density_downstream(80.0, 0.0, 1.3), DomainError);
    CHECK_THROWS_AS((void)gas_density_downstream(80.0, 0.5, 1.0), DomainError);
  }

  TEST_CASE("homogeneous mixture density") {
    CHECK(mixture_density({1.0, 0.0}, 80.0, 760.0, 1010.0) == doctest::Approx(80.0).epsilon(1e-15));
    CHECK(mixture_density({0.0, 1.0}, 80.0, 760.0, 1010.0) == doctest::Approx(760.0).epsilon(1e-15));
    CHECK(std::abs(mixture_density({0.2, 0.5}, 80.0, 760.0, 1010.0) - oracle::kMixture80) <= 0.1);
    CHECK_THROWS_AS((void)mixture_density({0.7, 0.5}, 80.0, 760.0, 1010.0), DomainError);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double eg = unit(rng);
      const double eo = (1.0 - eg) * unit(rng);
      const double rg = 1.0 + 200.0 * unit(rng);
      const double ro = 600.0 + 300.0 * unit(rng);
      const double rw = 950.0 + 150.0 * unit(rng);
      const double rho = mixture_density({eg, eo}, rg, ro, rw);
      CHECK(rho >= std::min({rg, ro, rw}) * (1 - 1e-14));
      CHECK(rho <= std::max({rg, ro, rw}) * (1 + 1e-14));
    }
  }

  TEST_CASE("effective pressure ratio clamps to [p_rc, 1]") {
    CHECK(effective_pressure_ratio(100.0, 80.0, 0.6) == doctest::Approx(0.8));
    CHECK(effective_pressure_ratio(100.0, 30.0, 0.6) == 0.6);
    CHECK(effective_pressure_ratio(100.0, 100.0, 0.6) == 1.0);
    CHECK(effective_pressure_ratio(100.0, 120.0, 0.6) == 1.0);
    CHECK_THROWS_AS((void)effective_pressure_ratio(-1.0, 30.0, 0.6), DomainError);
  }

  TEST_CASE("quadratic mechanistic area") {
    const AreaSpec spec{0.005, AreaShape::quadratic};
    CHECK(mechanistic_area(0.0, spec) == 0.0);
    CHECK(mechanistic_area(1.0, spec) == 0.005);
    CHECK(mechanistic_area(0.5, spec) == doctest::Approx(0.00125).epsilon(1e-15));
    CHECK_THROWS_AS((void)mechanistic_area(1.5, spec), DomainError);
    CHECK_THROWS_AS((void)mechanistic_area(-0.1, spec), DomainError);

    const AreaSpec logistic{0.005, AreaShape::logistic};
    CHECK(mechanistic_area(0.0, logistic) == doctest::Approx(0.0).scale(1e-3));
    CHECK(mechanistic_area(1.0, logistic) == doctest::Approx(0.005).epsilon(1e-12));
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
      const double a = mechanistic_area(k / 100.0, logistic);
      CHECK(a >= prev);
      prev = a;
    }
  }

  TEST_CASE("mass flow and oil rate match the transcription oracle") {
    const ChokeInput x = oracle::reference_input();
    CHECK(oracle::rel_err(gas_density_upstream(x.p1, x.t1, kTruth.m_g, kConsts), oracle::kRhoG1) < 1e-13);
    CHECK(oracle::rel_err(gas_density_downstream(oracle::kRhoG1, 0.55, 1.3), oracle::kRhoG2) < 1e-13);
    CHECK(oracle::rel_err(mixture_density(x.composition, oracle::kRhoG2, 760.0, 1010.0), oracle::kMixture) < 1e-13);
    const double mdot = mass_flow_rate(x, kTruth, kConsts, 1e-3);
    CHECK(oracle::rel_err(mdot, oracle::kMassFlow) < 1e-10);
    CHECK(oracle::rel_err(oil_rate_std(mdot, 0.5, 800.0), oracle::kOilRate) < 1e-10);

    // Same point through the full chain, with a_max * u^2 = 1e-3.
    ChokeInput xu = x;
    xu.u = std::sqrt(0.1);
    const double q = mm_predict(xu, kTruth, kConsts, AreaSpec{0.01, AreaShape::quadratic});
    CHECK(oracle::rel_err(q, oracle::kOilRate) < 1e-10);
    CHECK(oracle::rel_err(q / 0.5 * 800.0 / 3600.0, oracle::kMassFlow) < 1e-10);
  }

  TEST_CASE("zero-flow cases") {
    ChokeInput x = oracle::reference_input();
    x.p2 = x.p1;
    CHECK(mass_flow_rate(x, kTruth, kConsts, 1e-3) == 0.0);
    x = oracle::reference_input();
    CHECK(mass_flow_rate(x, kTruth, kConsts, 0.0) == 0.0);
    CHECK(oil_rate_std(0.0, 0.5, 800.0) == 0.0);
    CHECK(oil_rate_std(3.0, 0.0, 800.0) == 0.0);
    CHECK(std::abs(oil_rate_std(1.0, 0.5, 760.0) - oracle::kOilRateUnit) <= 1e-4);
    CHECK_THROWS_AS((void)oil_rate_std(1.0, 0.5, 0.0), DomainError);
    x.u = 0.0;
    CHECK(mm_predict(x, kTruth, kConsts, AreaSpec{}) == 0.0);
  }

  TEST_CASE("prediction equals the noise-free generator target") {
    chokefit::data::SyntheticConfig cfg;
    cfg.n_points = 50;
    const auto ds = chokefit::data::generate_synthetic(cfg);
    for (const auto& row : ds.rows) CHECK(mm_predict(row.x, kTruth, kConsts, cfg.area) == row.y);
  }

  TEST_CASE("infeasible parameters raise an evaluation error") {
    PhysicalParams bad = kTruth;
    bad.kappa = 0.9;
    const ChokeInput x = oracle::reference_input();
    CHECK_THROWS_AS((void)mass_flow_rate(x, bad, kConsts, 1e-3), std::exception);
    CHECK_FALSE(oil_rate_with_gradient(x, bad, kConsts, 1e-3).ok);
    CHECK_FALSE(try_oil_rate(x, bad, kConsts, 1e-3).has_value());
  }

  TEST_CASE("gradient identities") {
    std::mt19937_64 rng(11);
    const AreaSpec spec{};
    for (int i = 0; i < 50; ++i) {
      const ChokeInput x = oracle::random_input(rng, kTruth.p_rc, 1e-4);
      const double q = mm_predict(x, kTruth, kConsts, spec);
      const ParamVector g = mm_param_gradient(x, kTruth, kConsts, spec);
      CHECK(oracle::rel_err(g[index(Param::c_d)], q / kTruth.c_d) < 1e-14);
      if (x.p2 / x.p1 > kTruth.p_rc) {
        CHECK(g[index(Param::p_rc)] == 0.0);
      } else {
        CHECK(g[index(Param::p_rc)] != 0.0);
      }
    }
    ChokeInput x = oracle::reference_input();
    x.u = 0.5;
    x.p2 = 0.9 * x.p1;
    PhysicalParams phi = kTruth;
    phi.p_rc = 0.6;
    CHECK(mm_param_gradient(x, phi, kConsts, spec)[index(Param::p_rc)] == 0.0);
  }

  TEST_CASE("clamp boundary uses the sub-critical branch") {
    ChokeInput x = oracle::reference_input();
    x.u = 0.5;
    x.p2 = 0.5 * x.p1;
    PhysicalParams phi = kTruth;
    phi.p_rc = 0.5;
    CHECK(mm_param_gradient(x, phi, kConsts, AreaSpec{})[index(Param::p_rc)] == 0.0);
  }

  TEST_CASE("parameter gradient matches central differences") {
    std::mt19937_64 rng(2024);
    const AreaSpec spec{};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const ChokeInput x = oracle::random_input(rng, kTruth.p_rc, 1e-3);
      const ParamVector g = mm_param_gradient(x, kTruth, kConsts, spec);
      for (Param p : kAllParams) {
        auto f = [&](double v) {
          PhysicalParams phi = kTruth;
          phi.set(p, v);
          return mm_predict(x, phi, kConsts, spec);
        };
        const double fd = oracle::central_difference(f, kTruth.get(p), 1e-6);
        if (std::abs(fd) < 1e-12 && g[index(p)] == 0.0) continue;
        worst = std::max(worst, oracle::rel_err(fd, g[index(p)]));
      }
    }
    CHECK(worst <= 1e-5);
  }

  TEST_CASE("area derivative and explicit-area evaluation") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
      const ChokeInput x = oracle::random_input(rng, kTruth.p_rc, 1e-3);
      const double a = mechanistic_area(x.u, AreaSpec{});
      const auto r = oil_rate_with_gradient(x, kTruth, kConsts, a);
      REQUIRE(r.ok);
      CHECK(r.value == mm_predict(x, kTruth, kConsts, AreaSpec{}));
      CHECK(oracle::rel_err(r.d_area, r.value / a) < 1e-13);
      PhysicalParams absorbed = kTruth;
      absorbed.c_d_absorbed = true;
      const auto h = oil_rate_with_gradient(x, absorbed, kConsts, a);
      CHECK(h.d_params[index(Param::c_d)] == 0.0);
      CHECK(h.value == r.value);  // truth C_D is 1
    }
  }

  TEST_CASE("random feasible inputs respect clamp and zero-flow invariants") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const AreaSpec spec{};
    int failures = 0;
    for (int i = 0; i < 100000; ++i) {
      ChokeInput x = oracle::random_input(rng, kTruth.p_rc, 0.0);
      const double pr = effective_pressure_ratio(x.p1, x.p2, kTruth.p_rc);
      if (pr < kTruth.p_rc || pr > 1.0) ++failures;
      const double q = mm_predict(x, kTruth, kConsts, spec);
      if (!(q > 0.0)) ++failures;
      ChokeInput closed = x;
      closed.u = 0.0;
      if (mm_predict(closed, kTruth, kConsts, spec) != 0.0) ++failures;
      ChokeInput equal = x;
      equal.p2 = equal.p1 * (1.0 + unit(rng));  // p2 >= p1 clamps to unit ratio
      if (mm_predict(equal, kTruth, kConsts, spec) != 0.0) ++failures;
      ChokeInput dry = x;
      dry.composition.eta_o = 0.0;
      if (mm_predict(dry, kTruth, kConsts, spec) != 0.0) ++failures;
    }
    CHECK(failures == 0);
  }

  TEST_CASE("flow is monotone in downstream pressure and constant under critical flow") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
      ChokeInput x = oracle::random_input(rng, kTruth.p_rc, 0.0);
      ChokeInput lower = x;
      lower.p2 = x.p2 * 0.97;
      const double m0 = mass_flow_rate(x, kTruth, kConsts, 1e-3);
      const double m1 = mass_flow_rate(lower, kTruth, kConsts, 1e-3);
      CHECK(m1 >= m0);
      if (x.p2 / x.p1 < kTruth.p_rc) CHECK(m1 == m0);
    }
  }

  TEST_CASE("flow is linear in C_D and area") {
    const ChokeInput x = oracle::reference_input();
    PhysicalParams phi = kTruth;
    const double base = mass_flow_rate(x, phi, kConsts, 1e-3);
    phi.c_d = 0.5;
    CHECK(mass_flow_rate(x, phi, kConsts, 1e-3) == doctest::Approx(0.5 * base).epsilon(1e-15));
    CHECK(mass_flow_rate(x, kTruth, kConsts, 3e-3) == doctest::Approx(3.0 * base).epsilon(1e-15));
  }

  TEST_CASE("parameter names round trip") {
    for (Param p : kAllParams) CHECK(param_from_name(param_name(p)) == p);
    CHECK_FALSE(param_from_name("z1").has_value());
    CHECK(PhysicalParams::from_values(kTruth.values()).values() == kTruth.values());
    PhysicalParams bad = kTruth;
    bad.p_rc = 1.2;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }
}
