#include <doctest.h>

#include <cmath>
#include <random>

#include "rclf/chemostat.hpp"
#include "rclf/error.hpp"

using namespace rclf;

namespace {

const GrowthModel kHaldane = GrowthModel::haldane(75.0, 100.0, 0.025);

ChemostatScenario demo(double a = 0.05) {
  return scenario_from_substrate(600.0, 2.0, 0.1, 0.1, 506.72, kHaldane, a);
}

}  // namespace

TEST_CASE("growth laws") {
  const auto monod = GrowthModel::monod(2.0, 3.0);
  CHECK(growth_rate(monod, 3.0) == doctest::Approx(1.0));
  CHECK(monod.sup() == 2.0);
  CHECK(std::isinf(monod.peak_location()));
  CHECK(growth_rate(monod, 0.0) == 0.0);

  // Haldane peak at sqrt(K1/K2) = sqrt(4000)
  const double peak = std::sqrt(100.0 / 0.025);
  CHECK(kHaldane.peak_location() == doctest::Approx(peak));
  CHECK(kHaldane.sup() == doctest::Approx(growth_rate(kHaldane, peak)).epsilon(1e-14));
  for (double S : {10.0, 50.0, 62.0, 65.0, 300.0})
    CHECK(growth_rate(kHaldane, S) <= kHaldane.sup() * (1.0 + 1e-15));

  const auto gen = GrowthModel::generalized_haldane(75.0, 100.0, 0.025, 2.0);
  for (double S : {1.0, 63.0, 500.0}) CHECK(growth_rate(gen, S) == doctest::Approx(growth_rate(kHaldane, S)));
  const auto cubic = GrowthModel::generalized_haldane(10.0, 1.0, 0.5, 3.0);
  const double p3 = cubic.peak_location();
  CHECK(growth_rate(cubic, p3) > growth_rate(cubic, p3 * 1.01));
  CHECK(growth_rate(cubic, p3) > growth_rate(cubic, p3 * 0.99));

  CHECK_THROWS_AS(GrowthModel::haldane(-1.0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(GrowthModel::generalized_haldane(1.0, 1.0, 1.0, 0.5), InvalidArgument);
}

TEST_CASE("equilibrium is a rest point of the physical model") {
  const auto sc = demo();
  CHECK_NOTHROW(sc.validate());
  CHECK(sc.S_s == 506.72);
  const auto r = physical_rhs(sc, sc.X_s, sc.S_s, sc.D_s, 0.0, 0.0);
  CHECK(std::abs(r.dX) < 1e-10);
  CHECK(std::abs(r.dS) < 1e-10);
  // the uncertainty vanishes at S_s for every disturbance value
  CHECK(uncertainty_term(sc, sc.S_s, 0.05, 0.05) == 0.0);
  const auto t = to_transformed(sc, sc.X_s, sc.S_s);
  CHECK(std::abs(t.x1) < 1e-14);
  CHECK(std::abs(t.x2) < 1e-14);
}

TEST_CASE("equilibrium solver picks the requested branch") {
  const double target = growth_rate(kHaldane, 506.72);
  const auto desc = solve_equilibrium(600.0, 2.0, 0.0, 0.0, target, kHaldane);
  CHECK(desc.S_s == doctest::Approx(506.72).epsilon(1e-10));
  const auto asc = solve_equilibrium(600.0, 2.0, 0.0, 0.0, target, kHaldane, Branch::Ascending);
  CHECK(asc.S_s < kHaldane.peak_location());
  CHECK(growth_rate(kHaldane, asc.S_s) == doctest::Approx(target).epsilon(1e-12));
  CHECK_THROWS_AS(solve_equilibrium(600.0, 2.0, 0.0, 0.0, 100.0, kHaldane), Infeasible);
  CHECK_THROWS_AS(scenario_from_substrate(600.0, 2.0, 10.0, 0.0, 506.72, kHaldane), Infeasible);
}

TEST_CASE("transformed field is the pushforward of the physical field") {
  const auto sc = demo();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const double S = sc.S_i * unit(rng);
    const double X = 2.0 * sc.X_s * unit(rng);
    const double D = 3.0 * sc.D_s * unit(rng);
    const double d1 = sc.a * unit(rng), d2 = sc.a * unit(rng);
    const auto phys = physical_rhs(sc, X, S, D, d1, d2);
    const double h = 1e-6 / (1.0 + std::abs(phys.dX) / X + std::abs(phys.dS) / S);
    const auto fwd = to_transformed(sc, X + h * phys.dX, S + h * phys.dS);
    const auto bwd = to_transformed(sc, X - h * phys.dX, S - h * phys.dS);
    const auto p = to_transformed(sc, X, S);
    const auto tr = transformed_rhs(sc, p.x1, p.x2, D - sc.D_s, d1, d2);
    const double fd1 = (fwd.x1 - bwd.x1) / (2.0 * h);
    const double fd2 = (fwd.x2 - bwd.x2) / (2.0 * h);
    CHECK(tr.dx1 == doctest::Approx(fd1).epsilon(1e-5).scale(1.0));
    CHECK(tr.dx2 == doctest::Approx(fd2).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("coordinate round trips") {
  const auto sc = demo();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(-8.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const double x1 = coord(rng), x2 = coord(rng);
    const auto p = from_transformed(sc, x1, x2);
    const auto back = to_transformed(sc, p.X, p.S);
    CHECK(std::abs(back.x1 - x1) < 1e-9);
    CHECK(std::abs(back.x2 - x2) < 1e-9);
  }
  CHECK_THROWS_AS(to_transformed(sc, 1.0, sc.S_i), DomainError);
  CHECK_THROWS_AS(to_transformed(sc, -1.0, 10.0), DomainError);
  CHECK_THROWS_AS(physical_rhs(sc, 1.0, 0.0, 1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("negative dilution is outside the model") {
  const auto sc = demo();
  CHECK_THROWS_AS(transformed_rhs(sc, 0.0, 0.0, -sc.D_s - 1e-9, 0.0, 0.0), DomainError);
  CHECK_NOTHROW(transformed_rhs(sc, 0.0, 0.0, -sc.D_s, 0.0, 0.0));
}

TEST_CASE("substrate map is stable in both tails") {
  const auto sc = demo();
  CHECK(sc.substrate_of(-800.0) >= 0.0);
  CHECK(sc.substrate_of(800.0) == doctest::Approx(sc.S_i));
  CHECK(std::isfinite(sc.mu_tilde(-800.0)));
  CHECK(sc.substrate_of(0.0) == doctest::Approx(sc.S_s).epsilon(1e-14));
}

TEST_CASE("S2 certificate on the demo scenario") {
  const auto sc = demo();
  const auto s2 = check_S2(sc);
  CHECK(s2.p > 0.0);
  CHECK(s2.x1_star < 0.0);
  CHECK(s2.x1_star > s2.x1_plus);
  CHECK(s2.S_plus < sc.S_s);
  // all three inequalities on a dense sweep of [x1_star, 0] and beyond
  for (int j = 0; j <= 4000; ++j) {
    const double x1 = s2.x1_star + (5.0 - s2.x1_star) * j / 4000.0;
    const double e = std::exp(x1);
    const double mu = growth_rate(sc.growth, sc.S_i * e / (sc.c + e));
    const double unc = sc.a * sc.c * sc.S_s / (sc.c + e) * std::max(0.0, 1.0 - e);
    CHECK(unc <= s2.p);
    CHECK(sc.K * mu - sc.m >= s2.p);
    CHECK(mu - sc.b >= 2.0 * s2.p);
  }
}

TEST_CASE("S2 failure names the violated inequality") {
  // maintenance close to K(D_s + b) makes K mu - m negative near S_i
  const double Ds = growth_rate(kHaldane, 506.72) - 0.1;
  const auto sc = scenario_from_substrate(600.0, 2.0, 0.1, 0.9 * 2.0 * (Ds + 0.1), 506.72, kHaldane);
  try {
    check_S2(sc);
    FAIL("expected S2 failure");
  } catch (const S2Infeasible& e) {
    CHECK(e.inequality() == "K*mu(S) - m >= p");
    CHECK(e.witness_S() > sc.S_s);
    CHECK(std::string(e.what()).find("S2") != std::string::npos);
  }
}

TEST_CASE("uncertainty shifts the growth rate by at most a|S - S_s|") {
  const auto sc = demo();
  CHECK(uncertainty_term(sc, 600.0 - 1.0, 0.05, 0.0) == doctest::Approx(0.05 * (599.0 - 506.72)));
  CHECK(uncertainty_term(sc, 400.0, 0.05, 0.05) == doctest::Approx(0.0).scale(1.0));
  CHECK(uncertainty_term(sc, 400.0, 0.0, 0.05) == doctest::Approx(-0.05 * 106.72));
  const auto shifted = sc.with_uncertainty(5.0);
  CHECK(shifted.a == 5.0);
  CHECK(shifted.X_s == sc.X_s);
}
