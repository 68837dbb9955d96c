#include <doctest.h>

#include <cmath>
#include <random>

#include "rclf/certify.hpp"
#include "rclf/chemostat.hpp"
#include "rclf/error.hpp"
#include "rclf/feedback.hpp"

using namespace rclf;

namespace {

const GrowthModel kHaldane = GrowthModel::haldane(75.0, 100.0, 0.025);

ChemostatScenario demo() {
  return scenario_from_substrate(600.0, 2.0, 0.1, 0.1, 506.72, kHaldane, 0.05);
}

const PsiSpec kPsi{5.0};
const LSpec kL{1.0};

GridSpec coarse() {
  GridSpec g;
  g.n1 = g.n2 = 120;
  return g;
}

}  // namespace

TEST_CASE("synthesized constants re-check cleanly") {
  const auto sc = demo();
  const auto s2 = check_S2(sc);
  const auto k = synthesize_rclf_constants(sc, s2);
  CHECK(k.delta > 0.0);
  CHECK(k.delta < k.p);
  CHECK(k.beta_min < 0.0);
  CHECK(k.beta_max > 0.0);
  CHECK(k.M >= k.A);
  const auto checks = recheck_rclf_constants(sc, s2, k);
  CHECK(checks.size() >= 8);
  for (const auto& c : checks) {
    INFO(c.name);
    CHECK(c.passed);
    CHECK(c.worst_slack >= 0.0);
  }
  // corrupting a constant is caught
  auto bad = k;
  bad.delta = 2.0 * k.p;
  bool any_failed = false;
  for (const auto& c : recheck_rclf_constants(sc, s2, bad)) any_failed = any_failed || !c.passed;
  CHECK(any_failed);
}

TEST_CASE("lyapunov gradient matches finite differences") {
  const auto sc = demo();
  const auto k = synthesize_rclf_constants(sc, check_S2(sc));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  for (int i = 0; i < 300; ++i) {
    const double x1 = coord(rng), x2 = coord(rng);
    double g[2];
    lyapunov_gradient(k, x1, x2, g);
    const double h = 1e-6;
    const double d1 = (lyapunov_value(k, x1 + h, x2) - lyapunov_value(k, x1 - h, x2)) / (2 * h);
    // central differences are exact on the quadratic part, so a wide step limits cancellation
    const double h2 = 1e-2;
    const double d2 = (lyapunov_value(k, x1, x2 + h2) - lyapunov_value(k, x1, x2 - h2)) / (2 * h2);
    CHECK(g[0] == doctest::Approx(d1).epsilon(1e-5).scale(1.0));
    CHECK(g[1] == doctest::Approx(d2).epsilon(1e-5).scale(1.0));
  }
  CHECK(lyapunov_value(k, 0.0, 0.0) == 0.0);
  CHECK(lyapunov_value(k, 1.0, 0.0) > 0.0);
  CHECK(lyapunov_value(k, -1.0, 0.0) > 0.0);
}

TEST_CASE("absorbing function gradient matches finite differences") {
  const auto sc = demo();
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  for (int i = 0; i < 300; ++i) {
    const double x1 = coord(rng), x2 = coord(rng);
    double g[2];
    absorbing_W_gradient(sc, x1, x2, g);
    const double h = 1e-6;
    const double d1 = (absorbing_W(sc, x1 + h, x2) - absorbing_W(sc, x1 - h, x2)) / (2 * h);
    const double d2 = (absorbing_W(sc, x1, x2 + h) - absorbing_W(sc, x1, x2 - h)) / (2 * h);
    CHECK(g[0] == doctest::Approx(d1).epsilon(1e-5).scale(1.0));
    CHECK(g[1] == doctest::Approx(d2).epsilon(1e-5).scale(1.0));
  }
  CHECK(absorbing_W(sc, 0.0, 0.0) >= 1.0);
}

TEST_CASE("level radius bounds every sublevel set") {
  const auto sc = demo();
  const auto radius = absorbing_level_radius(sc.c);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  for (int i = 0; i < 20000; ++i) {
    const double x1 = coord(rng), x2 = coord(rng);
    const double w = absorbing_W(sc, x1, x2);
    REQUIRE(std::hypot(x1, x2) <= radius(w) * (1.0 + 1e-9));
  }
  CHECK(radius(1.0) == 0.0);
}

TEST_CASE("relaxed conditions hold on the demo scenario") {
  const auto sc = demo();
  const auto k = synthesize_rclf_constants(sc, check_S2(sc));
  const auto cert = verify_relaxed_conditions(sc, k, kPsi, kL, coarse());
  CHECK(cert.passed());
  CHECK(cert.eps_hat == doctest::Approx(-0.5 * k.x1_star));
  const double expected = kL.l0 * (sc.c * std::exp(-0.5 * k.x1_star) + 1.0) * kPsi(0.5 * k.x1_star);
  CHECK(cert.delta0 == doctest::Approx(expected).epsilon(1e-14));
  CHECK(relaxed_decrement(sc, kPsi, kL, k.x1_star) == doctest::Approx(expected).epsilon(1e-14));
  for (const auto& r : cert.reports) {
    INFO(r.region << "/" << r.check);
    CHECK(r.passed);
    CHECK(r.points > 0);
    CHECK(r.window.size() == 4);
  }
}

TEST_CASE("rclf law satisfies the derivative conditions") {
  const auto sc = demo();
  const auto k = synthesize_rclf_constants(sc, check_S2(sc));
  const RclfFeedbackParams prm{k.x1_star, k.M, 1.0};
  const auto reports = verify_rclf_derivative(
      sc, k, [&](double x1, double x2) { return rclf_feedback(sc, prm, x1, x2); }, coarse());
  CHECK(reports.size() == 4);
  for (const auto& r : reports) {
    INFO(r.region << " worst " << r.worst_margin);
    CHECK(r.passed);
  }
}

TEST_CASE("a law without the recovery term fails the grid check") {
  const auto sc = demo();
  const auto k = synthesize_rclf_constants(sc, check_S2(sc));
  // u = -D_s: no dilution at all, biomass cannot be driven back
  const auto reports =
      verify_rclf_derivative(sc, k, [&](double, double) { return -sc.D_s; }, coarse());
  bool any_failed = false;
  for (const auto& r : reports)
    if (!r.passed) {
      any_failed = true;
      CHECK(r.worst_margin > 0.0);
      CHECK(r.witness.size() == 2);
    }
  CHECK(any_failed);
}

TEST_CASE("reach time bound") {
  const auto radius = absorbing_level_radius(0.2);
  const auto inside = reach_time_bound(0.05, 0.1, 0.5, 0.3, 2.0, radius);
  CHECK(inside.T == 0.0);
  CHECK(inside.B == 2.0);
  const auto outside = reach_time_bound(2.1, 0.1, 0.5, 0.3, 2.0, radius);
  CHECK(outside.T == doctest::Approx(4.0));
  CHECK(outside.B == doctest::Approx(2.0 * std::exp(1.2)));
  CHECK(outside.G_bound >= radius(outside.B));
  CHECK(outside.G_bound <= radius(outside.B + 1.0));
  CHECK_THROWS_AS(reach_time_bound(1.0, 0.1, 0.0, 0.3, 2.0, radius), InvalidArgument);
}

TEST_CASE("planar relaxed and constrained-input problems pass") {
  for (const auto& r : verify_relaxed_clf_conditions(planar_relaxed_problem(101))) {
    INFO(r.region << "/" << r.check);
    CHECK(r.passed);
  }
  for (const auto& r : verify_constrained_input_conditions(planar_constrained_problem(101))) {
    INFO(r.region << "/" << r.check);
    CHECK(r.passed);
  }
}

TEST_CASE("planar problem with too large a decrement fails") {
  auto pb = planar_relaxed_problem(101);
  pb.delta = [](double) { return 2.0; };
  bool any_failed = false;
  for (const auto& r : verify_relaxed_clf_conditions(pb)) any_failed = any_failed || !r.passed;
  CHECK(any_failed);

  auto cp = planar_constrained_problem(101);
  cp.delta = 0.6;
  any_failed = false;
  for (const auto& r : verify_constrained_input_conditions(cp)) any_failed = any_failed || !r.passed;
  CHECK(any_failed);
  cp.eps = 1.5;
  CHECK_THROWS_AS(verify_constrained_input_conditions(cp), InvalidArgument);
}
