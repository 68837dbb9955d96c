#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "rclf/certify.hpp"
#include "rclf/chemostat.hpp"
#include "rclf/error.hpp"
#include "rclf/feedback.hpp"

using namespace rclf;

namespace {

const GrowthModel kHaldane = GrowthModel::haldane(75.0, 100.0, 0.025);

ChemostatScenario demo(double a = 0.05, double b = 0.1, double m = 0.1) {
  return scenario_from_substrate(600.0, 2.0, b, m, 506.72, kHaldane, a);
}

const PsiSpec kPsi{5.0};
const LSpec kL{1.0};

}  // namespace

TEST_CASE("every chemostat law vanishes at the origin") {
  const auto sc = demo();
  CHECK(std::abs(relaxed_feedback(sc, kPsi, kL, 0.0, 0.0)) < 1e-12);
  const auto k = synthesize_rclf_constants(sc, check_S2(sc));
  const RclfFeedbackParams prm{k.x1_star, k.M, 1.0};
  CHECK(std::abs(rclf_feedback(sc, prm, 0.0, 0.0)) < 1e-12);
  const auto nominal = demo(0.0, 0.0, 0.0);
  ClassicalFeedback law(nominal, mailleret_phi(nominal));
  CHECK(std::abs(law(0.0, 0.0)) < 1e-12);
}

TEST_CASE("chemostat laws respect non-negative dilution") {
  const auto sc = demo();
  const auto k = synthesize_rclf_constants(sc, check_S2(sc));
  const RclfFeedbackParams prm{k.x1_star, k.M, 1.0};
  ClassicalFeedback classical(sc, mailleret_phi(sc));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double x1 = coord(rng), x2 = coord(rng);
    REQUIRE(relaxed_feedback(sc, kPsi, kL, x1, x2) >= -sc.D_s);
    REQUIRE(rclf_feedback(sc, prm, x1, x2) >= -sc.D_s);
    REQUIRE(classical(x1, x2) >= -sc.D_s);
  }
}

TEST_CASE("relaxed law in physical coordinates agrees with the log form") {
  const auto sc = demo();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int i = 0; i < 500; ++i) {
    const double S = sc.S_i * unit(rng);
    const double X = 3.0 * sc.X_s * unit(rng);
    const auto t = to_transformed(sc, X, S);
    const double D = sc.D_s + relaxed_feedback(sc, kPsi, kL, t.x1, t.x2);
    CHECK(relaxed_dilution_physical(sc, kPsi, kL, X, S) == doctest::Approx(D).epsilon(1e-11));
  }
}

TEST_CASE("relaxed law ignores the uncertainty level bit for bit") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  const auto base = demo(0.0);
  for (int i = 0; i < 200; ++i) {
    const double x1 = coord(rng), x2 = coord(rng);
    const double ref = relaxed_feedback(base, kPsi, kL, x1, x2);
    for (double a : {0.05, 0.5, 5.0}) {
      const double v = relaxed_feedback(base.with_uncertainty(a), kPsi, kL, x1, x2);
      CHECK(std::memcmp(&v, &ref, sizeof v) == 0);
    }
  }
}

TEST_CASE("mailleret law gives D = mu(S) X / X_s") {
  const auto sc = demo(0.0, 0.0, 0.0);
  ClassicalFeedback law(sc, mailleret_phi(sc));
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int i = 0; i < 500; ++i) {
    const double S = sc.S_i * unit(rng);
    const double X = 3.0 * sc.X_s * unit(rng);
    const auto t = to_transformed(sc, X, S);
    const double D = sc.D_s + law(t.x1, t.x2);
    CHECK(D == doctest::Approx(growth_rate(sc.growth, S) * X / sc.X_s).epsilon(1e-11));
  }
}

TEST_CASE("classical law checks its shaping function") {
  const auto sc = demo();
  CHECK_THROWS_AS(ClassicalFeedback(sc, [](double) { return 2.0; }), InvalidArgument);
  CHECK_THROWS_AS(ClassicalFeedback(sc, [](double x) { return 1.0 + x; }), InvalidArgument);
  CHECK_THROWS_AS(ClassicalFeedback(sc, mailleret_phi(sc), [](double, double) { return 1.0; }),
                  InvalidArgument);
  CHECK_NOTHROW(ClassicalFeedback(sc, mailleret_phi(sc),
                                  [](double x1, double) { return x1 < 0.0 ? -x1 : 0.0; }));
}

TEST_CASE("rclf extra term dominates its lower bound below x1_star") {
  const auto sc = demo();
  const auto k = synthesize_rclf_constants(sc, check_S2(sc));
  const RclfFeedbackParams prm{k.x1_star, k.M, 1.0};
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double x1 = k.x1_star - 4.0 * i / 200.0;
      const double x2 = -5.0 + 10.0 * j / 40.0;
      CHECK(rclf_q(sc, prm, x1, x2) >= rclf_q_lower_bound(sc, prm, x1, x2));
    }
  CHECK(rclf_q(sc, prm, 0.5, 1.0) == 0.0);
  CHECK(rclf_q(sc, prm, 0.0, -3.0) == 0.0);
  CHECK_THROWS_AS(RclfFeedbackParams({0.5, 1.0, 1.0}).validate(), InvalidArgument);
}

TEST_CASE("constrained quadratic law is bounded below") {
  const auto sys = planar_constrained_system();
  GradientFunction V{[](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
                     [](std::span<const double> x, std::span<double> g) {
                       g[0] = x[0];
                       g[1] = x[1];
                     }};
  const StateFunction one = [](std::span<const double>) { return 1.0; };
  const StateVector a{0.0, 3.0}, b{0.0, -3.0}, c{2.0, 0.4};
  CHECK(constrained_quadratic_feedback(sys, V, one, 1.0, a) == -1.0);
  CHECK(constrained_quadratic_feedback(sys, V, one, 1.0, b) == 3.0);
  CHECK(constrained_quadratic_feedback(sys, V, one, 1.0, c) == -0.4);
  CHECK_THROWS_AS(constrained_quadratic_feedback(sys, V, one, 0.0, a), InvalidArgument);
}

TEST_CASE("triangular benchmark satisfies its growth and gain bounds") {
  const auto spec = make_triangular_benchmark(3, 0.01, 0.02, 1.0, 1.2, 1.0);
  CHECK_NOTHROW(spec.validate(5000, 9));
  CHECK(spec.box.dim() == 6);
  TriangularSystemSpec bad = spec;
  bad.f = [](std::size_t, std::span<const double>, std::span<const double> x) { return x[0]; };
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(make_triangular_benchmark(2, 0.01, 0.01, 1.0, 1.2, 2.0), InvalidArgument);
}

TEST_CASE("backstepping gains meet both lower bounds with margin 1.1") {
  const auto spec = make_triangular_benchmark(3, 0.005, 0.005, 1.0, 1.1, 1.0);
  BacksteppingDesign design{1.0, {{0.03, std::nullopt, 1.2}, {0.03, std::nullopt, 1.2}, {0.0, std::nullopt, 2.0}}};
  GainCertificate cert;
  const auto g = compute_backstepping_gains(spec, design, &cert);
  REQUIRE(g.a.size() == 3);
  CHECK(gain_margin(cert, spec.q, spec.L, spec.r) >= 1.1 * (1.0 - 1e-12));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(g.a[i] > cert.stages[i].a_lower);
    CHECK(g.a[i] <= cert.stages[i].eta);
  }
  // first stage: p (c~ r + q) >= mu0/2 + L
  CHECK(g.p[0] * (0.03 + 0.005) >= 1.1 * (0.5 + 0.005) * (1.0 - 1e-12));
  // second stage inherits p >= 1/c~ of the first
  CHECK(g.p[1] >= 1.1 / 0.03 * (1.0 - 1e-12));
}

TEST_CASE("backstepping law is bounded by the last amplitude and vanishes at 0") {
  const SaturatedGains g{{0.1, 0.4, 2.0}, {10.0, 30.0, 500.0}};
  const StateVector zero{0.0, 0.0, 0.0};
  CHECK(saturated_backstepping(g, zero) == 0.0);
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const StateVector x{coord(rng), coord(rng), coord(rng)};
    REQUIRE(std::abs(saturated_backstepping(g, x)) <= 2.0);
  }
  // linear regime: phi1 = -a1 p1 x1
  const StateVector tiny{1e-6, 0.0};
  const SaturatedGains g2{{0.1, 0.4}, {10.0, 30.0}};
  const double phi1 = -0.1 * 10.0 * 1e-6;
  CHECK(saturated_backstepping(g2, tiny) == doctest::Approx(-0.4 * 30.0 * (0.0 - phi1)));
}

TEST_CASE("backstepping failures name the stage") {
  const auto spec = make_triangular_benchmark(2, 0.005, 0.005, 1.0, 1.1, 1.0);
  BacksteppingDesign empty{1.0, {{0.03, 0.01, 2.0}, {0.0, std::nullopt, 2.0}}};
  CHECK_THROWS_WITH_AS(compute_backstepping_gains(spec, empty),
                       doctest::Contains("stage 1"), Infeasible);
  BacksteppingDesign zero_c{1.0, {{0.0, std::nullopt, 2.0}, {0.0, std::nullopt, 2.0}}};
  CHECK_THROWS_WITH_AS(compute_backstepping_gains(spec, zero_c),
                       doctest::Contains("stage 2"), Infeasible);
  // with q = b = c~ = 0 the decay inequality has no solution
  const auto flat = make_triangular_benchmark(1, 0.0, 0.0, 1.0, 1.0, 0.0);
  BacksteppingDesign degenerate{1.0, {{0.0, 1.0, 2.0}}};
  CHECK_THROWS_AS(compute_backstepping_gains(flat, degenerate), Infeasible);
}

TEST_CASE("smooth step") {
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  double prev = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double v = smooth_step(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
  // flat at both ends
  CHECK(smooth_step(1e-3) < 1e-100);
}

TEST_CASE("patching combiner") {
  PatchInputs in;
  in.eps = 1.0;
  in.r = 0.5;
  in.h = [](std::span<const double> x) { return x[0]; };
  in.k1 = [](std::span<const double> x) { return StateVector{1.0 + x[1]}; };
  in.k2 = [](std::span<const double> x) { return StateVector{-2.0 * x[1]}; };
  in.k3 = in.k1;
  in.k_tilde = [](std::span<const double> x) { return StateVector{x[0] - x[1]}; };

  const StateVector at_eps{1.0, 0.3};
  CHECK(patch_feedbacks(in, at_eps) == in.k1(at_eps));
  const StateVector mid{0.5, -0.7};
  CHECK(patch_feedbacks(in, mid) == in.k1(mid));
  const StateVector inner{-0.2, 0.1};
  CHECK(patch_feedbacks(in, inner) == in.k_tilde(inner));
  const StateVector outer{-3.0, 2.0};
  CHECK(patch_feedbacks(in, outer) == in.k2(outer));

  // the output is a convex combination inside a band
  in.k3 = [](std::span<const double>) { return StateVector{5.0}; };
  const StateVector band{0.7, 0.0};
  const double u = patch_feedbacks(in, band)[0];
  CHECK(u >= 1.0);
  CHECK(u <= 5.0);
  CHECK(u == doctest::Approx(5.0 + (1.0 - 5.0) * smooth_step(0.5)));

  in.k2 = [](std::span<const double>) { return StateVector{std::nan("")}; };
  CHECK_THROWS_AS(patch_feedbacks(in, outer), DomainError);
  in.k1 = nullptr;
  CHECK_THROWS_AS(patch_feedbacks(in, outer), InvalidArgument);
}
