#include <cmath>

#include <doctest.h>

#include "gamepop/errors.hpp"
#include "gamepop/novelty.hpp"

using namespace gamepop;

namespace {

// near-constant population: logistic with the inflection far in the past
LogisticParams constant_pop(double level) { return LogisticParams(level, 1.0, -50.0); }

// 1000 content units delivered over the first day, nothing after
ContentSchedule launch_stock_1000() {
  return ContentSchedule({{0.0, 1000.0}, {1.0, 0.0}}, 1000.0);
}

}  // namespace

TEST_CASE("content schedule") {
  SUBCASE("rectangle integral") {
    const ContentSchedule schedule({{0.0, 10.0}}, 1000.0);
    CHECK(cumulative_content(schedule, 50.0) == doctest::Approx(500.0));
    CHECK(cumulative_content(schedule, 200.0) == 1000.0);  // clamped at the cap
    CHECK(cumulative_content(schedule, 0.0) == 0.0);
  }
  SUBCASE("an infinite cap is rejected") {
    CHECK_THROWS_AS(
        ContentSchedule({{0.0, 10.0}, {50.0, 2.0}}, std::numeric_limits<double>::infinity()),
        ValidationError);
  }
  SUBCASE("piecewise rates") {
    const ContentSchedule schedule({{0.0, 10.0}, {50.0, 2.0}}, 1e6);
    CHECK(cumulative_content(schedule, 60.0) == doctest::Approx(500.0 + 20.0));
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(ContentSchedule({{0.0, -1.0}}, 100.0), ValidationError);
    CHECK_THROWS_AS(ContentSchedule({{5.0, 1.0}, {5.0, 2.0}}, 100.0), ValidationError);
    CHECK_THROWS_AS(ContentSchedule({{0.0, 1.0}}, 0.0), ValidationError);
  }
}

TEST_CASE("exposure integral") {
  std::vector<std::pair<double, double>> constant;
  for (int i = 0; i <= 100; ++i) constant.emplace_back(i, 10.0);
  CHECK(exposure(constant, 1.0, 100.0) == doctest::Approx(1000.0));

  std::vector<std::pair<double, double>> empty_world = {{0, 0}, {50, 0}, {100, 0}};
  CHECK(exposure(empty_world, 1.0, 100.0) == 0.0);

  std::vector<std::pair<double, double>> ramp = {{0, 0}, {10, 100}};
  CHECK(exposure(ramp, 1.0, 10.0) == doctest::Approx(500.0));  // triangle area
  CHECK(exposure(ramp, 1.0, 5.0) == doctest::Approx(125.0));

  CHECK_THROWS_AS(exposure(ramp, 1.0, 11.0), ValidationError);
}

TEST_CASE("novelty and the coupled decay rate") {
  CHECK(novelty(100, 1.0, 40) == 60);
  CHECK(novelty(100, 0.5, 200) == 0);
  CHECK(novelty(100, 1.0, 150) == -50);

  const NoveltyParams params(1.0, 1.0, 0.1, 0.05);
  CHECK(coupled_decay_rate(params, 5.0) == 0.0);
  CHECK(coupled_decay_rate(params, 0.0) == doctest::Approx(0.1));
  CHECK(coupled_decay_rate(params, -10.0) == doctest::Approx(0.15));
}

TEST_CASE("lifecycle simulation: analytic exhaustion oracle") {
  // constant pop 10, h_bar 1, eta 1, 1000 units of launch content:
  // novelty root of 1000 - 10 t = 0 at t = 100
  const NoveltyParams nparams(1.0, 1.0, 0.1, 0.05);
  const auto result = simulate_lifecycle(constant_pop(10.0), launch_stock_1000(), nparams,
                                         0.5, std::nullopt, 0.05, 150.0);
  REQUIRE(result.t_novelty_exhaustion.has_value());
  CHECK(std::abs(*result.t_novelty_exhaustion - 100.0) < 1e-3);
}

TEST_CASE("lifecycle simulation: pure-exponential tail after exhaustion") {
  // kappa tiny: decay is effectively exponential at mu0 = 0.1, so the
  // crossing below phi = p_peak / 2 lags exhaustion by one half-life
  const NoveltyParams nparams(1.0, 1.0, 0.1, 1e-12);
  const auto result = simulate_lifecycle(constant_pop(10.0), launch_stock_1000(), nparams,
                                         5.0, std::nullopt, 0.05, 150.0);
  REQUIRE(result.t_novelty_exhaustion.has_value());
  REQUIRE(result.t_star.has_value());
  CHECK(result.terminal_reason == TerminalReason::phi_crossing);
  const double expected = *result.t_novelty_exhaustion + std::log(2.0) / 0.1;
  CHECK(std::abs(*result.t_star - expected) < 1e-3);
}

TEST_CASE("lifecycle simulation: service horizon terminates the run") {
  // plentiful content, so novelty is positive through day 30
  const ContentSchedule schedule({{0.0, 1e6}}, 1e9);
  const NoveltyParams nparams(1.0, 1.0, 0.1, 0.05);
  const auto result = simulate_lifecycle(constant_pop(100.0), schedule, nparams, 5.0,
                                         30.0, 0.02, 365.0);
  REQUIRE(result.t_star.has_value());
  CHECK(*result.t_star == 30.0);
  CHECK(result.terminal_reason == TerminalReason::service_horizon);
  CHECK_FALSE(result.t_novelty_exhaustion.has_value());
}

TEST_CASE("lifecycle simulation: guards and the never-viable flag") {
  const NoveltyParams nparams(1.0, 1.0, 0.1, 0.05);
  CHECK_THROWS_AS(simulate_lifecycle(constant_pop(10.0), launch_stock_1000(), nparams, 1.0,
                                     std::nullopt, 10.0, 5.0),
                  ValidationError);  // step > horizon
  const auto result = simulate_lifecycle(constant_pop(10.0), launch_stock_1000(), nparams,
                                         20.0, std::nullopt, 0.1, 50.0);
  CHECK(result.never_viable);
  CHECK(result.t_star == 0.0);
}

TEST_CASE("lifecycle simulation invariants") {
  const NoveltyParams nparams(0.8, 1.3, 0.12, 0.01);
  const LogisticParams growth(120.0, 0.4, 8.0);
  const auto result = simulate_lifecycle(growth, ContentSchedule({{0.0, 40.0}, {30.0, 5.0}},
                                                                 2000.0),
                                         nparams, 9.0, std::nullopt, 0.05, 400.0);
  REQUIRE(result.trajectory.size() > 10);
  REQUIRE(result.t_novelty_exhaustion.has_value());

  double prev_exposure = -1.0;
  for (const auto& s : result.trajectory) {
    CHECK(s.exposure >= prev_exposure);  // monotonic exposure
    prev_exposure = s.exposure;
    CHECK(s.novelty == doctest::Approx(s.content - nparams.eta * s.exposure).epsilon(1e-12));
    if (s.novelty > 0)
      CHECK(s.mu == 0.0);
    else
      CHECK(s.mu ==
            doctest::Approx(nparams.mu0 * (1.0 + nparams.kappa * std::abs(s.novelty))));
  }

  // pop rises while novelty lasts and falls afterwards
  const double t_x = *result.t_novelty_exhaustion;
  for (std::size_t i = 1; i < result.trajectory.size(); ++i) {
    const auto& a = result.trajectory[i - 1];
    const auto& b = result.trajectory[i];
    if (b.t <= t_x) CHECK(b.pop >= a.pop - 1e-9);
    if (a.t >= t_x) CHECK(b.pop <= a.pop + 1e-9);
  }

  // exposure floor bound: pop >= pop(0) during growth, so E(t) >= pop(0) h t
  const double pop0 = result.trajectory.front().pop;
  for (const auto& s : result.trajectory) {
    if (s.t > t_x) break;
    CHECK(s.exposure >= pop0 * nparams.h_bar * s.t - 1e-6);
  }

  // exhaustion arrives no later than cap / (eta P_min h_min)
  CHECK(t_x <= 2000.0 / (nparams.eta * pop0 * nparams.h_bar) + 1e-3);
}

TEST_CASE("crossing times are finite under either sufficient condition") {
  const NoveltyParams nparams(1.0, 1.0, 0.2, 0.02);
  SUBCASE("finite service horizon") {
    const auto r = simulate_lifecycle(constant_pop(50.0), ContentSchedule({{0.0, 1e5}}, 1e8),
                                      nparams, 10.0, 90.0, 0.05, 1000.0);
    REQUIRE(r.t_star.has_value());
    CHECK(std::isfinite(*r.t_star));
  }
  SUBCASE("finite content cap with positive mu0 and kappa") {
    const auto r = simulate_lifecycle(constant_pop(50.0), ContentSchedule({{0.0, 100.0}}, 500.0),
                                      nparams, 10.0, std::nullopt, 0.05, 1000.0);
    REQUIRE(r.t_star.has_value());
    CHECK(std::isfinite(*r.t_star));
    CHECK(r.terminal_reason == TerminalReason::phi_crossing);
  }
}

TEST_CASE("event times are step-size stable") {
  const NoveltyParams nparams(1.0, 1.0, 0.1, 0.03);
  const auto coarse = simulate_lifecycle(constant_pop(10.0), launch_stock_1000(), nparams, 5.0,
                                         std::nullopt, 0.04, 150.0);
  const auto fine = simulate_lifecycle(constant_pop(10.0), launch_stock_1000(), nparams, 5.0,
                                       std::nullopt, 0.02, 150.0);
  REQUIRE(coarse.t_star.has_value());
  REQUIRE(fine.t_star.has_value());
  CHECK(std::abs(*coarse.t_novelty_exhaustion - *fine.t_novelty_exhaustion) < 1e-4);
  CHECK(std::abs(*coarse.t_star - *fine.t_star) < 1e-4);
}
