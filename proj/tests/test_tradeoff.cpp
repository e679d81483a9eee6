#include <doctest.h>

#include <cmath>

#include "qamp/errors.hpp"
#include "qamp/tradeoff.hpp"
#include "test_support.hpp"

using namespace qamp;
using qamp::testing::kPi;

namespace {

const double kCos2Pi8 = std::cos(kPi / 8) * std::cos(kPi / 8);

CurveSpec prior_spec(double kappa, Gain g) {
  CurveSpec s;
  s.input = vmf::KnowledgePrior{kappa};
  s.g_target = g;
  return s;
}

CurveSpec fixed_spec(double theta, Gain g) {
  CurveSpec s;
  s.input = FixedTheta{theta};
  s.g_target = g;
  return s;
}

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x / v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean) / v.size();
  return var;
}

}  // namespace

TEST_CASE("infinite-gain curve is flat on the equator") {
  const auto curve = infinite_gain_curve(kPi / 2, 0.5, 201);
  REQUIRE(curve.size() == 201);
  std::vector<double> p;
  for (const auto& c : curve) {
    CHECK(c.reachable);
    CHECK(c.gain.is_infinite());
    p.push_back(c.p);
    CHECK(c.p == doctest::Approx(0.25).epsilon(1e-14));
  }
  CHECK(variance(p) < 1e-12);
}

TEST_CASE("infinite-gain curve endpoints at theta = pi/4") {
  const auto curve = infinite_gain_curve(kPi / 4, 0.5, 101);
  const auto& first = curve.front();
  const auto& last = curve.back();
  CHECK(first.chi == 0.0);
  CHECK(*first.f == doctest::Approx(kCos2Pi8).epsilon(1e-14));
  CHECK(first.p == doctest::Approx(0.5 * kCos2Pi8).epsilon(1e-14));
  CHECK(*last.f == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(last.p == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::abs(first.p / last.p - (1 + 1 / std::sqrt(2.0))) < 1e-3);
  CHECK(std::abs(first.p / last.p - 1.70710678) < 1e-8);
}

TEST_CASE("infinite-gain curve at the pole") {
  for (const auto& c : infinite_gain_curve(0.0, 0.5, 51)) {
    CHECK(*c.f == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.p == doctest::Approx(0.5 * std::cos(c.chi) * std::cos(c.chi)).epsilon(1e-14));
  }
  // chi = 0 loses the V component entirely
  const auto south = infinite_gain_curve(kPi, 0.5, 11);
  CHECK_FALSE(south.front().reachable);
  CHECK(south.back().reachable);
}

TEST_CASE("uniform prior at infinite gain is state independent") {
  auto spec = prior_spec(0.0, Gain::infinite());
  const auto curve = averaged_tradeoff_curve(spec);
  REQUIRE(curve.size() == 200);
  std::vector<double> p;
  for (const auto& c : curve) {
    if (!c.reachable) continue;
    p.push_back(c.p);
    CHECK(c.r == 0.0);
    CHECK(c.p == doctest::Approx(0.25).epsilon(1e-14));
  }
  CHECK(p.size() == 200);
  CHECK(variance(p) < 1e-12);
  CHECK(merit(spec).merit == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("curve points re-evaluate through the prior averages") {
  for (double kappa : {1.0, 3.0}) {
    for (double g_db : {3.0, 10.0}) {
      CAPTURE(kappa);
      CAPTURE(g_db);
      auto spec = prior_spec(kappa, Gain::from_db(g_db));
      spec.f_points = 40;
      const auto curve = averaged_tradeoff_curve(spec);
      REQUIRE(curve.size() == 40);
      int reachable = 0;
      for (const auto& c : curve) {
        if (!c.reachable) continue;
        ++reachable;
        const auto m = vmf::average_metrics({c.chi, c.r}, {kappa}, 0.5, {}, FeedForward::On);
        CHECK(std::abs(m.avg_p - c.p) < 1e-12);
        CHECK(std::abs(*m.avg_f - c.f_target) <= 5e-4);
        CHECK(std::abs(m.avg_g.db() - g_db) < 1e-9);
      }
      CHECK(reachable >= 38);
    }
  }
}

TEST_CASE("default fidelity grid runs from the threshold to 1") {
  PriorAveragedModel model({3.0}, 0.5, FeedForward::On);
  const auto grid = default_f_grid(model, Gain::from_db(10), 200);
  REQUIRE(grid.size() == 200);
  CHECK(grid.back() == 1.0);
  const auto t = threshold(model, Gain::from_db(10));
  CHECK(grid.front() == *t.f_min);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("concentrated prior: the most probable setting has unit fidelity") {
  for (double g_db : {3.0, 10.0, 20.0}) {
    CAPTURE(g_db);
    const auto best = max_probability_point(prior_spec(1e3, Gain::from_db(g_db)));
    REQUIRE(best.reachable);
    CHECK(*best.f >= 0.999);
  }
}

TEST_CASE("kappa = 3 at 10 dB has an interior maximum") {
  auto spec = prior_spec(3.0, Gain::from_db(10));
  const auto curve = averaged_tradeoff_curve(spec);
  std::size_t arg = 0;
  double lo = 1.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    REQUIRE(curve[i].reachable);
    if (curve[i].p > curve[arg].p) arg = i;
    lo = std::min(lo, curve[i].p);
  }
  CHECK(curve[arg].p - lo > 1e-3);
  CHECK(arg > 0);
  CHECK(arg + 1 < curve.size());
  const auto top = max_probability_point(spec);
  CHECK(top.p >= curve[arg].p - 1e-12);
  CHECK(std::abs(*top.f - curve[arg].f_target) < 2 * (curve[1].f_target - curve[0].f_target));
}

TEST_CASE("merit at a fixed state and infinite gain matches a direct chi scan") {
  const double theta = kPi / 4;
  const double c2 = std::cos(theta / 2) * std::cos(theta / 2);
  const double s2 = 1 - c2;
  double best = 0.0;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const double chi = kPi / 4 * i / n;
    const double den = std::cos(chi) * std::cos(chi) * c2 + std::sin(chi) * std::sin(chi) * s2;
    const double ov = std::cos(chi) * c2 + std::sin(chi) * s2;
    best = std::max(best, 0.5 * den * (ov * ov / den));
  }
  const double expected = best / 0.25;
  const auto m = merit(fixed_spec(theta, Gain::infinite()));
  CHECK(m.merit == doctest::Approx(expected).epsilon(1e-9));
  CHECK(m.merit >= 2 * kCos2Pi8 * kCos2Pi8 - 1e-12);
  // max over chi of (c2 cos chi + s2 sin chi)^2 is c2^2 + s2^2 by Cauchy-Schwarz
  CHECK(m.merit == doctest::Approx(2 * (c2 * c2 + s2 * s2)).epsilon(1e-10));
  CHECK(m.merit == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("merit is at least 1") {
  for (double kappa : {0.0, 1.0, 3.0, 10.0}) {
    for (Gain g : {Gain::from_db(3), Gain::from_db(10), Gain::from_db(20), Gain::infinite()}) {
      CAPTURE(kappa);
      CAPTURE(g.to_string());
      const auto m = merit(prior_spec(kappa, g));
      CHECK(m.merit >= 1.0 - 1e-12);
      CHECK(*m.unit.f >= 1.0 - kUnitFidelityTol);
    }
  }
}

TEST_CASE("merit needs a reachable unit fidelity") {
  auto spec = prior_spec(1.0, Gain::from_db(3));
  spec.beta_sq = 0.0;
  CHECK_THROWS_AS(merit(spec), UnreachableUnitFidelity);
}

TEST_CASE("fixed-state finite-gain curve against a brute-force grid") {
  const double theta = kPi / 3;
  auto spec = fixed_spec(theta, Gain::from_db(10));
  spec.f_grid = {0.9, 0.95, 0.99};
  const auto curve = averaged_tradeoff_curve(spec);
  for (const auto& c : curve) {
    REQUIRE(c.reachable);
    double best = -1.0;
    const int n = 1200;
    for (int i = 0; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        const auto m = qamp::testing::reference_ff(kPi / 4 * i / n, static_cast<double>(j) / n, theta, 0.5);
        if (m.fidelity < 0 || std::abs(10 * std::log10(m.gain) - 10) > 0.02) continue;
        if (std::abs(m.fidelity - c.f_target) > 5e-4) continue;
        best = std::max(best, m.p);
      }
    }
    CAPTURE(c.f_target);
    REQUIRE(best > 0);
    // P is linear in G at fixed u, so the band allows about 0.5% more
    CHECK(c.p == doctest::Approx(best).epsilon(6e-3));
  }
}

TEST_CASE("lower-bound variant never does worse than equality") {
  auto eq = prior_spec(1.0, Gain::from_db(6));
  eq.f_grid = {0.85, 0.9, 0.95};
  eq.chi_steps = 121;
  eq.r_steps = 121;
  auto lb = eq;
  lb.constraints.gain_constraint = GainConstraint::LowerBound;
  const auto a = averaged_tradeoff_curve(eq);
  const auto b = averaged_tradeoff_curve(lb);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].reachable) continue;
    REQUIRE(b[i].reachable);
    CHECK(b[i].p >= a[i].p - 1e-12);
  }
}

TEST_CASE("curve spec validation") {
  auto s = prior_spec(1.0, Gain::infinite());
  s.f_grid = {0.9, 0.8};
  CHECK_THROWS_AS(averaged_tradeoff_curve(s), InvalidParameter);
  s.f_grid = {0.0, 0.5};
  CHECK_THROWS_AS(averaged_tradeoff_curve(s), InvalidParameter);
  s = prior_spec(-1.0, Gain::infinite());
  CHECK_THROWS_AS(averaged_tradeoff_curve(s), InvalidParameter);
}
