#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qamp/amplifier.hpp"
#include "qamp/errors.hpp"
#include "test_support.hpp"

using namespace qamp;
using qamp::testing::kPi;
using qamp::testing::RandomDomain;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

// Reference point used by several worked examples: chi = pi/6, r = 1/sqrt2,
// so 2r^2 - 1 = 0 and x_pm = pm r^2 sin chi, y_pm = pm r^2 cos chi.
const AmplifierParams kMid{kPi / 6, kInvSqrt2};

SignalState balanced(double theta, double phi = 0.0) {
  return SignalState::from_populations(0.5, theta, phi);
}

}  // namespace

TEST_SUITE("xy_coefficients") {
  TEST_CASE("infinite-gain corner r = 0") {
    auto xy = xy_coefficients({kPi / 4, 0.0});
    CHECK(xy.x_plus == doctest::Approx(-std::cos(kPi / 4)).epsilon(1e-15));
    CHECK(xy.x_minus == doctest::Approx(-std::cos(kPi / 4)).epsilon(1e-15));
    CHECK(xy.y_plus == doctest::Approx(-std::sin(kPi / 4)).epsilon(1e-15));
    CHECK(xy.y_minus == doctest::Approx(-std::sin(kPi / 4)).epsilon(1e-15));
  }

  TEST_CASE("identity corner chi = 0, r = 1") {
    auto xy = xy_coefficients({0.0, 1.0});
    CHECK(xy.x_plus == 1.0);
    CHECK(xy.x_minus == 1.0);
    CHECK(xy.y_plus == 1.0);
    CHECK(xy.y_minus == -1.0);
  }

  TEST_CASE("balanced reflectivity") {
    auto xy = xy_coefficients(kMid);
    CHECK(xy.x_plus == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(xy.x_minus == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(xy.y_plus == doctest::Approx(kSqrt3 / 4).epsilon(1e-14));
    CHECK(xy.y_minus == doctest::Approx(-kSqrt3 / 4).epsilon(1e-14));
  }

  TEST_CASE("sum rules hold everywhere") {
    RandomDomain rnd(11);
    for (int i = 0; i < 1000; ++i) {
      const auto p = rnd.params();
      const auto xy = xy_coefficients(p);
      const double k = 2 * p.r * p.r - 1;
      CHECK(std::abs(xy.x_plus + xy.x_minus - 2 * k * std::cos(p.chi)) < 1e-14);
      CHECK(std::abs(xy.y_plus + xy.y_minus - 2 * k * std::sin(p.chi)) < 1e-14);
    }
  }
}

TEST_SUITE("branch_states") {
  TEST_CASE("vacuum signal at chi = pi/4 heralds only the DD/AA branch") {
    auto [out1, out2] = branch_states(SignalState{}, {kPi / 4, kInvSqrt2});
    CHECK(std::abs(out1.vac - Complex(0.5)) < 1e-15);
    CHECK(std::abs(out1.h) == 0.0);
    CHECK(std::abs(out1.v) == 0.0);
    CHECK(std::abs(out2.vac) < 1e-16);
    CHECK(out1.branch == Branch::Out1);
    CHECK(out2.branch == Branch::Out2);
  }

  TEST_CASE("pure H qubit through the identity corner") {
    SignalState s;
    s.alpha = 0.0;
    s.beta = 1.0;
    auto [out1, out2] = branch_states(s, {0.0, 1.0});
    CHECK(std::abs(out1.h - Complex(0.5)) < 1e-15);
    CHECK(std::abs(out2.h - Complex(0.5)) < 1e-15);
    CHECK(out1.norm_sq() == doctest::Approx(0.25));
    CHECK(out2.norm_sq() == doctest::Approx(0.25));
  }

  TEST_CASE("balanced signal at the reference point") {
    // vac: (1/sqrt2)(1/sqrt2)(cos pi/6 -+ sin pi/6)/2 = (sqrt3 -+ 1)/8
    // h:   beta cos(pi/4) x_pm / 2 = x_pm / 4
    // v:   beta sin(pi/4) y_pm / 2 = y_pm / 4, sign flipped on Out2
    auto [out1, out2] = branch_states(balanced(kPi / 2), kMid);
    CHECK(std::abs(out1.vac - Complex((kSqrt3 + 1) / 8)) < 1e-15);
    CHECK(std::abs(out1.h - Complex(1.0 / 16)) < 1e-15);
    CHECK(std::abs(out1.v - Complex(kSqrt3 / 16)) < 1e-15);
    CHECK(std::abs(out2.vac - Complex((kSqrt3 - 1) / 8)) < 1e-15);
    CHECK(std::abs(out2.h - Complex(-1.0 / 16)) < 1e-15);
    CHECK(std::abs(out2.v - Complex(kSqrt3 / 16)) < 1e-15);
    CHECK(out2.vac.real() == doctest::Approx(0.0915063509));
    CHECK(out2.v.real() == doctest::Approx(0.1082531755));
  }
}

TEST_SUITE("filter_transmittances") {
  TEST_CASE("r = 0 needs no filtration") {
    for (double chi : {0.0, 0.3, kPi / 4}) {
      auto t = filter_transmittances({chi, 0.0});
      REQUIRE(t.defined());
      CHECK(*t.tau_h == doctest::Approx(1.0));
      CHECK(*t.tau_v == doctest::Approx(1.0));
      CHECK(t.physical);
    }
    // y_+ = -sin(chi) vanishes at chi = 0 but equals y_-, so tau_V is still 1
    CHECK_NOTHROW(feedforward_states(SignalState::from_populations(0.5, kPi / 3), {0.0, 0.0}));
  }

  TEST_CASE("reference point flips both components") {
    auto t = filter_transmittances(kMid);
    CHECK(*t.tau_h == doctest::Approx(-1.0));
    CHECK(*t.tau_v == doctest::Approx(-1.0));
    CHECK(t.physical);
  }

  TEST_CASE("amplifying filter is flagged unphysical") {
    // x_+ = (-0.5 + 0.25)/sqrt2, x_- = (-0.5 - 0.25)/sqrt2
    auto t = filter_transmittances({kPi / 4, 0.5});
    CHECK(*t.tau_h == doctest::Approx(3.0));
    CHECK(*t.tau_v == doctest::Approx(3.0));
    CHECK_FALSE(t.physical);
  }

  TEST_CASE("vanishing x_+ leaves tau_H undefined") {
    // chi = 0, r^2 = 1/2: x_+ = 2r^2 - 1 = 0 up to rounding.
    const AmplifierParams p{0.0, kInvSqrt2};
    auto t = filter_transmittances(p);
    CHECK_FALSE(t.tau_h.has_value());
    CHECK(t.tau_v.has_value());
    CHECK_FALSE(t.physical);
    CHECK_THROWS_AS(feedforward_states(balanced(kPi / 2), p), DegenerateFilter);
  }
}

TEST_SUITE("feedforward_states") {
  TEST_CASE("r = 0 reduces to the phase-flipped branch states") {
    RandomDomain rnd(5);
    for (int i = 0; i < 100; ++i) {
      const auto s = rnd.signal();
      const AmplifierParams p{rnd.uniform(0.0, kPi / 4), 0.0};
      auto [b1, b2] = branch_states(s, p);
      auto [f1, f2] = feedforward_states(s, p);
      b2.v = -b2.v;
      CHECK(qamp::testing::max_component_diff(b1, f1) < 1e-15);
      CHECK(qamp::testing::max_component_diff(b2, f2) < 1e-15);
      CHECK(f1.branch == Branch::Out1FF);
      CHECK(f2.branch == Branch::Out2FF);
    }
  }

  TEST_CASE("vacuum passes the filters untouched") {
    const AmplifierParams p{0.4, 0.6};
    auto [f1, f2] = feedforward_states(SignalState{}, p);
    CHECK(std::abs(f1.vac - Complex(0.6 * (std::cos(0.4) + std::sin(0.4)) / 2)) < 1e-15);
    CHECK(std::abs(f2.vac - Complex(0.6 * (std::cos(0.4) - std::sin(0.4)) / 2)) < 1e-15);
    CHECK(f1.qubit_norm_sq() == 0.0);
    CHECK(f2.qubit_norm_sq() == 0.0);
  }

  TEST_CASE("both branches share the qubit part") {
    auto [f1, f2] = feedforward_states(balanced(kPi / 2), kMid);
    for (const auto& f : {f1, f2}) {
      CHECK(std::abs(f.h - Complex(-1.0 / 16)) < 1e-15);
      CHECK(std::abs(f.v - Complex(-kSqrt3 / 16)) < 1e-15);
    }
  }

  TEST_CASE("phase e^{i phi} stays on the V amplitude") {
    const auto s = balanced(kPi / 3, 1.1);
    auto [f1, f2] = feedforward_states(s, {0.2, 0.3});
    const auto xy = xy_coefficients({0.2, 0.3});
    const Complex expected = kInvSqrt2 * xy.y_minus * std::sin(kPi / 6) * std::polar(1.0, 1.1) / 2.0;
    CHECK(std::abs(f1.v - expected) < 1e-15);
    CHECK(std::abs(f2.v - expected) < 1e-15);
  }
}

TEST_SUITE("success_probability") {
  TEST_CASE("worked example with feed-forward") {
    // |alpha|^2 r^2 + |beta|^2 (x_-^2 c^2 + y_-^2 s^2) = 0.25 + 0.5 (0.0625 + 0.1875)/2
    CHECK(success_probability(balanced(kPi / 2), kMid, FeedForward::On) == doctest::Approx(0.3125).epsilon(1e-14));
  }

  TEST_CASE("pure vacuum input gives r^2") {
    RandomDomain rnd(3);
    for (int i = 0; i < 50; ++i) {
      const auto p = rnd.params();
      const SignalState vac = SignalState::from_populations(0.0, rnd.uniform(0, kPi));
      CHECK(success_probability(vac, p, FeedForward::On) == doctest::Approx(p.r * p.r).epsilon(1e-14));
      CHECK(success_probability(vac, p, FeedForward::Off) == doctest::Approx(p.r * p.r).epsilon(1e-14));
    }
  }

  TEST_CASE("symmetric infinite-gain point") {
    CHECK(success_probability(balanced(kPi / 4), {kPi / 4, 0.0}, FeedForward::On) ==
          doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_SUITE("gains") {
  TEST_CASE("reference point with feed-forward") {
    auto [gh, gv] = gains(kMid, FeedForward::On);
    CHECK(gh.linear() == doctest::Approx(0.125));
    CHECK(gv.linear() == doctest::Approx(0.375));
    CHECK(overall_gain(kPi / 2, kMid, FeedForward::On).linear() == doctest::Approx(0.25));
  }

  TEST_CASE("r = 0 is the infinite category") {
    for (auto ff : {FeedForward::On, FeedForward::Off}) {
      auto [gh, gv] = gains({0.3, 0.0}, ff);
      CHECK(gh.is_infinite());
      CHECK(gv.is_infinite());
      CHECK(overall_gain(1.0, {0.3, 0.0}, ff).is_infinite());
    }
  }

  TEST_CASE("identity corner has unit gain") {
    auto [gh, gv] = gains({0.0, 1.0}, FeedForward::On);
    CHECK(gh.linear() == 1.0);
    CHECK(gv.linear() == 1.0);
  }

  TEST_CASE("theta = 0 reproduces G_H exactly") {
    RandomDomain rnd(8);
    for (int i = 0; i < 100; ++i) {
      auto p = rnd.params();
      if (p.r == 0.0) continue;
      for (auto ff : {FeedForward::On, FeedForward::Off}) {
        CHECK(overall_gain(0.0, p, ff) == gains(p, ff).first);
      }
    }
  }

  TEST_CASE("dB conversion") {
    CHECK(Gain::from_db(10.0).linear() == doctest::Approx(10.0));
    CHECK(Gain::finite(100.0).db() == doctest::Approx(20.0));
    CHECK(Gain::finite(0.0).db() == -std::numeric_limits<double>::infinity());
    CHECK(Gain::infinite().to_string() == "inf");
    CHECK(gain_distance_db(Gain::infinite(), Gain::infinite()) == 0.0);
    CHECK(std::isinf(gain_distance_db(Gain::infinite(), Gain::finite(3.0))));
    CHECK_THROWS_AS(Gain::finite(-1.0), InvalidParameter);
  }
}

TEST_SUITE("fidelity") {
  TEST_CASE("pole state is transmitted perfectly") {
    RandomDomain rnd(21);
    for (int i = 0; i < 200; ++i) {
      const auto p = rnd.params();
      for (auto ff : {FeedForward::On, FeedForward::Off}) {
        if (auto f = try_fidelity(0.0, p, ff)) CHECK(*f == doctest::Approx(1.0).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("reference point at theta = pi/2") {
    // ((x_- + y_-)/2)^2 / ((x_-^2 + y_-^2)/2) = (2 + sqrt3)/4
    CHECK(fidelity(kPi / 2, kMid, FeedForward::On) == doctest::Approx((2 + kSqrt3) / 4).epsilon(1e-14));
    CHECK(fidelity(kPi / 2, kMid, FeedForward::On) == doctest::Approx(0.93301).epsilon(1e-5));
  }

  TEST_CASE("infinite gain at chi = 0 keeps only the H amplitude weight") {
    CHECK(fidelity(kPi / 4, {0.0, 0.0}, FeedForward::On) ==
          doctest::Approx(std::pow(std::cos(kPi / 8), 2)).epsilon(1e-14));
  }

  TEST_CASE("empty subspace is reported") {
    // chi = pi/4, r = 1: x_- = y_- = 0, nothing survives the filtration.
    const AmplifierParams p{kPi / 4, 1.0};
    CHECK_FALSE(try_fidelity(1.0, p, FeedForward::On).has_value());
    CHECK_THROWS_AS(fidelity(1.0, p, FeedForward::On), EmptyQubitSubspace);
    auto m = evaluate(balanced(1.0), p, FeedForward::On);
    CHECK_FALSE(m.fidelity.has_value());
  }
}

TEST_SUITE("output_qubit_density") {
  TEST_CASE("H input stays H") {
    auto rho = output_qubit_density(balanced(0.0), {0.3, 0.4});
    CHECK(std::abs(rho(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(rho(1, 1)) < 1e-14);
  }

  TEST_CASE("r = 0 at chi = pi/4 keeps the diagonal state pure") {
    auto rho = output_qubit_density(balanced(kPi / 2), {kPi / 4, 0.0});
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(rho(i, j) - 0.5) < 1e-14);
  }

  TEST_CASE("matches the closed-form fidelity without filtration") {
    const auto s = balanced(kPi / 2);
    auto rho = output_qubit_density(s, kMid);
    Eigen::Vector2cd q(std::cos(kPi / 4), std::sin(kPi / 4));
    const double f = (q.adjoint() * rho * q)(0, 0).real();
    CHECK(f == doctest::Approx(fidelity(kPi / 2, kMid, FeedForward::Off)).epsilon(1e-14));
    // x_+ = -x_-, y_+ = -y_- here, so both fidelities coincide.
    CHECK(f == doctest::Approx((2 + kSqrt3) / 4).epsilon(1e-14));
  }

  TEST_CASE("always a valid density matrix reproducing the fidelity") {
    RandomDomain rnd(99);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
      auto s = rnd.signal();
      auto p = rnd.params();
      if (s.beta_sq() < 1e-6) continue;
      auto rho = output_qubit_density(s, p);
      CHECK((rho - rho.adjoint()).norm() < 1e-12);
      CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(rho);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
      Eigen::Vector2cd q(std::cos(s.theta / 2), std::sin(s.theta / 2) * std::polar(1.0, s.phi));
      CHECK(std::abs((q.adjoint() * rho * q)(0, 0).real() - fidelity(s.theta, p, FeedForward::Off)) < 1e-12);
      ++checked;
    }
    CHECK(checked > 1900);
  }

  TEST_CASE("empty subspace throws") {
    CHECK_THROWS_AS(output_qubit_density(SignalState{}, {0.2, 0.5}), EmptyQubitSubspace);
  }
}

TEST_SUITE("infinite_gain_metrics") {
  TEST_CASE("worked examples") {
    auto sym = infinite_gain_metrics(0.5, kPi / 2, kPi / 4);
    CHECK(sym.p_succ == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(sym.fidelity == doctest::Approx(1.0).epsilon(1e-15));

    const double c2 = std::pow(std::cos(kPi / 8), 2);
    auto tilt = infinite_gain_metrics(0.5, kPi / 4, 0.0);
    CHECK(tilt.p_succ == doctest::Approx(0.5 * c2).epsilon(1e-15));
    CHECK(tilt.fidelity == doctest::Approx(c2).epsilon(1e-15));
    CHECK(tilt.p_succ / 0.25 == doctest::Approx(1 + 1 / std::sqrt(2.0)).epsilon(1e-14));

    CHECK(infinite_gain_metrics(0.0, 1.0, 0.3).p_succ == 0.0);
  }

  TEST_CASE("undefined fidelity at chi = 0, theta = pi") {
    CHECK_THROWS_AS(infinite_gain_metrics(0.5, kPi, 0.0), EmptyQubitSubspace);
  }
}

TEST_SUITE("properties") {
  TEST_CASE("r = 0 reduction to the infinite-gain closed forms") {
    RandomDomain rnd(1);
    for (int i = 0; i < 2000; ++i) {
      const double chi = rnd.uniform(0, kPi / 4);
      const double theta = rnd.uniform(0, kPi);
      const double b2 = rnd.uniform(0, 1);
      const auto ig = infinite_gain_metrics(b2, theta, chi);
      const AmplifierParams p{chi, 0.0};
      const auto s = SignalState::from_populations(b2, theta);
      CHECK(std::abs(success_probability(s, p, FeedForward::On) - ig.p_succ) < 1e-12);
      CHECK(std::abs(fidelity(theta, p, FeedForward::On) - ig.fidelity) < 1e-12);
      CHECK(std::abs(fidelity(theta, p, FeedForward::Off) - ig.fidelity) < 1e-12);
    }
  }

  TEST_CASE("success probability equals twice the summed branch norms") {
    RandomDomain rnd(2);
    for (int i = 0; i < 2000; ++i) {
      const auto s = rnd.signal();
      const auto p = rnd.params();
      auto [b1, b2] = branch_states(s, p);
      CHECK(std::abs(success_probability(s, p, FeedForward::Off) - 2 * (b1.norm_sq() + b2.norm_sq())) < 1e-12);
      if (!filter_transmittances(p).defined()) continue;
      auto [f1, f2] = feedforward_states(s, p);
      CHECK(std::abs(success_probability(s, p, FeedForward::On) - 2 * (f1.norm_sq() + f2.norm_sq())) < 1e-12);
    }
  }

  TEST_CASE("scalar metrics do not depend on phi") {
    RandomDomain rnd(4);
    for (int i = 0; i < 500; ++i) {
      auto s = rnd.signal();
      const auto p = rnd.params();
      auto t = s;
      t.phi = rnd.uniform(0, 2 * kPi);
      for (auto ff : {FeedForward::On, FeedForward::Off}) {
        auto a = evaluate(s, p, ff);
        auto b = evaluate(t, p, ff);
        CHECK(a.p_succ == b.p_succ);
        CHECK(a.g_overall == b.g_overall);
        CHECK(a.fidelity == b.fidelity);
      }
    }
  }

  TEST_CASE("probability and fidelity stay in [0, 1]") {
    RandomDomain rnd(5);
    for (int i = 0; i < 10000; ++i) {
      const auto s = rnd.signal();
      const auto p = rnd.params();
      for (auto ff : {FeedForward::On, FeedForward::Off}) {
        const auto m = evaluate(s, p, ff);
        const bool p_ok = m.p_succ >= 0.0 && m.p_succ <= 1.0;
        CHECK(p_ok);
        if (m.fidelity) {
          const bool f_ok = *m.fidelity >= 0.0 && *m.fidelity <= 1.0 + 1e-15;
          CHECK(f_ok);
        }
        CHECK(m.g_overall.linear() >= 0.0);
      }
    }
  }

  TEST_CASE("balanced input at infinite gain is flat in chi") {
    for (double b2 : {0.2, 0.5, 1.0}) {
      for (int i = 0; i <= 50; ++i) {
        const double chi = kPi / 4 * i / 50;
        const auto s = SignalState::from_populations(b2, kPi / 2);
        CHECK(std::abs(success_probability(s, {chi, 0.0}, FeedForward::On) - b2 / 2) < 1e-15);
      }
    }
  }

  TEST_CASE("filtration never raises the success probability when physical") {
    RandomDomain rnd(6);
    int physical = 0;
    for (int i = 0; i < 5000; ++i) {
      const auto s = rnd.signal();
      const auto p = rnd.params();
      if (!filter_transmittances(p).physical) continue;
      ++physical;
      CHECK(success_probability(s, p, FeedForward::On) <= success_probability(s, p, FeedForward::Off) + 1e-15);
    }
    CHECK(physical > 100);
  }
}

TEST_SUITE("validation") {
  TEST_CASE("out-of-range parameters are rejected") {
    CHECK_THROWS_AS((AmplifierParams{1.0, 0.5}).validate(), InvalidParameter);
    CHECK_THROWS_AS((AmplifierParams{0.1, 1.5}).validate(), InvalidParameter);
    CHECK_NOTHROW((AmplifierParams{kPi / 4, 1.0}).validate());
    CHECK_THROWS_AS(SignalState::from_populations(1.2, 0.0), InvalidParameter);
    SignalState s;
    s.beta = 0.5;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    s = SignalState::from_populations(0.5, 4.0);
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
  }
}
