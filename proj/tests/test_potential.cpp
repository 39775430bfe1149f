#include "doctest.h"

#include <cmath>
#include <random>

#include "stark/potential.hpp"

using namespace stark;

namespace {

Potential canonical() {
  return make_potential({1.0, "linear", {1.0, 0.5}, {}, {}});
}
Potential box(double gamma = 1.0, double h = 1.0) {
  return make_potential({gamma, "box", {h}, {}, {}});
}

}  // namespace

TEST_CASE("box potential basics") {
  Potential v = box();
  CHECK(v(0.5) == 1.0);
  CHECK(v(-0.1) == 0.0);
  CHECK(v(1.1) == 0.0);
  CHECK(v0_integral(v) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("zero potential collapses") {
  Potential v = box(1.0, 0.0);
  CHECK(v.is_zero());
  CHECK(v0_integral(v) == 0.0);
  CHECK(fourier_hat(v, 3.7) == cplx(0.0));
}

TEST_CASE("sampled potential x(2-x)sin(5x) reproduces the closed-form integral") {
  const int n = 4097;
  const double gamma = 2.0;
  PotentialSpec spec;
  spec.gamma = gamma;
  spec.form = "samples";
  for (int i = 0; i < n; ++i) {
    double x = gamma * i / (n - 1.0);
    spec.sample_x.push_back(x);
    spec.sample_v.push_back(x * (2.0 - x) * std::sin(5.0 * x));
  }
  Potential v = make_potential(spec);
  auto oracle = integrate_gk(
      [](double x) { return cplx(x * (2.0 - x) * std::sin(5.0 * x)); }, 0.0, gamma, 1e-13);
  CHECK(std::abs(v0_integral(v) - oracle.value.real()) < 1e-10);
  CHECK(v.condition_c());
}

TEST_CASE("split_sign") {
  SUBCASE("positive box") {
    SignSplit s = split_sign(box());
    CHECK(s.sqrt_abs(0.3) == 1.0);
    CHECK(s.signed_sqrt(0.3) == 1.0);
  }
  SUBCASE("negative box") {
    SignSplit s = split_sign(box(1.0, -4.0));
    CHECK(s.sqrt_abs(0.3) == 2.0);
    CHECK(s.signed_sqrt(0.3) == -2.0);
  }
  SUBCASE("sign change V = x - 1/2") {
    Potential v = make_potential({1.0, "linear", {-0.5, 1.0}, {}, {}});
    SignSplit s = split_sign(v);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      double x = u(rng);
      CHECK(s.sqrt_abs(x) * s.signed_sqrt(x) == doctest::Approx(v(x)).epsilon(1e-15));
      CHECK(s.sqrt_abs(x) * s.sqrt_abs(x) == doctest::Approx(std::abs(v(x))).epsilon(1e-15));
    }
    CHECK(s.sign(0.5) == 0);
  }
}

TEST_CASE("v0_integral closed forms") {
  SUBCASE("sin(pi x) -> 2/pi") {
    // polynomial fit is not exact for sin; use a fine sample set instead
    PotentialSpec spec;
    spec.gamma = 1.0;
    spec.form = "samples";
    const int n = 2049;
    for (int i = 0; i < n; ++i) {
      double x = i / (n - 1.0);
      spec.sample_x.push_back(x);
      spec.sample_v.push_back(std::sin(kPi * x));
    }
    Potential v = make_potential(spec);
    CHECK(v0_integral(v) == doctest::Approx(2.0 / kPi).epsilon(1e-9));
  }
  SUBCASE("canonical V0 = 5/4") {
    CHECK(v0_integral(canonical()) == doctest::Approx(1.25).epsilon(1e-13));
  }
}

TEST_CASE("fourier transform") {
  Potential v = canonical();
  SUBCASE("t = 0 is V0/sqrt(2 pi)") {
    CHECK(std::abs(fourier_hat(v, 0.0) - cplx(1.25 / kSqrt2Pi)) < 1e-12);
  }
  SUBCASE("box at t = 2 pi vanishes") {
    CHECK(std::abs(fourier_hat(box(), 2.0 * kPi)) < 1e-12);
  }
  SUBCASE("Condition C decay law at t = 1e3") {
    double t = 1e3;
    cplx lhs = t * fourier_hat(v, t);
    cplx boundary = (v.v_at_zero() - std::exp(cplx(0.0, -t * v.gamma())) * v.v_at_gamma()) /
                    (cplx(0.0, 1.0) * kSqrt2Pi);
    CHECK(std::abs(lhs - boundary) < 1e-3);
  }
  SUBCASE("Parseval within truncation") {
    double t_max = 150.0;
    auto res = integrate_gk(
        [&v](double t) {
          cplx f = fourier_hat(v, t);
          return cplx(std::norm(f), 0.0);
        },
        -t_max, t_max, 1e-6, 6000);
    double l2 = integrate_gk([&v](double x) { return cplx(v(x) * v(x)); }, 0.0, 1.0, 1e-12)
                    .value.real();
    CHECK(std::abs(res.value.real() - l2) / l2 < 0.01);
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_potential({-1.0, "box", {1.0}, {}, {}}), InputError);
  CHECK_THROWS_AS(make_potential({1.0, "nope", {}, {}, {}}), InputError);
  PotentialSpec bad;
  bad.gamma = 1.0;
  bad.form = "samples";
  bad.sample_x = {0.0, 0.5, 0.75, 1.0};
  bad.sample_v = {0.0, std::nan(""), 0.5, 0.0};
  CHECK_THROWS_AS(make_potential(bad), InputError);
}

TEST_CASE("quadrature rules") {
  SUBCASE("Gauss exactness: N=8 integrates x^7 on [0,1]") {
    QuadratureRule r = build_rule(8, 1.0);
    double s = 0.0;
    for (int i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 7);
    CHECK(s == doctest::Approx(0.125).epsilon(1e-14));
  }
  SUBCASE("weights sum to gamma") {
    QuadratureRule r = build_rule(64, 2.0);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    for (int i = 1; i < r.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
  }
  SUBCASE("N=64 rule integrates the canonical potential to v0") {
    Potential v = canonical();
    QuadratureRule r = build_rule(64, 1.0);
    double s = 0.0;
    for (int i = 0; i < r.size(); ++i) s += r.weights[i] * v(r.nodes[i]);
    CHECK(std::abs(s - v0_integral(v)) < 1e-12);
  }
  SUBCASE("composite rule covers pieces") {
    QuadratureRule r = build_rule_pieces(16, 1.0, {0.5});
    CHECK(r.size() == 32);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("adaptive GK on exp") {
    auto res = integrate_gk([](double x) { return cplx(std::exp(x)); }, 0.0, 1.0, 1e-12);
    CHECK(res.converged);
    CHECK(std::abs(res.value.real() - (std::exp(1.0) - 1.0)) < 1e-12);
  }
}
