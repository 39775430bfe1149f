#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "stark/airy.hpp"

using namespace stark;

namespace {

using cld = std::complex<long double>;

// Independent Maclaurin oracle for Ai, exact rational recurrence in long
// double. Trustworthy for |z| <~ 4 where cancellation is mild.
cld oracle_ai(cld z, int terms = 60) {
  const long double c1 = 0.35502805388781723926006318600418317640L;
  const long double c2 = 0.25881940379280679840518356018920396348L;
  cld z3 = z * z * z;
  cld a = 1.0L, b = z;
  cld f = a, g = b;
  for (int k = 1; k <= terms; ++k) {
    a *= z3 / cld((3.0L * k - 1) * (3.0L * k));
    b *= z3 / cld((3.0L * k) * (3.0L * k + 1));
    f += a;
    g += b;
  }
  return c1 * f - c2 * g;
}

cplx to_cplx(cld z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

std::mt19937_64 rng(0x5eedbeefULL);

cplx random_disc(double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  while (true) {
    cplx z{u(rng), u(rng)};
    if (std::abs(z) <= radius) return z;
  }
}

}  // namespace

TEST_CASE("Ai(0) matches the series oracle") {
  AiryValue v = airy_ai(0.0);
  // frozen from the 60-term exact-recurrence oracle
  CHECK(v.ai.real() == doctest::Approx(0.355028053887817).epsilon(1e-14));
  CHECK(v.ai.imag() == 0.0);
  CHECK(v.ai_prime.real() == doctest::Approx(-0.258819403792807).epsilon(1e-14));
  CHECK(std::abs(v.ai - to_cplx(oracle_ai(0.0L))) < 1e-16);
}

TEST_CASE("connection formula Ai(-z) = e^{i pi/3}Ai(z e^{i pi/3}) + e^{-i pi/3}Ai(z e^{-i pi/3})") {
  const cplx rot = std::exp(cplx(0.0, kPi / 3.0));
  auto check_at = [&](cplx z, double tol) {
    cplx t1 = rot * airy_ai(z * rot).ai;
    cplx t2 = std::conj(rot) * airy_ai(z * std::conj(rot)).ai;
    cplx lhs = airy_ai(-z).ai;
    // absolute where the terms are O(1); relative to the largest term when the
    // identity combines exponentially large values
    double scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(lhs)});
    CHECK(std::abs(lhs - (t1 + t2)) < tol * scale);
  };
  check_at(cplx(2.0, 1.0), 1e-12);
  for (int i = 0; i < 300; ++i) check_at(random_disc(10.0), 1e-10);
}

TEST_CASE("large real argument follows the exponential leading term") {
  // leading term (2 sqrt(pi))^{-1} z^{-1/4} e^{-(2/3) z^{3/2}}, rel err O(z^{-3/2})
  double z = 100.0;
  AiryValue v = airy_ai(z);
  double lead = 0.5 / kSqrtPi * std::pow(z, -0.25) * std::exp(-(2.0 / 3.0) * std::pow(z, 1.5));
  CHECK(std::abs(v.ai.real() - lead) / lead < 2e-3);
  CHECK(v.regime == AiryRegime::asymptotic);
}

TEST_CASE("series oracle agreement on the small disc") {
  for (int i = 0; i < 200; ++i) {
    cplx z = random_disc(4.0);
    cplx ref = to_cplx(oracle_ai(cld(z.real(), z.imag())));
    CHECK(std::abs(airy_ai(z).ai - ref) < 1e-13);
  }
}

TEST_CASE("airy_ai_log") {
  SUBCASE("z = 0") {
    AiryLog l = airy_ai_log(0.0);
    CHECK(l.log_ai.real() == doctest::Approx(std::log(0.355028053887817)).epsilon(1e-13));
  }
  SUBCASE("z = 400 growth regime") {
    AiryLog l = airy_ai_log(400.0);
    double expected = -(2.0 / 3.0) * std::pow(400.0, 1.5) - 0.25 * std::log(400.0) -
                      std::log(2.0 * kSqrtPi);
    CHECK(std::abs(l.log_ai.real() - expected) / std::abs(expected) < 1e-6);
  }
  SUBCASE("exp(log_ai) = ai on |z| <= 30") {
    for (int i = 0; i < 1000; ++i) {
      cplx z = random_disc(30.0);
      if (std::abs(z) < 0.1) continue;
      AiryValue v = airy_ai(z);
      if (std::abs(v.ai) < 1e-280) continue;
      AiryLog l = airy_ai_log(z);
      CHECK(std::abs(std::exp(l.log_ai) - v.ai) / std::abs(v.ai) < 1e-10);
      CHECK(std::abs(std::exp(l.log_ai_prime) - v.ai_prime) / std::abs(v.ai_prime) < 1e-10);
    }
  }
}

TEST_CASE("rotated solution") {
  SUBCASE("rotation fixes the origin") {
    CHECK(std::abs(airy_rotated(0.0).ai - airy_ai(0.0).ai) == 0.0);
  }
  SUBCASE("Wronskian of (Ai, rotated Ai) is z-independent") {
    auto wronskian = [](cplx z) {
      const cplx w = kOmegaPlus;
      AiryValue a = airy_ai(z);
      AiryValue r = airy_rotated(z);
      return a.ai * w * airy_ai(w * z).ai_prime - a.ai_prime * r.ai;
    };
    cplx w0 = wronskian(0.0);
    CHECK(std::abs(wronskian(3.0) - w0) < 1e-10);
    // |W| = 1/(2 pi)
    CHECK(std::abs(w0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
  }
  SUBCASE("connection expresses the rotated solution at z = -5") {
    // Ai(z) + w Ai(w z) + w^{-1} Ai(w^{-1} z) = 0
    cplx z(-5.0, 0.0);
    const cplx w = kOmegaPlus;
    cplx direct = airy_rotated(z).ai;
    cplx via = (-airy_ai(z).ai - std::conj(w) * airy_ai(std::conj(w) * z).ai) / w;
    CHECK(std::abs(direct - via) < 1e-10);
  }
}

TEST_CASE("ODE residual |Ai'' - z Ai| stays small") {
  for (int i = 0; i < 1000; ++i) {
    cplx z = random_disc(30.0);
    AiryValue v = airy_ai(z);
    cplx second = detail::airy_second_reference(z);
    CHECK(std::abs(second - z * v.ai) <= 1e-8 * (1.0 + std::abs(v.ai) * std::abs(z)));
  }
}

TEST_CASE("Wronskian constancy across the regime crossover") {
  const cplx w = kOmegaPlus;
  auto wronskian = [&](cplx z) {
    AiryValue a = airy_ai(z);
    AiryValue r = airy_ai(w * z);
    return a.ai * w * r.ai_prime - a.ai_prime * r.ai;
  };
  cplx w0 = wronskian(0.0);
  // Production sector: upper half-plane lambda gives arg(x - lambda) in
  // (-pi, 0], where the two solutions carry opposite exponents and the
  // Wronskian is well conditioned.
  for (double arg : {0.0, -0.4, -1.2, -2.2, -2.9, 3.141592653589793}) {
    for (double r : {7.8, 7.95, 8.05, 8.3}) {
      cplx z = std::polar(r, arg);
      CHECK(std::abs(wronskian(z) - w0) < 1e-10);
    }
  }
  // In the opposite sector both solutions share the growing exponential;
  // constancy then holds relative to the product scale.
  for (double arg : {0.7, 1.9}) {
    for (double r : {8.05, 8.3}) {
      cplx z = std::polar(r, arg);
      double scale = std::max(1.0, std::abs(airy_ai(z).ai * airy_ai(kOmegaPlus * z).ai_prime));
      CHECK(std::abs(wronskian(z) - w0) < 1e-10 * scale);
    }
  }
}

TEST_CASE("finite differences reproduce ai_prime (Richardson)") {
  for (int i = 0; i < 100; ++i) {
    cplx z = random_disc(12.0);
    double h = 1e-4;
    auto fd = [&](double hh) {
      return (airy_ai(z + cplx(hh)).ai - airy_ai(z - cplx(hh)).ai) / (2.0 * hh);
    };
    cplx d1 = fd(h), d2 = fd(h / 2.0);
    cplx richardson = (4.0 * d2 - d1) / 3.0;
    AiryValue v = airy_ai(z);
    CHECK(std::abs(richardson - v.ai_prime) < 1e-8 * (1.0 + std::abs(v.ai_prime)));
  }
}

TEST_CASE("oscillatory regime matches z^{-1/4} sin(theta) law") {
  for (double t = 5.0; t <= 50.0; t += 2.5) {
    AiryValue v = airy_ai(cplx(-t, 0.0));
    double theta = (2.0 / 3.0) * std::pow(t, 1.5) + kPi / 4.0;
    double lead = std::pow(t, -0.25) / kSqrtPi * std::sin(theta);
    CHECK(std::abs(v.ai.real() - lead) < 0.25 * std::pow(t, -1.75));
    CHECK(v.ai.imag() == 0.0);
  }
}

TEST_CASE("regime bookkeeping and error estimates") {
  for (int i = 0; i < 200; ++i) {
    cplx z = random_disc(30.0);
    AiryValue v = airy_ai(z);
    CHECK(std::isfinite(v.est_abs_err));
    if (std::abs(z) <= airy_crossover_radius())
      CHECK(v.regime == AiryRegime::series);
    else
      CHECK(v.regime != AiryRegime::series);
    CHECK(airy_ai_scaled(z).est_err_m < 1e-8);
  }
  CHECK_THROWS_AS(airy_ai(cplx(2e4, 0.0)), InputError);
  CHECK_THROWS_AS(airy_ai(std::polar(9000.0, 2.0)), OverflowRiskError);
}
