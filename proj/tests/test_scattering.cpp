#include "doctest.h"

#include <cmath>
#include <random>

#include "stark/scattering.hpp"

using namespace stark;

namespace {

Potential canonical() {
  return make_potential({1.0, "linear", {1.0, 0.5}, {}, {}});
}
Potential zero_v() {
  return make_potential({1.0, "box", {0.0}, {}, {}});
}

}  // namespace

TEST_CASE("psi vector") {
  Potential v = canonical();
  QuadratureRule rule = build_rule(160, 1.0);
  SUBCASE("zero potential gives the zero vector") {
    PsiVector p = psi_vector(zero_v(), cplx(1.0, 0.0), rule);
    CHECK(p.components.norm() == 0.0);
    CHECK(p.norm_sq == cplx(0.0));
  }
  SUBCASE("norm_sq at real lambda matches the quadrature oracle") {
    PsiVector p = psi_vector(v, cplx(0.0, 0.0), rule);
    auto oracle = integrate_gk(
        [&](double x) {
          cplx ai = airy_ai(cplx(x, 0.0)).ai;
          return ai * ai * std::abs(v(x));
        },
        0.0, 1.0, 1e-12);
    CHECK(p.norm_sq.imag() == 0.0);
    CHECK(p.norm_sq.real() >= 0.0);
    CHECK(std::abs(p.norm_sq - oracle.value) < 1e-8);
  }
  SUBCASE("entire in lambda (Cauchy-Riemann by finite differences)") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 20; ++k) {
      cplx lam(u(rng), u(rng));
      double h = 1e-5;
      auto f = [&](cplx l) { return psi_vector(v, l, rule).norm_sq; };
      cplx dx = (f(lam + h) - f(lam - h)) / (2.0 * h);
      cplx dy = (f(lam + cplx(0.0, h)) - f(lam - cplx(0.0, h))) / (2.0 * cplx(0.0, h));
      CHECK(std::abs(dx - dy) < 1e-6 * (1.0 + std::abs(dx)));
    }
  }
  SUBCASE("ray growth bound |norm_sq| <= e^{(4/3)t^3} C / t^2") {
    for (double t : {2.0, 3.0, 4.0}) {
      cplx lam = std::polar(t * t, kPi / 3.0);
      PsiVector p = psi_vector(v, lam, rule);
      double normalized = std::abs(p.norm_sq) * t * t * std::exp(-(4.0 / 3.0) * t * t * t);
      CHECK(normalized < 1.0);
    }
  }
}

TEST_CASE("Born term") {
  Potential v = canonical();
  QuadratureRule rule = build_rule(192, 1.0);
  SUBCASE("zero potential") { CHECK(born_a0(zero_v(), cplx(1.0, 1.0), rule) == cplx(0.0)); }
  SUBCASE("a0 equals Psi V_S Psi* (discrete identity of Eq. 3.7 vs 3.8 forms)") {
    for (cplx lam : {cplx(1.0, 0.0), cplx(-2.0, 1.0), cplx(3.0, 2.0)}) {
      PsiVector p = psi_vector(v, lam, rule);
      SignSplit ss = split_sign(v);
      cplx via_psi = 0.0;
      for (int i = 0; i < rule.size(); ++i) {
        // component_i^2 already carries w_i |V|; multiply by sign V
        double x = rule.nodes[i];
        via_psi += p.components[i] * p.components[i] * double(ss.sign(x));
      }
      CHECK(std::abs(via_psi - born_a0(v, lam, rule)) < 1e-12 * (1.0 + std::abs(via_psi)));
    }
  }
  SUBCASE("ray asymptotics: a0 ~ e^{i 2pi/3 + (4/3)t^3} V(0) / (8 pi t^2)") {
    double prev_dev = 1e9;
    for (double t : {2.5, 3.0, 3.5, 4.0}) {
      cplx lam = std::polar(t * t, kPi / 3.0);
      cplx a0 = born_a0(v, lam, rule);
      cplx lead = std::exp(cplx(0.0, 2.0 * kPi / 3.0)) * std::exp((4.0 / 3.0) * t * t * t) /
                  (8.0 * kPi * t * t) * v.v_at_zero();
      double dev = std::abs(a0 - lead) / std::abs(lead);
      if (t == 3.0) CHECK(dev < 0.2);
      if (t > 2.5) CHECK(dev < prev_dev);
      prev_dev = dev;
    }
  }
  SUBCASE("sector bound (|arg zeta| <= pi/6, |zeta| >= 1 + gamma)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uarg(-kPi / 6.0, kPi / 6.0);
    std::uniform_real_distribution<double> urad(2.0, 5.0);
    double l1 = integrate_gk([&](double x) { return cplx(std::abs(v(x))); }, 0.0, 1.0, 1e-10)
                    .value.real();
    for (int k = 0; k < 10; ++k) {
      cplx zeta = std::polar(urad(rng), uarg(rng));
      cplx lam = zeta * zeta;
      if (lam.imag() < 0.0) lam = std::conj(lam);  // stay in the upper half plane
      cplx a0 = born_a0(v, lam, rule);
      double z3im = std::abs(std::imag(zeta * zeta * zeta));
      double bound = std::exp((4.0 / 3.0) * z3im) / (2.0 * kPi * std::abs(zeta)) * l1 *
                     (1.0 + 3.0 / std::abs(zeta));
      CHECK(std::abs(a0) <= bound);
    }
  }
}

TEST_CASE("amplitude a1") {
  Potential v = canonical();
  QuadratureRule rule = build_rule(160, 1.0);
  SUBCASE("zero potential") { CHECK(amplitude_a1(zero_v(), cplx(0.5, 0.0), rule) == cplx(0.0)); }
  SUBCASE("decay bound |a1| <= C (1+|lambda|)^{-a} |norm_sq|, a = 0.4") {
    double cfit = 0.0;
    for (double s : {10.0, 100.0, 1000.0}) {
      cplx lam(s, 1.0);
      cplx a1 = amplitude_a1(v, lam, rule);
      cplx nsq = psi_vector(v, lam, rule).norm_sq;
      double c = std::abs(a1) / (std::pow(1.0 + std::abs(lam), -0.4) * std::abs(nsq));
      if (cfit == 0.0) cfit = c;
      CHECK(c < 10.0 * cfit);  // stable constant across two decades
    }
  }
  SUBCASE("second order in the potential strength") {
    for (double eps : {1e-2, 1e-3}) {
      Potential vs = make_potential({1.0, "linear", {eps, eps / 2.0}, {}, {}});
      cplx lam(1.0, 0.0);
      cplx a0 = born_a0(vs, lam, rule);
      cplx a1 = amplitude_a1(vs, lam, rule);
      CHECK(std::abs(a0) > 0.1 * eps);   // first order
      CHECK(std::abs(a1) < 10.0 * eps * eps);  // second order
    }
  }
}

TEST_CASE("jump identity binds the kernel, determinant and scattering normalizations") {
  // Y0(l+i0) - Y0(l-i0) = 2 pi i Psi* Psi V_S as matrices
  Potential v = canonical();
  QuadratureRule rule = build_rule(96, 1.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  SignSplit ss = split_sign(v);
  for (int k = 0; k < 20; ++k) {
    cplx lam(u(rng), 0.0);
    SandwichMatrix up = build_y0(v, lam, rule, HalfPlane::upper);
    SandwichMatrix low = build_y0(v, lam, rule, HalfPlane::lower);
    PsiVector p = psi_vector(v, lam, rule);
    double worst = 0.0;
    for (int i = 0; i < rule.size(); ++i)
      for (int j = 0; j < rule.size(); ++j) {
        cplx expect = cplx(0.0, 2.0 * kPi) * p.components[i] * p.components[j] *
                      double(ss.sign(rule.nodes[j]));
        worst = std::max(worst,
                         std::abs(up.entries(i, j) - low.entries(i, j) - expect));
      }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("S-matrix") {
  Potential v = canonical();
  QuadratureRule rule = build_rule(256, 1.0);
  SUBCASE("zero potential gives S = 1") {
    CHECK(s_matrix(zero_v(), cplx(0.3, 0.0), rule).s == cplx(1.0));
  }
  SUBCASE("unitarity on the real axis") {
    for (double lam : {-5.0, 0.0, 5.0}) {
      ScatteringSample s = s_matrix(v, cplx(lam, 0.0), rule);
      CHECK(std::abs(std::abs(s.s) - 1.0) < 1e-6);
    }
  }
  SUBCASE("S = conj(D+)/D+ fixes the normalization") {
    for (double lam : {1.0, -3.0, 7.0}) {
      ScatteringSample s = s_matrix(v, cplx(lam, 0.0), rule);
      cplx d = det_side(v, cplx(lam, 0.0), rule, Side::plus).d_value;
      CHECK(std::abs(s.s - std::conj(d) / d) < 1e-6);
    }
  }
  SUBCASE("S = D-(l-i0)/D+(l+i0)") {
    for (double lam : {0.5, -2.0}) {
      ScatteringSample s = s_matrix(v, cplx(lam, 0.0), rule);
      cplx dp = det_side(v, cplx(lam, 0.0), rule, Side::plus).d_value;
      cplx dm = det_side(v, cplx(lam, 0.0), rule, Side::minus).d_value;
      CHECK(std::abs(s.s - dm / dp) < 1e-6);
    }
  }
}

TEST_CASE("scattering phase") {
  Potential v = canonical();
  QuadratureRule rule = build_rule(128, 1.0);
  SUBCASE("zero potential is identically zero") {
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(-5.0 + 0.2 * i);
    auto ph = scattering_phase(zero_v(), grid, rule);
    for (double p : ph) CHECK(p == 0.0);
  }
  SUBCASE("high-energy law phi ~ V0 / (2 pi sqrt(lambda))") {
    double ph = tracked_log_at(v, cplx(1e4, 0.0), rule, Side::plus).imag() / kPi;
    double lead = 1.25 / (2.0 * kPi * 100.0);
    CHECK(std::abs(ph - lead) / lead < 0.1);
  }
  SUBCASE("negative-axis decay") {
    // the phase is far below the O(1/|lambda|) envelope there (numerically it
    // sits at the roundoff floor), so assert the bound itself
    double p3 = tracked_log_at(v, cplx(-1e3, 0.0), rule, Side::plus).imag() / kPi;
    double p4 = tracked_log_at(v, cplx(-1e4, 0.0), rule, Side::plus).imag() / kPi;
    CHECK(std::abs(p3) < 1e-3);
    CHECK(std::abs(p4) < 1e-4);
  }
  SUBCASE("unwrapped grid is continuous and consistent with samples") {
    std::vector<double> grid;
    for (int i = 0; i <= 160; ++i) grid.push_back(-8.0 + 0.1 * i);
    auto ph = scattering_phase(v, grid, rule, 2);
    for (size_t i = 1; i < ph.size(); ++i) CHECK(std::abs(ph[i] - ph[i - 1]) < 0.25);
    // each phase equals the principal sample value modulo an integer
    ScatteringSample s = s_matrix(v, cplx(grid[80], 0.0), rule);
    double frac = ph[80] - s.phase;
    CHECK(std::abs(frac - std::round(frac)) < 1e-6);
  }
}
