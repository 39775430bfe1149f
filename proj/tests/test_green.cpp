#include "doctest.h"

#include <cmath>
#include <random>

#include "stark/green.hpp"

using namespace stark;

namespace {

Potential canonical() {
  return make_potential({1.0, "linear", {1.0, 0.5}, {}, {}});
}

}  // namespace

TEST_CASE("conjugation symmetry between half planes") {
  double x = 0.3, y = 0.7;
  cplx lam(2.0, 1.0);
  cplx up = r0_kernel(x, y, lam, HalfPlane::upper).value;
  cplx low = r0_kernel(x, y, std::conj(lam), HalfPlane::lower).value;
  CHECK(std::abs(low - std::conj(up)) < 1e-12);
}

TEST_CASE("two-solution kernel vs time-integral oracle") {
  SUBCASE("spot value (0.2, 0.8, 1+2i)") {
    cplx a = r0_kernel(0.2, 0.8, cplx(1.0, 2.0), HalfPlane::upper).value;
    cplx b = r0_time_integral(0.2, 0.8, cplx(1.0, 2.0));
    CHECK(std::abs(a - b) < 1e-6);
  }
  SUBCASE("20 random points at lambda = 1+2i") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      double x = u(rng), y = u(rng);
      cplx a = r0_kernel(x, y, cplx(1.0, 2.0), HalfPlane::upper).value;
      cplx b = r0_time_integral(x, y, cplx(1.0, 2.0));
      CHECK(std::abs(a - b) < 1e-6);
    }
  }
}

TEST_CASE("kernel solves the ODE away from the diagonal") {
  // (-d^2/dx^2 + x - lambda) R0(x, y) = 0 for x != y, via Richardson FD
  cplx lam(3.0, 1.0);
  double y = 0.5, x = 0.2;
  auto k = [&](double xx) { return r0_kernel(xx, y, lam, HalfPlane::upper).value; };
  auto residual = [&](double h) {
    cplx second = (k(x + h) - 2.0 * k(x) + k(x - h)) / (h * h);
    return -second + (x - lam) * k(x);
  };
  cplx r1 = residual(1e-3), r2 = residual(5e-4);
  cplx extrap = (4.0 * r2 - r1) / 3.0;
  CHECK(std::abs(extrap) < 1e-4);
}

TEST_CASE("unit derivative jump across the diagonal") {
  cplx lam(2.0, 1.5);
  double y = 0.55;
  auto k = [&](double xx) { return r0_kernel(xx, y, lam, HalfPlane::upper).value; };
  double h = 1e-4;
  cplx slope_right = (k(y + 3 * h) - k(y + h)) / (2 * h);
  cplx slope_left = (k(y - h) - k(y - 3 * h)) / (2 * h);
  CHECK(std::abs((slope_right - slope_left) - cplx(-1.0)) < 1e-3);
}

TEST_CASE("oracle symmetry and resolvent decay") {
  SUBCASE("symmetry in (x, y)") {
    cplx lam(2.0, 1.0);
    CHECK(std::abs(r0_time_integral(0.1, 0.9, lam) - r0_time_integral(0.9, 0.1, lam)) < 1e-8);
  }
  SUBCASE("decay for large Im lambda") {
    cplx v10 = r0_time_integral(0.4, 0.6, cplx(0.0, 10.0));
    cplx v50 = r0_time_integral(0.4, 0.6, cplx(0.0, 50.0));
    CHECK(std::abs(v50) < std::abs(v10));
    CHECK(std::abs(v50) < 10.0 / 50.0);  // |R0| <= C / Im lambda with modest C
  }
}

TEST_CASE("two-path equivalence on a grid") {
  const cplx lams[4] = {{1.0, 2.0}, {2.0, 1.0}, {-3.0, 1.5}, {0.5, 0.8}};
  double worst = 0.0;
  for (cplx lam : lams)
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (double y : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        cplx a = r0_kernel(x, y, lam, HalfPlane::upper).value;
        cplx b = r0_time_integral(x, y, lam);
        worst = std::max(worst, std::abs(a - b));
      }
  CHECK(worst < 1e-6);
}

TEST_CASE("kernel basis consistency") {
  std::vector<double> nodes{0.1, 0.25, 0.5, 0.75, 0.9};
  cplx lam(1.5, 0.7);
  KernelBasis b = make_kernel_basis(lam, nodes, HalfPlane::upper);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      cplx direct = r0_kernel(nodes[i], nodes[j], lam, HalfPlane::upper).value;
      CHECK(std::abs(b.entry(i, j).value() - direct) < 1e-13);
    }
  // analytic d/dlambda vs central differences
  double h = 1e-5;
  KernelBasis bp = make_kernel_basis(lam + h, nodes, HalfPlane::upper);
  KernelBasis bm = make_kernel_basis(lam - h, nodes, HalfPlane::upper);
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) {
      cplx fd = (bp.entry(i, j).value() - bm.entry(i, j).value()) / (2.0 * h);
      CHECK(std::abs(b.entry_dlambda(i, j).value() - fd) < 1e-7);
    }
}

TEST_CASE("errors and preconditions") {
  CHECK_THROWS_AS(r0_kernel(0.1, 0.2, cplx(1.0, 0.0)), InputError);
  CHECK_THROWS_AS(r0_kernel(0.1, 0.2, cplx(1.0, -0.5), HalfPlane::upper), InputError);
  CHECK_THROWS_AS(r0_time_integral(0.1, 0.2, cplx(1.0, 0.0)), InputError);
}

TEST_CASE("oscillatory trace of Y0") {
  Potential v = canonical();
  SUBCASE("zero potential gives zero") {
    Potential z = make_potential({1.0, "box", {0.0}, {}, {}});
    CHECK(trace_y0_oscillatory(z, cplx(2.0, 1.0)) == cplx(0.0));
  }
  SUBCASE("high-energy law at |lambda| = 1e4") {
    cplx lam = std::polar(1e4, 0.01);
    cplx tr = trace_y0_oscillatory(v, lam);
    cplx lead = cplx(0.0, 1.0) * 1.25 / (2.0 * sqrt_upper(lam));
    CHECK(std::abs(tr - lead) < 3e-4);
  }
  SUBCASE("agreement with the quadrature trace at lambda = 2+i") {
    cplx lam(2.0, 1.0);
    QuadratureRule r = build_rule(160, 1.0);
    KernelBasis b = make_kernel_basis(lam, r.nodes, HalfPlane::upper);
    cplx tr = 0.0;
    for (int i = 0; i < r.size(); ++i)
      tr += r.weights[i] * v(r.nodes[i]) * b.entry(i, i).value();
    CHECK(std::abs(tr - trace_y0_oscillatory(v, lam)) < 1e-6);
  }
  SUBCASE("decay constant along three rays") {
    // |Tr Y0 - i V0/(2 sqrt(lambda))| <= C/|lambda| with stable C
    for (double arg : {kPi / 6.0, kPi / 2.0, 5.0 * kPi / 6.0}) {
      double prev_c = 0.0;
      for (double r : {1e2, 1e3, 1e4}) {
        cplx lam = std::polar(r, arg);
        cplx tr = trace_y0_oscillatory(v, lam);
        cplx lead = cplx(0.0, 1.0) * 1.25 / (2.0 * sqrt_upper(lam));
        double c = std::abs(tr - lead) * r;
        CHECK(c < 5.0);
        prev_c = c;
      }
      (void)prev_c;
    }
  }
  SUBCASE("non-convergence reported for real positive lambda") {
    CHECK_THROWS_AS(trace_y0_oscillatory(v, cplx(100.0, 0.0)), NonConvergenceError);
  }
}
