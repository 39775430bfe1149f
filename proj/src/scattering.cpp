#include "stark/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <atomic>
#include <thread>

#include "stark/airy.hpp"

namespace stark {

namespace {

// scaled Psi samples: components_i = m_i e^{L}, common exponent L
struct ScaledPsi {
  Eigen::VectorXcd mantissa;  // includes sqrt(w) |V|^{1/2}
  double log_scale = 0.0;
};

ScaledPsi scaled_psi(const Potential& v, const KernelBasis& basis, const QuadratureRule& rule) {
  const int n = rule.size();
  ScaledPsi out;
  out.mantissa = Eigen::VectorXcd::Zero(n);
  double lmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (v(rule.nodes[i]) != 0.0) lmax = std::max(lmax, basis.up[i].log_scale);
  if (!std::isfinite(lmax)) return out;  // zero potential
  out.log_scale = lmax;
  for (int i = 0; i < n; ++i) {
    double vi = v(rule.nodes[i]);
    out.mantissa[i] = std::sqrt(rule.weights[i] * std::abs(vi)) * basis.up[i].ai_m *
                      std::exp(basis.up[i].log_scale - lmax);
  }
  return out;
}

ScaledCplx a0_from_basis(const Potential& v, const KernelBasis& basis,
                         const QuadratureRule& rule) {
  const int n = rule.size();
  double lmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (v(rule.nodes[i]) != 0.0) lmax = std::max(lmax, 2.0 * basis.up[i].log_scale);
  if (!std::isfinite(lmax)) return {cplx(0.0), 0.0};
  cplx m = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx ai = basis.up[i].ai_m;
    m += rule.weights[i] * v(rule.nodes[i]) * ai * ai *
         std::exp(2.0 * basis.up[i].log_scale - lmax);
  }
  return {m, lmax};
}

}  // namespace

PsiVector psi_vector(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  const int n = rule.size();
  PsiVector out;
  out.lambda = lambda;
  out.components = Eigen::VectorXcd::Zero(n);
  out.norm_sq = 0.0;
  if (v.is_zero()) return out;
  KernelBasis basis = make_kernel_basis(
      lambda, rule.nodes, lambda.imag() >= 0.0 ? HalfPlane::upper : HalfPlane::lower);
  ScaledPsi sp = scaled_psi(v, basis, rule);
  if (sp.log_scale > 345.0)
    throw OverflowRiskError("psi_vector: components exceed double range, use the scaled path");
  double e = std::exp(sp.log_scale);
  out.components = sp.mantissa * e;
  out.norm_sq = sp.mantissa.transpose() * sp.mantissa;  // no conjugation
  out.norm_sq *= e * e;
  if (lambda.imag() == 0.0) {
    for (int i = 0; i < n; ++i) out.components[i] = cplx(out.components[i].real(), 0.0);
    out.norm_sq = cplx(out.norm_sq.real(), 0.0);
  }
  return out;
}

cplx born_a0(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  ScaledCplx s = born_a0_scaled(v, lambda, rule);
  if (!s.representable())
    throw OverflowRiskError("born_a0: value exceeds double range, use born_a0_scaled");
  return s.value();
}

ScaledCplx born_a0_scaled(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  if (v.is_zero()) return {cplx(0.0), 0.0};
  KernelBasis basis = make_kernel_basis(
      lambda, rule.nodes, lambda.imag() >= 0.0 ? HalfPlane::upper : HalfPlane::lower);
  return a0_from_basis(v, basis, rule);
}

cplx amplitude_a1(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  if (v.is_zero()) return 0.0;
  if (lambda.imag() < 0.0)
    throw InputError("amplitude_a1: Y(lambda+i0) lives in the closed upper half plane");
  KernelSystem sys = make_kernel_system(v, lambda, rule, HalfPlane::upper);
  return s_matrix_eval(v, sys, rule).a1;
}

SMatrixEval s_matrix_eval(const Potential& v, const KernelSystem& sys,
                          const QuadratureRule& rule) {
  SMatrixEval out;
  out.d_plus = sys.det;
  if (v.is_zero()) {
    out.a0 = out.a1 = 0.0;
    out.s = 1.0;
    out.s_scaled = scaled_from(out.s);
    return out;
  }
  const int n = rule.size();
  ScaledCplx a0 = a0_from_basis(v, sys.basis, rule);
  ScaledPsi sp = scaled_psi(v, sys.basis, rule);
  // a1 = (c o signV)^T Y0 (I+Y0)^{-1} c, with the common exponent pulled out
  Eigen::VectorXcd solved = sys.lu.solve(sp.mantissa);
  Eigen::VectorXcd yc = sys.y0 * solved;
  cplx quad = 0.0;
  for (int i = 0; i < n; ++i) {
    double vi = v(rule.nodes[i]);
    double sgn = (vi > 0.0) - (vi < 0.0);
    quad += sp.mantissa[i] * sgn * yc[i];
  }
  ScaledCplx a1{quad, 2.0 * sp.log_scale};
  ScaledCplx amp = scaled_add(a0, ScaledCplx{-a1.mantissa, a1.log_scale});
  out.s_scaled = scaled_add(scaled_from(cplx(1.0)),
                            scaled_mul({cplx(0.0, -2.0 * kPi), 0.0}, amp));
  out.a0 = a0.representable() ? a0.value() : cplx(std::numeric_limits<double>::infinity(), 0.0);
  out.a1 = a1.representable() ? a1.value() : cplx(std::numeric_limits<double>::infinity(), 0.0);
  out.s = out.s_scaled.representable()
              ? out.s_scaled.value()
              : cplx(std::numeric_limits<double>::infinity(), 0.0);
  return out;
}

ScatteringSample s_matrix(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  if (lambda.imag() < 0.0)
    throw InputError("s_matrix: defined on the closed upper half plane; use the "
                     "meromorphic D-/D+ route below the axis");
  KernelSystem sys = make_kernel_system(v, lambda, rule, HalfPlane::upper);
  SMatrixEval e = s_matrix_eval(v, sys, rule);
  double phase = std::numeric_limits<double>::quiet_NaN();
  if (lambda.imag() == 0.0) phase = -std::arg(e.s) / (2.0 * kPi);
  return {lambda, e.a0, e.a1, e.s, phase};
}

std::vector<double> scattering_phase(const Potential& v, const std::vector<double>& grid,
                                     const QuadratureRule& rule, int threads) {
  const size_t n = grid.size();
  if (n < 2) throw InputError("scattering_phase: need at least two grid points");
  for (size_t i = 1; i < n; ++i)
    if (grid[i] <= grid[i - 1]) throw InputError("scattering_phase: grid must increase");
  if (v.is_zero()) return std::vector<double>(n, 0.0);

  std::vector<cplx> s(n);
  int nt = std::max(1, threads);
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      KernelSystem sys = make_kernel_system(v, cplx(grid[i], 0.0), rule, HalfPlane::upper);
      s[i] = s_matrix_eval(v, sys, rule).s;
    }
  };
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<double> phase(n);
  phase[0] = -std::arg(s[0]) / (2.0 * kPi);
  for (size_t i = 1; i < n; ++i) {
    double darg = std::arg(s[i] / s[i - 1]);
    if (std::abs(darg) >= kPi / 2.0)
      throw NumericalError("scattering_phase: grid too coarse to unwrap (phase step >= pi/2)");
    phase[i] = phase[i - 1] - darg / (2.0 * kPi);
  }
  // pin the right end to (1/pi) arg D_+ with the branch fixed by decay at
  // infinity, then the left end is a consistency check, not a free constant
  double ref = tracked_log_at(v, cplx(grid.back(), 0.0), rule, Side::plus).imag() / kPi;
  double shift = ref - phase.back();
  for (double& p : phase) p += shift;
  return phase;
}

std::vector<double> derivative_5pt(const std::vector<double>& grid,
                                   const std::vector<double>& values) {
  const size_t n = grid.size();
  if (n < 5 || values.size() != n) throw InputError("derivative_5pt: need >= 5 samples");
  double h = grid[1] - grid[0];
  for (size_t i = 1; i + 1 < n; ++i)
    if (std::abs((grid[i + 1] - grid[i]) - h) > 1e-9 * std::abs(h))
      throw InputError("derivative_5pt: grid must be uniform");
  std::vector<double> d(n);
  for (size_t i = 2; i + 2 < n; ++i)
    d[i] = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) /
           (12.0 * h);
  // one-sided fourth-order stencils at the edges
  auto edge = [&](size_t i, int dir) {
    return dir *
           (-25.0 * values[i] + 48.0 * values[i + dir] - 36.0 * values[i + 2 * dir] +
            16.0 * values[i + 3 * dir] - 3.0 * values[i + 4 * dir]) /
           (12.0 * h);
  };
  d[0] = edge(0, 1);
  d[1] = edge(1, 1);
  d[n - 2] = edge(n - 2, -1);
  d[n - 1] = edge(n - 1, -1);
  return d;
}

}  // namespace stark
