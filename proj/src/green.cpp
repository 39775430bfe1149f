#include "stark/green.hpp"

#include <algorithm>
#include <cmath>

namespace stark {

namespace {

void check_half_plane(cplx lambda, HalfPlane hp) {
  if (hp == HalfPlane::upper && lambda.imag() < 0.0)
    throw InputError("r0_kernel: upper half plane requested with Im lambda < 0");
  if (hp == HalfPlane::lower && lambda.imag() > 0.0)
    throw InputError("r0_kernel: lower half plane requested with Im lambda > 0");
}

}  // namespace

KernelBasis make_kernel_basis(cplx lambda, const std::vector<double>& nodes, HalfPlane hp) {
  check_half_plane(lambda, hp);
  KernelBasis basis;
  basis.lambda = lambda;
  basis.hp = hp;
  basis.omega = rotation_of(hp);
  basis.up.reserve(nodes.size());
  basis.um.reserve(nodes.size());
  for (double x : nodes) {
    cplx z = x - lambda;
    basis.up.push_back(airy_ai_scaled(z));
    basis.um.push_back(airy_ai_scaled(basis.omega * z));
  }
  // Wronskian u_- u_+' - u_-' u_+ at the first node; x-independent.
  const AiryScaled& p = basis.up.front();
  const AiryScaled& m = basis.um.front();
  basis.w_mantissa = m.ai_m * p.aip_m - basis.omega * m.aip_m * p.ai_m;
  basis.w_log = m.log_scale + p.log_scale;
  return basis;
}

GreenKernelEval r0_kernel(double x, double y, cplx lambda, HalfPlane hp) {
  std::vector<double> nodes{std::min(x, y), std::max(x, y)};
  KernelBasis b = make_kernel_basis(lambda, nodes, hp);
  ScaledCplx v = b.entry(0, 1);
  if (!v.representable())
    throw NumericalError("r0_kernel: value exceeds double range");
  return {v.value(), hp, BranchNote::two_solution};
}

GreenKernelEval r0_kernel(double x, double y, cplx lambda) {
  if (lambda.imag() == 0.0)
    throw InputError("r0_kernel: real lambda requires an explicit half plane");
  return r0_kernel(x, y, lambda,
                   lambda.imag() > 0.0 ? HalfPlane::upper : HalfPlane::lower);
}

namespace {

// Integrate 2 e^{i theta/2} int_0^inf g(s^2 e^{i theta}) ds over the rotated
// ray by unit s-blocks; g must decay inside the rotated sector.
cplx rotated_ray_integral(const std::function<cplx(cplx)>& g, double theta, double abs_tol,
                          double* achieved_err) {
  cplx total = 0.0;
  double err = 0.0;
  const cplx dir = std::exp(cplx(0.0, theta));
  int quiet = 0;
  bool done = false;
  for (int k = 0; k < 64 && !done; ++k) {
    auto f = [&](double s) { return g(s * s * dir); };
    IntegralResult blk = integrate_gk(f, k, k + 1.0, abs_tol * 0.05);
    total += blk.value;
    err += blk.err;
    double mag = std::abs(blk.value);
    if (mag < 0.02 * abs_tol * (1.0 + std::abs(total)))
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 2 && k >= 2) done = true;
  }
  total *= 2.0 * std::exp(cplx(0.0, theta / 2.0));
  if (achieved_err) *achieved_err = 2.0 * err;
  if (!done)
    throw NonConvergenceError("rotated_ray_integral: tail did not decay", 2.0 * err);
  return total;
}

}  // namespace

cplx r0_time_integral(double x, double y, cplx lambda, double abs_tol) {
  if (!(lambda.imag() > 0.0))
    throw InputError("r0_time_integral: requires Im lambda > 0");
  const cplx lam_eff = lambda - 0.5 * (x + y);
  const double c = (x - y) * (x - y);
  double arg_eff = std::arg(lam_eff);
  if (arg_eff <= 0.0) arg_eff = 1e-12;
  const double theta = -std::min(0.6 * arg_eff, 0.45);
  auto g = [&](cplx t) -> cplx {
    if (t == cplx(0.0)) return c == 0.0 ? cplx(1.0) : cplx(0.0);
    cplx phase = cplx(0.0, 1.0) * (t * lam_eff + c / (4.0 * t) - t * t * t / 12.0);
    return std::exp(phase);
  };
  double err = 0.0;
  cplx integral = rotated_ray_integral(g, theta, abs_tol, &err);
  const cplx pref = std::exp(cplx(0.0, kPi / 4.0)) / std::sqrt(4.0 * kPi);
  return pref * integral;
}

cplx trace_y0_oscillatory(const Potential& v, cplx lambda, double abs_tol) {
  if (v.is_zero()) return 0.0;
  if (lambda.imag() < 0.0)
    throw InputError("trace_y0_oscillatory: requires Im lambda >= 0");
  double argl = std::arg(lambda);
  if (argl <= 0.0)
    throw NonConvergenceError(
        "trace_y0_oscillatory: no decay for real positive lambda", 1.0);
  const double theta = -std::min(0.6 * argl, 0.6);
  auto g = [&](cplx t) -> cplx {
    if (t == cplx(0.0)) return fourier_hat_c(v, 0.0);
    cplx phase = cplx(0.0, 1.0) * (t * lambda - t * t * t / 12.0);
    return std::exp(phase) * fourier_hat_c(v, t);
  };
  double err = 0.0;
  cplx integral = rotated_ray_integral(g, theta, abs_tol, &err);
  const cplx pref = std::exp(cplx(0.0, kPi / 4.0)) / std::sqrt(2.0);
  return pref * integral;
}

}  // namespace stark
