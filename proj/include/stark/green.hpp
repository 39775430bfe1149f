#ifndef STARK_GREEN_HPP
#define STARK_GREEN_HPP

#include <vector>

#include "stark/airy.hpp"
#include "stark/potential.hpp"
#include "stark/types.hpp"

namespace stark {

enum class BranchNote { two_solution, time_integral };

struct GreenKernelEval {
  cplx value;
  HalfPlane half_plane;
  BranchNote branch_note;
};

// Airy data for one (lambda, node set, half plane): u_+(x) = Ai(x - lambda)
// recessive at +inf, u_-(x) = Ai(omega (x - lambda)) the outgoing rotated
// solution, and their x-independent Wronskian. All values carry a shared
// real exponent so assembly never overflows.
struct KernelBasis {
  cplx lambda;
  HalfPlane hp;
  cplx omega;
  std::vector<AiryScaled> up;
  std::vector<AiryScaled> um;
  cplx w_mantissa;
  double w_log = 0.0;

  // R0(x_i, x_j, lambda); nodes must be ascending.
  ScaledCplx entry(int i, int j) const {
    int a = std::min(i, j), b = std::max(i, j);
    return {-um[a].ai_m * up[b].ai_m / w_mantissa,
            um[a].log_scale + up[b].log_scale - w_log};
  }
  // d/dlambda of R0(x_i, x_j, lambda), from the Airy chain rule.
  ScaledCplx entry_dlambda(int i, int j) const {
    int a = std::min(i, j), b = std::max(i, j);
    return {(omega * um[a].aip_m * up[b].ai_m + um[a].ai_m * up[b].aip_m) / w_mantissa,
            um[a].log_scale + up[b].log_scale - w_log};
  }
};

KernelBasis make_kernel_basis(cplx lambda, const std::vector<double>& nodes, HalfPlane hp);

// Two-solution Sturm-Liouville evaluation of the free resolvent kernel.
GreenKernelEval r0_kernel(double x, double y, cplx lambda, HalfPlane hp);
// Chooses the half plane from sign(Im lambda); real lambda is rejected.
GreenKernelEval r0_kernel(double x, double y, cplx lambda);

// Oscillatory time-integral representation of R0(x, y, lambda), Im lambda > 0.
// Contour-rotated adaptive quadrature; used as an independent oracle.
cplx r0_time_integral(double x, double y, cplx lambda, double abs_tol = 1e-9);

// Tr Y0(lambda) via the one-dimensional oscillatory integral over the Fourier
// transform of V; Im lambda >= 0 (convergence requires arg lambda > 0).
cplx trace_y0_oscillatory(const Potential& v, cplx lambda, double abs_tol = 1e-9);

}  // namespace stark

#endif
