#ifndef STARK_FREDHOLM_HPP
#define STARK_FREDHOLM_HPP

#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "stark/green.hpp"
#include "stark/potential.hpp"
#include "stark/quadrature.hpp"
#include "stark/types.hpp"

namespace stark {

struct SandwichMatrix {
  Eigen::MatrixXcd entries;
  cplx lambda;
  HalfPlane half_plane;
  int rule_size = 0;
};

struct DeterminantSample {
  cplx lambda;
  cplx d_value;
  cplx log_d;
  Side side;
  int rule_size = 0;
};

SandwichMatrix build_y0(const Potential& v, cplx lambda, const QuadratureRule& rule,
                        HalfPlane hp);

// d/dlambda of the discretized Y0 (analytic Airy chain rule; the derivative
// kernel is C^1 across the diagonal, so plain weights suffice).
SandwichMatrix build_y0_dlambda(const Potential& v, cplx lambda, const QuadratureRule& rule,
                                HalfPlane hp);

// One lambda, shared across determinant, resolvent and amplitude consumers.
struct KernelSystem {
  cplx lambda;
  HalfPlane hp;
  KernelBasis basis;
  Eigen::MatrixXcd y0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;  // of I + y0
  cplx det;
};

KernelSystem make_kernel_system(const Potential& v, cplx lambda, const QuadratureRule& rule,
                                HalfPlane hp);

DeterminantSample det_side(const Potential& v, cplx lambda, const QuadratureRule& rule,
                           Side side);

struct AdaptiveDet {
  DeterminantSample sample;
  double delta = 0.0;  // |d(N) - d(N/2)|
  bool converged = false;
};
AdaptiveDet det_adaptive(const Potential& v, cplx lambda, Side side, double tol = 1e-8,
                         int n0 = 128, int n_max = 2048);

// Y = Y0 (I + Y0)^{-1}; (I - Y)(I + Y0) = I.
SandwichMatrix y_full(const Potential& v, cplx lambda, const QuadratureRule& rule, HalfPlane hp);

// D'/D = Tr (I + Y0)^{-1} dY0/dlambda, lambda strictly inside the side.
cplx logdet_prime(const Potential& v, cplx lambda, const QuadratureRule& rule, Side side);

double nuclear_norm(const Eigen::MatrixXcd& m);

// -log D = sum_n Tr(-Y0)^n / n, valid where nuclear norm < 1; tail bound
// ||Y0||^{N+1}/(N+1) drives truncation.
cplx neumann_log_det(const Potential& v, cplx lambda, const QuadratureRule& rule, Side side,
                     double tol = 1e-12);

// Smallest radius (dyadic search) along direction dir with nuclear norm < 1/2.
double find_anchor_radius(const Potential& v, const QuadratureRule& rule, cplx dir,
                          Side side = Side::plus);

// Branch-tracked log-determinant along a caller-supplied path. The first
// point must satisfy the Neumann criterion; consecutive points whose phases
// differ by >= pi/2 raise BranchError (refine the path).
std::vector<DeterminantSample> log_det_tracked(const Potential& v,
                                               const std::vector<cplx>& path,
                                               const QuadratureRule& rule, Side side);

// Convenience: branch-consistent log D at a single target, path built and
// refined internally from a Neumann anchor on the imaginary axis.
cplx tracked_log_at(const Potential& v, cplx target, const QuadratureRule& rule, Side side);

}  // namespace stark

#endif
