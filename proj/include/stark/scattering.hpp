#ifndef STARK_SCATTERING_HPP
#define STARK_SCATTERING_HPP

#include <vector>

#include <Eigen/Dense>

#include "stark/fredholm.hpp"
#include "stark/potential.hpp"
#include "stark/types.hpp"

namespace stark {

// Weighted samples of the functional Psi(lambda): component_i =
// sqrt(w_i) Ai(x_i - lambda) |V(x_i)|^{1/2}. The analytic continuation keeps
// the kernel unconjugated, so norm_sq = sum c_i^2 (no conjugation); on the
// real axis it equals int Ai(x-lambda)^2 |V| dx.
struct PsiVector {
  cplx lambda;
  Eigen::VectorXcd components;
  cplx norm_sq;
};

PsiVector psi_vector(const Potential& v, cplx lambda, const QuadratureRule& rule);

struct ScatteringSample {
  cplx lambda;
  cplx a0;     // Born term, int Ai(x-lambda)^2 V(x) dx
  cplx a1;     // Psi V_S Y(lambda+i0) Psi*
  cplx s;      // 1 - 2 pi i (a0 - a1)
  double phase;  // principal -arg(s)/(2 pi); meaningful on the real axis only
};

cplx born_a0(const Potential& v, cplx lambda, const QuadratureRule& rule);
ScaledCplx born_a0_scaled(const Potential& v, cplx lambda, const QuadratureRule& rule);

cplx amplitude_a1(const Potential& v, cplx lambda, const QuadratureRule& rule);

ScatteringSample s_matrix(const Potential& v, cplx lambda, const QuadratureRule& rule);

// Everything the meromorphic continuation needs from one factorization.
struct SMatrixEval {
  cplx a0, a1, s, d_plus;
  ScaledCplx s_scaled;  // valid also when s overflows linear doubles
};
SMatrixEval s_matrix_eval(const Potential& v, const KernelSystem& sys,
                          const QuadratureRule& rule);

// Unwrapped scattering phase on an increasing real grid, pinned at the
// right end to (1/pi) Im log D_+ so that phase -> 0 at +-infinity.
std::vector<double> scattering_phase(const Potential& v, const std::vector<double>& grid,
                                     const QuadratureRule& rule, int threads = 1);

// Five-point central first derivative on a uniform grid (one-sided stencils
// at the edges).
std::vector<double> derivative_5pt(const std::vector<double>& grid,
                                   const std::vector<double>& values);

}  // namespace stark

#endif
