#ifndef STARK_TYPES_HPP
#define STARK_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>

namespace stark {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline const double kSqrtPi = std::sqrt(kPi);
inline const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// e^{+-2 pi i / 3}, the rotations generating the second Airy solution.
inline const cplx kOmegaPlus{-0.5, 0.86602540378443864676};
inline const cplx kOmegaMinus{-0.5, -0.86602540378443864676};

enum class HalfPlane { upper, lower };
enum class Side { plus, minus };

inline HalfPlane half_plane_of(Side s) {
  return s == Side::plus ? HalfPlane::upper : HalfPlane::lower;
}
inline cplx rotation_of(HalfPlane hp) {
  return hp == HalfPlane::upper ? kOmegaPlus : kOmegaMinus;
}

// Value v represented as mantissa * exp(log_scale) with log_scale real.
// Keeps exponentially large/small quantities out of linear arithmetic.
struct ScaledCplx {
  cplx mantissa{0.0, 0.0};
  double log_scale{0.0};

  cplx value() const { return mantissa * std::exp(log_scale); }
  bool representable(double max_log = 690.0) const {
    return mantissa == cplx(0.0) || log_scale + std::log(std::abs(mantissa) + 1e-300) < max_log;
  }
};

inline ScaledCplx scaled_from(cplx v) { return {v, 0.0}; }

inline ScaledCplx scaled_mul(const ScaledCplx& a, const ScaledCplx& b) {
  return {a.mantissa * b.mantissa, a.log_scale + b.log_scale};
}
inline ScaledCplx scaled_div(const ScaledCplx& a, const ScaledCplx& b) {
  return {a.mantissa / b.mantissa, a.log_scale - b.log_scale};
}
inline ScaledCplx scaled_add(const ScaledCplx& a, const ScaledCplx& b) {
  if (a.mantissa == cplx(0.0)) return b;
  if (b.mantissa == cplx(0.0)) return a;
  if (a.log_scale >= b.log_scale)
    return {a.mantissa + b.mantissa * std::exp(b.log_scale - a.log_scale), a.log_scale};
  return {b.mantissa + a.mantissa * std::exp(a.log_scale - b.log_scale), b.log_scale};
}
// Principal log of the represented value; the 2*pi*i branch is that of the mantissa.
inline cplx scaled_log(const ScaledCplx& a) {
  return std::log(a.mantissa) + a.log_scale;
}

// sqrt(lambda) in the closed upper half plane: principal root flipped so that
// Im sqrt >= 0, with the positive root on the positive real axis.
inline cplx sqrt_upper(cplx lambda) {
  cplx s = std::sqrt(lambda);
  if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
  return s;
}

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergenceError : NumericalError {
  double achieved_error;
  NonConvergenceError(const std::string& what, double err)
      : NumericalError(what), achieved_error(err) {}
};
struct OverflowRiskError : NumericalError {
  using NumericalError::NumericalError;
};
struct BranchError : NumericalError {
  using NumericalError::NumericalError;
};
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stark

#endif
