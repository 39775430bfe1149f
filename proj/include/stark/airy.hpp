#ifndef STARK_AIRY_HPP
#define STARK_AIRY_HPP

#include <string>

#include "stark/types.hpp"

namespace stark {

// Evaluation path that produced a value. The series/asymptotic crossover
// radius is airy_crossover_radius(); the connection path reroutes arguments
// near the negative real axis through numerically stable sectors.
enum class AiryRegime { series, asymptotic, connection };

struct AiryValue {
  cplx ai;
  cplx ai_prime;
  AiryRegime regime;
  double est_abs_err;
};

// Ai and Ai' scaled by a common real exponent: Ai(z) = ai_m * exp(log_scale),
// Ai'(z) = aip_m * exp(log_scale). Mantissas stay O(1) in the growth regime,
// so kernel products can be assembled without overflow.
struct AiryScaled {
  cplx ai_m;
  cplx aip_m;
  double log_scale;
  AiryRegime regime;
  double est_err_m;  // absolute error estimate at mantissa scale
};

struct AiryLog {
  cplx log_ai;
  cplx log_ai_prime;
};

double airy_crossover_radius();

// Ai(z) and Ai'(z), |z| <= airy_r_max(). Throws OverflowRiskError when the
// value leaves the double exponent range (use airy_ai_log / airy_ai_scaled).
AiryValue airy_ai(cplx z);

// Ai(e^{2 pi i/3} z): the second, linearly independent solution of w'' = z w
// used for the outgoing branch of the free resolvent.
AiryValue airy_rotated(cplx z);

AiryScaled airy_ai_scaled(cplx z);

// exp(log_ai) = Ai(z) up to a 2*pi*i branch in the imaginary part.
AiryLog airy_ai_log(cplx z);

double airy_r_max();

// Optional persistent memo for scaled evaluations (STARK_CACHE_DIR support).
// Cached values are bitwise identical to recomputation, so enabling the memo
// never changes results.
void airy_memo_enable(const std::string& dir);
void airy_memo_flush();

namespace detail {
// Ai''(z) from its own series/expansion (not from the ODE); test support for
// the w'' = z w residual check.
cplx airy_second_reference(cplx z);
// Force a specific path; used by crossover-continuity tests.
AiryScaled airy_series_forced(cplx z);
AiryScaled airy_asymptotic_forced(cplx z);
}  // namespace detail

}  // namespace stark

#endif
