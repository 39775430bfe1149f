#ifndef STARK_RESONANCES_HPP
#define STARK_RESONANCES_HPP

#include <functional>
#include <utility>
#include <vector>

#include "stark/scattering.hpp"

namespace stark {

struct Resonance {
  cplx lambda;                  // strictly below the real axis
  int multiplicity = 1;
  double refine_residual = 0.0;  // |D-| at the zero / local scale on the Newton circle
  bool newton_converged = false;
};

struct ResonanceSet {
  std::vector<Resonance> items;  // sorted by |lambda|, ties by argument
  double search_radius = 0.0;
  cplx p_const{0.0};             // D+'(0)/D+(0)
  cplx d_plus_at_zero{1.0};
  bool certified = false;        // argument-principle count matches the set
};

struct ResonanceOptions {
  int n_count = 48;     // quadrature size for winding counts
  int n_refine = 128;   // base size for Newton refinement
  bool richardson = true;  // pair (N, 2N) extrapolation of the determinant
  double strip = 1e-3;  // excluded band above the real axis
  int threads = 1;
  double stall_diameter = 1e-6;  // cluster size treated as one multiple zero
};

// D_-(lambda) on the closed upper half plane via D_- = S * D_+, with an
// optional Richardson pair in the rule size. Thread-safe, stateless.
class DMinusEvaluator {
 public:
  DMinusEvaluator(const Potential& v, int n, bool richardson);
  ScaledCplx scaled(cplx lambda) const;   // D_-(lambda), overflow-safe
  cplx operator()(cplx lambda) const;
  ScaledCplx d_plus_scaled(cplx lambda) const;
  int rule_size() const { return rule_.size(); }

 private:
  ScaledCplx eval_one(cplx lambda, const QuadratureRule& rule, bool plus) const;
  const Potential* v_;
  QuadratureRule rule_, rule2_;
  bool richardson_;
};

// Analytic extension D_-(lambda) = S(lambda) D_+(lambda) into the upper half
// plane; on the real axis it matches det_side(..., minus).
cplx d_minus_upper(const Potential& v, cplx lambda, const QuadratureRule& rule);
// log-scale variant (principal branch of the mantissa)
cplx log_d_minus_upper(const Potential& v, cplx lambda, const QuadratureRule& rule);

// Entire extension of D_+: boundary determinant above the axis,
// conj(D_-(conj lambda)) below it.
cplx d_plus_lower(const Potential& v, cplx lambda, const QuadratureRule& rule);
cplx d_plus_entire(const Potential& v, cplx lambda, const QuadratureRule& rule);

// Argument-principle count of zeros of D_- inside the open rectangle
// [re_lo, re_hi] x [im_lo, im_hi], im_lo > 0. Throws CertificationError when a
// zero sits on the contour after the retry budget.
int count_zeros_contour(const Potential& v, double re_lo, double re_hi, double im_lo,
                        double im_hi, const QuadratureRule& rule);

ResonanceSet find_resonances(const Potential& v, double radius,
                             const ResonanceOptions& opts = {});

// Re-run Newton on a known zero of D_- (position given in C+) at a different
// rule size; used for quadrature-stability checks.
cplx refine_resonance(const Potential& v, cplx zero_upper, int n, bool richardson = true);

int counting_function(const ResonanceSet& rs, double r);

// Truncated genus-1 Hadamard product D+(0) e^{p lambda} prod (1 - l/ln) e^{l/ln}.
cplx hadamard_eval(const ResonanceSet& rs, cplx lambda, double radius);

// Heuristic size of the discarded tail of the resonance sums at this
// truncation radius: |lambda|^2 times the |l_n|^{-2} mass of the outermost
// half-shell, which proxies the next shell under the r^{3/2} counting law.
// A diagnostic, never a certified bound.
double truncation_tail_indicator(const ResonanceSet& rs, cplx lambda, double radius);

// |Tr(R0 - R)(lambda) - p - sum_{|ln|<=radius} lambda/(ln (lambda - ln))|.
double trace_formula_residual(const Potential& v, const ResonanceSet& rs, cplx lambda,
                              const QuadratureRule& rule, double radius);

// Unwrapped phase and its derivative on a uniform grid, shared by the
// Breit-Wigner and Krein checks.
struct PhaseCurve {
  std::vector<double> grid;
  std::vector<double> phase;
  std::vector<double> dphase;
};
PhaseCurve make_phase_curve(const Potential& v, double lo, double hi, int npts,
                            const QuadratureRule& rule, int threads = 1);
double phase_curve_at(const PhaseCurve& pc, double lambda);
double phase_curve_deriv_at(const PhaseCurve& pc, double lambda);

// Breit-Wigner form: lhs = phi'_sc(lambda) from the phase grid, rhs =
// Im(p)/pi + (lambda/pi) Im sum 1/(ln (lambda - ln)).
std::pair<double, double> breit_wigner_phase(const ResonanceSet& rs, const PhaseCurve& pc,
                                             double lambda, double radius);

// Krein-form consistency: -int f phi'_sc dt computed with the direct phase
// derivative and with the resonance-sum form.
std::pair<double, double> krein_consistency(const ResonanceSet& rs, const PhaseCurve& pc,
                                            const std::function<double(double)>& f,
                                            double radius);

// S reconstructed from resonances only: S(0) S1(lambda) with
// S1 = e^{-2 pi i phi'(0) lambda} prod (1-l/conj(ln))/(1-l/ln) e^{l/conj(ln)-l/ln}
// and S(0) recovered from conj(S1) far to the left. phi'(0) = Im(p)/pi.
cplx s1_product(const ResonanceSet& rs, cplx lambda, double radius);
cplx s_from_resonances(const ResonanceSet& rs, cplx lambda, double far_left_anchor,
                       double radius);

}  // namespace stark

#endif
