#ifndef STARK_STUDIES_HPP
#define STARK_STUDIES_HPP

#include <string>
#include <vector>

#include "stark/resonances.hpp"

namespace stark {

enum class ClaimId {
  logdet_1_8,   // log D+ = i V0/(2 sqrt(lambda)) + O(1/lambda^tau)
  phase_1_9,    // phi_sc = V0/(2 pi sqrt(lambda)) + ...
  trace_2_43,   // Tr Y0 = i V0/(2 sqrt(lambda)) + O(1)/lambda, both routes
  born_4_9,     // A0 leading form in the |arg lambda| >= eps sector
  born_4_13,    // |A0| sector bound for |arg zeta| <= pi/6
  ray_5_5,      // A0 on the e^{i pi/3} ray: e^{(4/3)t^3} V(0)/(8 pi t^2)
  ray_5_12,     // log|D-| cubic growth with coefficient 4/3 on the ray
};

const char* claim_name(ClaimId id);
ClaimId claim_from_name(const std::string& name);
double claim_tolerance(ClaimId id);

struct StudySample {
  double parameter;
  cplx observed;
  cplx predicted;
};

struct StudyFit {
  double exponent = 0.0;
  cplx coefficient{0.0};
  double residual = 0.0;
};

struct AsymptoticStudy {
  ClaimId claim_id;
  std::vector<StudySample> samples;  // sorted by parameter
  StudyFit fit;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

// Runs the named study on its default parameter grid when `grid` is empty.
AsymptoticStudy run_study(const Potential& v, ClaimId claim,
                          const std::vector<double>& grid, const QuadratureRule& rule,
                          int threads = 1);

}  // namespace stark

#endif
