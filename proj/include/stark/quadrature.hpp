#ifndef STARK_QUADRATURE_HPP
#define STARK_QUADRATURE_HPP

#include <functional>
#include <memory>
#include <vector>

#include "stark/types.hpp"

namespace stark {

// Gauss-Legendre rule on [0, gamma] (possibly composite over smooth pieces).
// Nodes strictly increasing, weights positive, sum of weights = gamma.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;  // polynomial exactness degree
  double gamma = 0.0;
  std::vector<double> piece_edges;  // {0, ..., gamma}; >2 entries for composite rules

  int size() const { return static_cast<int>(nodes.size()); }
};

QuadratureRule build_rule(int n, double gamma);

// Composite rule with n points per smooth piece; breaks must lie in (0, gamma).
QuadratureRule build_rule_pieces(int n, double gamma, const std::vector<double>& breaks);

struct IntegralResult {
  cplx value{0.0};
  double err = 0.0;
  bool converged = false;
  int evals = 0;
};

// Adaptive Gauss-Kronrod (7,15) on [a, b].
IntegralResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                            double abs_tol, int max_intervals = 2000);

}  // namespace stark

#endif
