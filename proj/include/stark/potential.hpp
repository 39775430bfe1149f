#ifndef STARK_POTENTIAL_HPP
#define STARK_POTENTIAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "stark/quadrature.hpp"
#include "stark/types.hpp"

namespace stark {

enum class PotentialKind { grid_samples, piecewise_polynomial, closed_form };

struct PotentialSpec {
  double gamma = 0.0;
  std::string form;  // "box" | "linear" | "poly" | "samples"
  std::vector<double> coeffs;
  std::vector<double> sample_x;
  std::vector<double> sample_v;
};

// Real potential supported on [0, gamma]; evaluation outside the support is
// exactly zero.
class Potential {
 public:
  double gamma() const { return gamma_; }
  PotentialKind kind() const { return kind_; }
  bool condition_c() const { return condition_c_; }
  double v_at_zero() const { return v0_; }
  double v_at_gamma() const { return vg_; }
  bool is_zero() const { return is_zero_; }
  const std::vector<double>& interior_breaks() const { return breaks_; }

  double operator()(double x) const {
    if (x < 0.0 || x > gamma_) return 0.0;
    return eval_(x);
  }

  friend Potential make_potential(const PotentialSpec& spec);

 private:
  double gamma_ = 0.0;
  PotentialKind kind_ = PotentialKind::closed_form;
  bool condition_c_ = false;
  bool is_zero_ = false;
  double v0_ = 0.0, vg_ = 0.0;
  std::vector<double> breaks_;
  std::function<double(double)> eval_;
};

Potential make_potential(const PotentialSpec& spec);

// V = |V|^{1/2} V^{1/2} with V^{1/2} = |V|^{1/2} sign V and sign(0) = 0.
struct SignSplit {
  std::function<double(double)> sqrt_abs;
  std::function<double(double)> signed_sqrt;
  std::function<int(double)> sign;
};

SignSplit split_sign(const Potential& v);

// integral of V over the support
double v0_integral(const Potential& v);

// (2 pi)^{-1/2} int_0^gamma V(x) e^{-i x t} dx; entire in t.
cplx fourier_hat(const Potential& v, double t);
cplx fourier_hat_c(const Potential& v, cplx t);

// Gauss rule adapted to the potential's smooth pieces.
QuadratureRule rule_for_potential(const Potential& v, int n);

}  // namespace stark

#endif
