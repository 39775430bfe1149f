#include "stark/potential.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace stark {

namespace {

// Not-a-knot cubic spline through (x_i, y_i): third derivative continuous at
// the first and last interior knots, O(h^4) accurate up to the boundary.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 4) return;
    auto h = [&](size_t i) { return x_[i + 1] - x_[i]; };
    // corner relations M_0 = a0 M_1 + b0 M_2 and M_{n-1} = a1 M_{n-2} + b1 M_{n-3}
    double a0 = (h(0) + h(1)) / h(1), b0 = -h(0) / h(1);
    double a1 = (h(n - 2) + h(n - 3)) / h(n - 3), b1 = -h(n - 2) / h(n - 3);
    size_t m = n - 2;  // unknowns M_1 .. M_{n-2}
    std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), rhs(m, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      size_t k = i - 1;
      double h0 = h(i - 1), h1 = h(i);
      lo[k] = h0 / 6.0;
      di[k] = (h0 + h1) / 3.0;
      up[k] = h1 / 6.0;
      rhs[k] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    // fold the corner relations into the first/last interior rows
    di[0] += lo[0] * a0;
    up[0] += lo[0] * b0;
    lo[0] = 0.0;
    di[m - 1] += up[m - 1] * a1;
    lo[m - 1] += up[m - 1] * b1;
    up[m - 1] = 0.0;
    for (size_t k = 1; k < m; ++k) {
      double w = lo[k] / di[k - 1];
      di[k] -= w * up[k - 1];
      rhs[k] -= w * rhs[k - 1];
    }
    std::vector<double> sol(m, 0.0);
    sol[m - 1] = rhs[m - 1] / di[m - 1];
    for (size_t k = m - 1; k-- > 0;) sol[k] = (rhs[k] - up[k] * sol[k + 1]) / di[k];
    for (size_t k = 0; k < m; ++k) m_[k + 1] = sol[k];
    m_[0] = a0 * m_[1] + b0 * m_[2];
    m_[n - 1] = a1 * m_[n - 2] + b1 * m_[n - 3];
  }

  double operator()(double x) const {
    size_t n = x_.size();
    if (n < 2) return n ? y_[0] : 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    size_t i = std::min<size_t>(std::max<ptrdiff_t>(1, it - x_.begin()), n - 1);
    double h = x_[i] - x_[i - 1];
    double A = (x_[i] - x) / h, B = (x - x_[i - 1]) / h;
    return A * y_[i - 1] + B * y_[i] +
           ((A * A * A - A) * m_[i - 1] + (B * B * B - B) * m_[i]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace

Potential make_potential(const PotentialSpec& spec) {
  if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma))
    throw InputError("make_potential: gamma must be positive and finite");
  Potential v;
  v.gamma_ = spec.gamma;
  double gamma = spec.gamma;

  if (spec.form == "box") {
    double h = spec.coeffs.empty() ? 1.0 : spec.coeffs[0];
    if (!std::isfinite(h)) throw InputError("make_potential: non-finite coefficient");
    v.kind_ = PotentialKind::piecewise_polynomial;
    v.condition_c_ = true;
    v.v0_ = v.vg_ = h;
    v.is_zero_ = (h == 0.0);
    v.eval_ = [h](double) { return h; };
  } else if (spec.form == "linear" || spec.form == "poly") {
    std::vector<double> c = spec.coeffs;
    if (spec.form == "linear" && c.size() != 2)
      throw InputError("make_potential: linear form needs exactly 2 coefficients");
    if (c.empty()) throw InputError("make_potential: poly form needs coefficients");
    for (double ck : c)
      if (!std::isfinite(ck)) throw InputError("make_potential: non-finite coefficient");
    v.kind_ = PotentialKind::closed_form;
    v.condition_c_ = true;
    auto horner = [c](double x) {
      double s = 0.0;
      for (size_t k = c.size(); k-- > 0;) s = s * x + c[k];
      return s;
    };
    v.v0_ = horner(0.0);
    v.vg_ = horner(gamma);
    v.is_zero_ = std::all_of(c.begin(), c.end(), [](double a) { return a == 0.0; });
    v.eval_ = horner;
  } else if (spec.form == "samples") {
    const auto& xs = spec.sample_x;
    const auto& vs = spec.sample_v;
    if (xs.size() != vs.size() || xs.size() < 4)
      throw InputError("make_potential: samples need matching x/v arrays, >= 4 points");
    for (size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(vs[i]))
        throw InputError("make_potential: non-finite sample");
      if (i && xs[i] <= xs[i - 1]) throw InputError("make_potential: x samples not increasing");
    }
    if (std::abs(xs.front()) > 1e-12 * gamma || std::abs(xs.back() - gamma) > 1e-12 * gamma)
      throw InputError("make_potential: samples must span [0, gamma]");
    double tv = 0.0;
    for (size_t i = 1; i < vs.size(); ++i) tv += std::abs(vs[i] - vs[i - 1]);
    if (!std::isfinite(tv)) throw InputError("make_potential: total variation not finite");
    // clamp endpoint values to zero so the support cutoff stays continuous
    std::vector<double> vclamped = vs;
    vclamped.front() = 0.0;
    vclamped.back() = 0.0;
    auto spline = std::make_shared<CubicSpline>(xs, vclamped);
    v.kind_ = PotentialKind::grid_samples;
    v.condition_c_ = true;
    v.v0_ = 0.0;
    v.vg_ = 0.0;
    v.is_zero_ = std::all_of(vclamped.begin(), vclamped.end(), [](double a) { return a == 0.0; });
    v.eval_ = [spline](double x) { return (*spline)(x); };
  } else {
    throw InputError("make_potential: unknown form '" + spec.form + "'");
  }

  // L^2 sanity at construction
  auto res = integrate_gk([&v](double x) { return cplx(v(x) * v(x), 0.0); }, 0.0, gamma, 1e-10);
  if (!std::isfinite(res.value.real()))
    throw InputError("make_potential: L2 norm check failed");
  return v;
}

SignSplit split_sign(const Potential& v) {
  auto sqrt_abs = [v](double x) { return std::sqrt(std::abs(v(x))); };
  auto sign = [v](double x) -> int {
    double val = v(x);
    return (val > 0.0) - (val < 0.0);
  };
  auto signed_sqrt = [sqrt_abs, sign](double x) {
    return sqrt_abs(x) * sign(x);
  };
  return {sqrt_abs, signed_sqrt, sign};
}

double v0_integral(const Potential& v) {
  if (v.is_zero()) return 0.0;
  auto res = integrate_gk([&v](double x) { return cplx(v(x), 0.0); }, 0.0, v.gamma(), 1e-13);
  return res.value.real();
}

cplx fourier_hat_c(const Potential& v, cplx t) {
  if (v.is_zero()) return 0.0;
  // fixed composite Gauss, oscillation-resolved panel count
  static const QuadratureRule base = build_rule(16, 1.0);
  double gamma = v.gamma();
  int panels = std::max(1, static_cast<int>(std::ceil(std::abs(t) * gamma / 4.0)));
  panels = std::min(panels, 4000);
  cplx sum = 0.0;
  double h = gamma / panels;
  for (int p = 0; p < panels; ++p) {
    double a = p * h;
    for (int i = 0; i < base.size(); ++i) {
      double x = a + h * base.nodes[i];
      sum += h * base.weights[i] * v(x) * std::exp(cplx(0.0, -1.0) * x * t);
    }
  }
  return sum / kSqrt2Pi;
}

cplx fourier_hat(const Potential& v, double t) { return fourier_hat_c(v, cplx(t, 0.0)); }

QuadratureRule rule_for_potential(const Potential& v, int n) {
  const auto& br = v.interior_breaks();
  if (br.empty() || br.size() > 8) return build_rule(n, v.gamma());
  return build_rule_pieces(n, v.gamma(), br);
}

}  // namespace stark
