#include "stark/fredholm.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace stark {

namespace {

HalfPlane plane_of(Side s) { return half_plane_of(s); }

void require_side(cplx lambda, Side side, const char* who) {
  if (side == Side::plus && lambda.imag() < 0.0)
    throw InputError(std::string(who) + ": plus side needs Im lambda >= 0");
  if (side == Side::minus && lambda.imag() > 0.0)
    throw InputError(std::string(who) + ": minus side needs Im lambda <= 0");
}

}  // namespace

SandwichMatrix build_y0(const Potential& v, cplx lambda, const QuadratureRule& rule,
                        HalfPlane hp) {
  const int n = rule.size();
  SandwichMatrix out;
  out.lambda = lambda;
  out.half_plane = hp;
  out.rule_size = n;
  out.entries = Eigen::MatrixXcd::Zero(n, n);
  if (v.is_zero()) return out;

  KernelBasis basis = make_kernel_basis(lambda, rule.nodes, hp);
  std::vector<double> rho(n), sigma(n), sw(n);
  for (int i = 0; i < n; ++i) {
    double vi = v(rule.nodes[i]);
    rho[i] = std::sqrt(std::abs(vi));
    sigma[i] = rho[i] * ((vi > 0.0) - (vi < 0.0));
    sw[i] = std::sqrt(rule.weights[i]);
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.entries(i, j) = sw[i] * rho[i] * basis.entry(i, j).value() * sigma[j] * sw[j];
  return out;
}

SandwichMatrix build_y0_dlambda(const Potential& v, cplx lambda, const QuadratureRule& rule,
                                HalfPlane hp) {
  const int n = rule.size();
  SandwichMatrix out;
  out.lambda = lambda;
  out.half_plane = hp;
  out.rule_size = n;
  out.entries = Eigen::MatrixXcd::Zero(n, n);
  if (v.is_zero()) return out;
  KernelBasis basis = make_kernel_basis(lambda, rule.nodes, hp);
  std::vector<double> rho(n), sigma(n), sw(n);
  for (int i = 0; i < n; ++i) {
    double vi = v(rule.nodes[i]);
    rho[i] = std::sqrt(std::abs(vi));
    sigma[i] = rho[i] * ((vi > 0.0) - (vi < 0.0));
    sw[i] = std::sqrt(rule.weights[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.entries(i, j) =
          sw[i] * rho[i] * basis.entry_dlambda(i, j).value() * sigma[j] * sw[j];
  return out;
}

KernelSystem make_kernel_system(const Potential& v, cplx lambda, const QuadratureRule& rule,
                                HalfPlane hp) {
  SandwichMatrix m = build_y0(v, lambda, rule, hp);
  KernelSystem sys{lambda, hp, make_kernel_basis(lambda, rule.nodes, hp),
                   std::move(m.entries),
                   Eigen::PartialPivLU<Eigen::MatrixXcd>(), cplx(0.0)};
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(sys.y0.rows(), sys.y0.cols()) + sys.y0;
  sys.lu.compute(a);
  sys.det = sys.lu.determinant();
  return sys;
}

DeterminantSample det_side(const Potential& v, cplx lambda, const QuadratureRule& rule,
                           Side side) {
  require_side(lambda, side, "det_side");
  SandwichMatrix m = build_y0(v, lambda, rule, plane_of(side));
  Eigen::MatrixXcd a =
      Eigen::MatrixXcd::Identity(m.entries.rows(), m.entries.cols()) + m.entries;
  cplx d = Eigen::PartialPivLU<Eigen::MatrixXcd>(a).determinant();
  if (!(std::abs(d) > 0.0))
    throw NumericalError("det_side: vanishing discrete determinant in the closed half-plane "
                         "signals under-resolution");
  return {lambda, d, std::log(d), side, rule.size()};
}

AdaptiveDet det_adaptive(const Potential& v, cplx lambda, Side side, double tol, int n0,
                         int n_max) {
  AdaptiveDet out;
  cplx prev = 0.0;
  for (int n = n0; n <= n_max; n *= 2) {
    QuadratureRule rule = rule_for_potential(v, n);
    out.sample = det_side(v, lambda, rule, side);
    if (n > n0) {
      out.delta = std::abs(out.sample.d_value - prev);
      if (out.delta <= tol) {
        out.converged = true;
        return out;
      }
    }
    prev = out.sample.d_value;
  }
  return out;
}

SandwichMatrix y_full(const Potential& v, cplx lambda, const QuadratureRule& rule, HalfPlane hp) {
  KernelSystem sys = make_kernel_system(v, lambda, rule, hp);
  if (!(std::abs(sys.det) > 0.0))
    throw NumericalError("y_full: I + Y0 singular at the discrete level");
  SandwichMatrix out;
  out.lambda = lambda;
  out.half_plane = hp;
  out.rule_size = rule.size();
  out.entries = sys.lu.solve(sys.y0);
  return out;
}

cplx logdet_prime(const Potential& v, cplx lambda, const QuadratureRule& rule, Side side) {
  if ((side == Side::plus && lambda.imag() <= 0.0) ||
      (side == Side::minus && lambda.imag() >= 0.0))
    throw InputError("logdet_prime: lambda must lie strictly inside the side's half plane");
  if (v.is_zero()) return 0.0;
  KernelSystem sys = make_kernel_system(v, lambda, rule, plane_of(side));
  SandwichMatrix dm = build_y0_dlambda(v, lambda, rule, plane_of(side));
  return sys.lu.solve(dm.entries).trace();
}

double nuclear_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().sum();
}

cplx neumann_log_det(const Potential& v, cplx lambda, const QuadratureRule& rule, Side side,
                     double tol) {
  if (v.is_zero()) return 0.0;
  SandwichMatrix m = build_y0(v, lambda, rule, plane_of(side));
  double norm1 = nuclear_norm(m.entries);
  if (norm1 >= 1.0)
    throw NumericalError("neumann_log_det: ||Y0||_1 >= 1, outside the Neumann zone");
  cplx logd = 0.0;
  Eigen::MatrixXcd power = m.entries;
  double bound = norm1;
  for (int n = 1; n <= 80; ++n) {
    logd += ((n % 2 == 1) ? 1.0 : -1.0) / double(n) * power.trace();
    bound *= norm1;
    if (bound / (n + 1.0) < tol) break;
    power = power * m.entries;
  }
  return logd;
}

double find_anchor_radius(const Potential& v, const QuadratureRule& rule, cplx dir, Side side) {
  if (v.is_zero()) return 64.0;
  cplx d = dir / std::abs(dir);
  for (double r = 64.0; r <= 1.1e5; r *= 2.0) {
    SandwichMatrix m = build_y0(v, r * d, rule, plane_of(side));
    if (nuclear_norm(m.entries) < 0.5) return r;
  }
  throw NumericalError("find_anchor_radius: Neumann zone not reached");
}

std::vector<DeterminantSample> log_det_tracked(const Potential& v,
                                               const std::vector<cplx>& path,
                                               const QuadratureRule& rule, Side side) {
  if (path.empty()) return {};
  std::vector<DeterminantSample> out;
  out.reserve(path.size());
  SandwichMatrix m0 = build_y0(v, path[0], rule, plane_of(side));
  if (!v.is_zero() && nuclear_norm(m0.entries) >= 0.5)
    throw InputError("log_det_tracked: anchor outside the Neumann zone (||Y0|| >= 1/2)");
  DeterminantSample first = det_side(v, path[0], rule, side);
  first.log_d = neumann_log_det(v, path[0], rule, side);
  out.push_back(first);
  for (size_t k = 1; k < path.size(); ++k) {
    DeterminantSample s = det_side(v, path[k], rule, side);
    cplx ratio = s.d_value / out.back().d_value;
    double dphi = std::arg(ratio);
    if (std::abs(dphi) >= kPi / 2.0)
      throw BranchError("log_det_tracked: phase step >= pi/2, refine the path");
    s.log_d = cplx(std::log(std::abs(s.d_value)), out.back().log_d.imag() + dphi);
    out.push_back(s);
  }
  return out;
}

namespace {

struct TrackState {
  cplx lambda;
  cplx d;
  cplx logd;
};

void continue_to(const Potential& v, const QuadratureRule& rule, Side side, TrackState& st,
                 cplx target, int depth) {
  DeterminantSample s = det_side(v, target, rule, side);
  cplx ratio = s.d_value / st.d;
  double dphi = std::arg(ratio);
  if (std::abs(dphi) >= 1.3) {
    if (depth > 48) throw BranchError("tracked_log_at: branch tracking failed to converge");
    cplx mid = 0.5 * (st.lambda + target);
    continue_to(v, rule, side, st, mid, depth + 1);
    continue_to(v, rule, side, st, target, depth + 1);
    return;
  }
  st.lambda = target;
  st.d = s.d_value;
  st.logd = cplx(std::log(std::abs(s.d_value)), st.logd.imag() + dphi);
}

}  // namespace

cplx tracked_log_at(const Potential& v, cplx target, const QuadratureRule& rule, Side side) {
  if (v.is_zero()) return 0.0;
  require_side(target, side, "tracked_log_at");
  double sgn = side == Side::plus ? 1.0 : -1.0;
  double r = find_anchor_radius(v, rule, cplx(0.0, sgn), side);
  r = std::max(r, 4.0 * std::abs(target));
  cplx anchor(0.0, sgn * r);
  TrackState st{anchor, det_side(v, anchor, rule, side).d_value,
                neumann_log_det(v, anchor, rule, side)};
  // move horizontally at high altitude (log D stays small there), then
  // descend vertically onto the target
  continue_to(v, rule, side, st, cplx(target.real(), sgn * r), 0);
  continue_to(v, rule, side, st, target, 0);
  return st.logd;
}

}  // namespace stark
