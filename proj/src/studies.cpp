#include "stark/studies.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "stark/green.hpp"

namespace stark {

namespace {

struct ClaimInfo {
  ClaimId id;
  const char* name;
  double tol;
};

// Tolerances from pilot convergence studies; the paper's O(.) constants are
// not quantified, so these pin the acceptance thresholds reproducibly.
const ClaimInfo kClaims[] = {
    {ClaimId::logdet_1_8, "logdet_1_8", 0.02},
    {ClaimId::phase_1_9, "phase_1_9", 0.10},
    {ClaimId::trace_2_43, "trace_2_43", 0.02},
    {ClaimId::born_4_9, "born_4_9", 0.05},
    {ClaimId::born_4_13, "born_4_13", 1.0},
    {ClaimId::ray_5_5, "ray_5_5", 0.20},
    {ClaimId::ray_5_12, "ray_5_12", 0.05},
};

const ClaimInfo& info(ClaimId id) {
  for (const auto& c : kClaims)
    if (c.id == id) return c;
  throw InputError("unknown claim id");
}

// coefficient of lambda^{-1/2} from a two-term fit c/sqrt + d/lambda
cplx sqrt_coefficient(const std::vector<StudySample>& samples, double arg) {
  Eigen::MatrixXcd a(samples.size(), 2);
  Eigen::VectorXcd b(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    cplx lam = std::polar(samples[i].parameter, arg);
    a(i, 0) = 1.0 / sqrt_upper(lam);
    a(i, 1) = 1.0 / lam;
    b(i) = samples[i].observed;
  }
  Eigen::VectorXcd c = a.colPivHouseholderQr().solve(b);
  return c(0);
}

double rms_rel_dev(const std::vector<StudySample>& s) {
  double acc = 0.0;
  for (const auto& x : s)
    acc += std::norm((x.observed - x.predicted) /
                     (std::abs(x.predicted) > 0 ? x.predicted : cplx(1.0)));
  return std::sqrt(acc / s.size());
}

std::vector<double> default_grid(ClaimId id) {
  switch (id) {
    case ClaimId::logdet_1_8:
    case ClaimId::trace_2_43: {
      std::vector<double> g;
      for (double r = 1e2; r <= 1.0001e4; r *= std::sqrt(10.0)) g.push_back(r);
      return g;
    }
    case ClaimId::phase_1_9:
      return {1e2, 3e2, 1e3, 3e3, 1e4};
    case ClaimId::born_4_9:
      return {25.0, 50.0, 100.0, 200.0, 400.0};
    case ClaimId::born_4_13:
      return {4.0, 6.25, 9.0, 12.25, 16.0, 20.25, 25.0, 30.25, 36.0, 42.25};
    case ClaimId::ray_5_5:
      return {2.0, 2.5, 3.0, 3.5, 4.0};
    case ClaimId::ray_5_12: {
      std::vector<double> g;
      for (int i = 0; i < 8; ++i) g.push_back(2.5 + 1.5 * i / 7.0);
      return g;
    }
  }
  return {};
}

}  // namespace

const char* claim_name(ClaimId id) { return info(id).name; }
double claim_tolerance(ClaimId id) { return info(id).tol; }

ClaimId claim_from_name(const std::string& name) {
  for (const auto& c : kClaims)
    if (name == c.name) return c.id;
  throw InputError("unknown study claim '" + name + "'");
}

AsymptoticStudy run_study(const Potential& v, ClaimId claim, const std::vector<double>& grid,
                          const QuadratureRule& rule, int threads) {
  (void)threads;
  AsymptoticStudy study;
  study.claim_id = claim;
  study.tolerance = info(claim).tol;
  std::vector<double> params = grid.empty() ? default_grid(claim) : grid;
  std::sort(params.begin(), params.end());
  const double v0 = v0_integral(v);

  switch (claim) {
    case ClaimId::logdet_1_8: {
      const double ray = kPi / 2.0;
      for (double r : params) {
        cplx lam = std::polar(r, ray);
        cplx obs = v.is_zero() ? cplx(0.0) : neumann_log_det(v, lam, rule, Side::plus);
        cplx pred = cplx(0.0, v0 / 2.0) / sqrt_upper(lam);
        study.samples.push_back({r, obs, pred});
      }
      study.fit.exponent = -0.5;
      if (v.is_zero()) {
        study.fit.coefficient = 0.0;
        study.fit.residual = 0.0;
        study.pass = true;
        break;
      }
      study.fit.coefficient = sqrt_coefficient(study.samples, ray);
      study.fit.residual = rms_rel_dev(study.samples);
      study.pass =
          std::abs(study.fit.coefficient - cplx(0.0, v0 / 2.0)) <= study.tolerance * v0 / 2.0;
      break;
    }
    case ClaimId::trace_2_43: {
      const double ray = kPi / 2.0;
      std::vector<StudySample> osc;
      for (double r : params) {
        cplx lam = std::polar(r, ray);
        SandwichMatrix m = build_y0(v, lam, rule, HalfPlane::upper);
        cplx pred = cplx(0.0, v0 / 2.0) / sqrt_upper(lam);
        study.samples.push_back({r, m.entries.trace(), pred});
        osc.push_back({r, trace_y0_oscillatory(v, lam), pred});
      }
      study.fit.exponent = -0.5;
      if (v.is_zero()) {
        study.pass = true;
        break;
      }
      cplx c_mat = sqrt_coefficient(study.samples, ray);
      cplx c_osc = sqrt_coefficient(osc, ray);
      study.fit.coefficient = c_mat;
      study.fit.residual = rms_rel_dev(study.samples);
      cplx expect(0.0, v0 / 2.0);
      study.pass = std::abs(c_mat - expect) <= study.tolerance * std::abs(expect) &&
                   std::abs(c_osc - expect) <= study.tolerance * std::abs(expect);
      study.note = "oscillatory-route coefficient (" + std::to_string(c_osc.real()) + ", " +
                   std::to_string(c_osc.imag()) + ")";
      break;
    }
    case ClaimId::phase_1_9: {
      for (double r : params) {
        double obs = v.is_zero()
                         ? 0.0
                         : tracked_log_at(v, cplx(r, 0.0), rule, Side::plus).imag() / kPi;
        double pred = v0 / (2.0 * kPi * std::sqrt(r));
        study.samples.push_back({r, cplx(obs), cplx(pred)});
      }
      if (v.is_zero()) {
        study.pass = true;
        break;
      }
      // log-log slope of the phase itself
      Eigen::MatrixXd a(params.size(), 2);
      Eigen::VectorXd b(params.size());
      for (size_t i = 0; i < params.size(); ++i) {
        a(i, 0) = std::log(params[i]);
        a(i, 1) = 1.0;
        b(i) = std::log(std::abs(study.samples[i].observed) + 1e-300);
      }
      Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
      study.fit.exponent = c(0);
      study.fit.coefficient = study.samples.back().observed / study.samples.back().predicted;
      study.fit.residual = rms_rel_dev(study.samples);
      study.pass = std::abs(study.fit.coefficient - 1.0) <= study.tolerance &&
                   std::abs(study.fit.exponent + 0.5) <= 0.1;
      break;
    }
    case ClaimId::born_4_9: {
      // sector |arg lambda| >= eps: use arg = 2 pi/3, zeta = i sqrt(-lambda)
      const double ray = 2.0 * kPi / 3.0;
      double prev = 1e300;
      bool shrinking = true;
      for (double r : params) {
        cplx lam = std::polar(r, ray);
        cplx zeta = cplx(0.0, 1.0) * std::sqrt(-lam);
        cplx integral = 0.0;
        for (int i = 0; i < rule.size(); ++i)
          integral += rule.weights[i] * v(rule.nodes[i]) *
                      std::exp(cplx(0.0, 2.0) * rule.nodes[i] * zeta);
        cplx pred = cplx(0.0, 1.0) / (4.0 * kPi * zeta) *
                    std::exp(cplx(0.0, -4.0 / 3.0) * zeta * zeta * zeta) * integral;
        cplx obs = v.is_zero() ? cplx(0.0) : born_a0(v, lam, rule);
        study.samples.push_back({r, obs, pred});
        if (!v.is_zero()) {
          double dev = std::abs(obs - pred) / std::abs(pred);
          if (dev > prev) shrinking = false;
          prev = dev;
        }
      }
      study.fit.exponent = 0.0;
      study.fit.residual = v.is_zero() ? 0.0 : prev;
      study.pass = v.is_zero() || (shrinking && prev <= study.tolerance);
      break;
    }
    case ClaimId::born_4_13: {
      double l1 = 0.0;
      for (int i = 0; i < rule.size(); ++i) l1 += rule.weights[i] * std::abs(v(rule.nodes[i]));
      bool ok = true;
      int k = 0;
      for (double r : params) {
        double zarg = (kPi / 6.0) * ((k % 5) - 2.0) / 2.5;  // spread across the sector
        ++k;
        cplx zeta = std::polar(std::sqrt(r), zarg);
        cplx lam = zeta * zeta;
        if (lam.imag() < 0.0) lam = std::conj(lam);
        cplx obs = v.is_zero() ? cplx(0.0) : born_a0(v, lam, rule);
        double z3im = std::abs(std::imag(zeta * zeta * zeta));
        double bound = std::exp(4.0 / 3.0 * z3im) / (2.0 * kPi * std::abs(zeta)) * l1 *
                       (1.0 + 3.0 / std::abs(zeta));
        study.samples.push_back({r, obs, cplx(bound)});
        if (std::abs(obs) > bound) ok = false;
      }
      study.fit.residual = 0.0;
      study.pass = ok;
      break;
    }
    case ClaimId::ray_5_5: {
      double prev = 1e300;
      bool shrinking = true;
      double dev3 = 0.0;
      for (double t : params) {
        cplx lam = std::polar(t * t, kPi / 3.0);
        cplx obs = v.is_zero() ? cplx(0.0) : born_a0(v, lam, rule);
        cplx pred = std::exp(cplx(0.0, 2.0 * kPi / 3.0)) *
                    std::exp(4.0 / 3.0 * t * t * t) / (8.0 * kPi * t * t) * v.v_at_zero();
        study.samples.push_back({t, obs, pred});
        if (!v.is_zero()) {
          double dev = std::abs(obs - pred) / std::abs(pred);
          if (t >= 2.9 && t <= 3.1) dev3 = dev;
          if (dev > prev) shrinking = false;
          prev = dev;
        }
      }
      study.fit.residual = v.is_zero() ? 0.0 : prev;
      study.pass = v.is_zero() || (shrinking && dev3 <= study.tolerance);
      break;
    }
    case ClaimId::ray_5_12: {
      Eigen::MatrixXd a(params.size(), 3);
      Eigen::VectorXd b(params.size());
      for (size_t i = 0; i < params.size(); ++i) {
        double t = params[i];
        cplx lam = std::polar(t * t, kPi / 3.0);
        cplx logdm = v.is_zero() ? cplx(0.0) : log_d_minus_upper(v, lam, rule);
        double pred = 4.0 / 3.0 * t * t * t - 2.0 * std::log(t) +
                      std::log(std::abs(v.v_at_zero()) / 4.0 + 1e-300);
        study.samples.push_back({t, cplx(logdm.real()), cplx(pred)});
        a(i, 0) = t * t * t;
        a(i, 1) = std::log(t);
        a(i, 2) = 1.0;
        b(i) = logdm.real();
      }
      if (v.is_zero()) {
        study.pass = true;
        break;
      }
      Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
      study.fit.exponent = 3.0;
      study.fit.coefficient = c(0);
      study.fit.residual = std::abs(c(0) - 4.0 / 3.0) / (4.0 / 3.0);
      study.pass = study.fit.residual <= study.tolerance;
      break;
    }
  }
  return study;
}

}  // namespace stark
