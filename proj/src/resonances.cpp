#include "stark/resonances.hpp"

#include <algorithm>
#include <cstdio>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace stark {

namespace {

void parallel_map(size_t n, int threads, const std::function<void(size_t)>& fn) {
  int nt = std::max(1, threads);
  if (nt == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

DMinusEvaluator::DMinusEvaluator(const Potential& v, int n, bool richardson)
    : v_(&v),
      rule_(rule_for_potential(v, n)),
      rule2_(richardson ? rule_for_potential(v, 2 * n) : QuadratureRule{}),
      richardson_(richardson) {}

ScaledCplx DMinusEvaluator::eval_one(cplx lambda, const QuadratureRule& rule, bool plus) const {
  KernelSystem sys = make_kernel_system(*v_, lambda, rule, HalfPlane::upper);
  if (plus) return scaled_from(sys.det);
  SMatrixEval e = s_matrix_eval(*v_, sys, rule);
  return scaled_mul(e.s_scaled, scaled_from(sys.det));
}

ScaledCplx DMinusEvaluator::scaled(cplx lambda) const {
  if (lambda.imag() < 0.0)
    throw InputError("DMinusEvaluator: lambda must lie in the closed upper half plane");
  ScaledCplx a = eval_one(lambda, rule_, false);
  if (!richardson_) return a;
  ScaledCplx b = eval_one(lambda, rule2_, false);
  return scaled_add(scaled_mul({cplx(4.0 / 3.0), 0.0}, b),
                    scaled_mul({cplx(-1.0 / 3.0), 0.0}, a));
}

cplx DMinusEvaluator::operator()(cplx lambda) const {
  ScaledCplx s = scaled(lambda);
  if (!s.representable()) throw OverflowRiskError("DMinusEvaluator: use the scaled value");
  return s.value();
}

ScaledCplx DMinusEvaluator::d_plus_scaled(cplx lambda) const {
  ScaledCplx a = eval_one(lambda, rule_, true);
  if (!richardson_) return a;
  ScaledCplx b = eval_one(lambda, rule2_, true);
  return scaled_add(scaled_mul({cplx(4.0 / 3.0), 0.0}, b),
                    scaled_mul({cplx(-1.0 / 3.0), 0.0}, a));
}

cplx d_minus_upper(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  if (lambda.imag() < 0.0)
    throw InputError("d_minus_upper: lambda must lie in the closed upper half plane");
  if (v.is_zero()) return 1.0;
  KernelSystem sys = make_kernel_system(v, lambda, rule, HalfPlane::upper);
  SMatrixEval e = s_matrix_eval(v, sys, rule);
  ScaledCplx out = scaled_mul(e.s_scaled, scaled_from(sys.det));
  if (!out.representable())
    throw OverflowRiskError("d_minus_upper: value exceeds double range, use log_d_minus_upper");
  return out.value();
}

cplx log_d_minus_upper(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  if (v.is_zero()) return 0.0;
  KernelSystem sys = make_kernel_system(v, lambda, rule, HalfPlane::upper);
  SMatrixEval e = s_matrix_eval(v, sys, rule);
  return scaled_log(scaled_mul(e.s_scaled, scaled_from(sys.det)));
}

cplx d_plus_lower(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  if (lambda.imag() >= 0.0)
    throw InputError("d_plus_lower: lambda must lie strictly below the real axis");
  return std::conj(d_minus_upper(v, std::conj(lambda), rule));
}

cplx d_plus_entire(const Potential& v, cplx lambda, const QuadratureRule& rule) {
  if (lambda.imag() >= 0.0) return det_side(v, lambda, rule, Side::plus).d_value;
  return d_plus_lower(v, lambda, rule);
}

namespace {

using Eval = std::function<ScaledCplx(cplx)>;

struct ZeroOnContour {};

// memoizes evaluations at repeated contour points (shared cell edges);
// entries keep the point itself so a hash collision can never alias
class CachedEval {
 public:
  explicit CachedEval(Eval inner) : inner_(std::move(inner)) {}
  ScaledCplx operator()(cplx z) const {
    uint64_t kre = std::bit_cast<uint64_t>(z.real());
    uint64_t kim = std::bit_cast<uint64_t>(z.imag());
    uint64_t key = kre * 0x9e3779b97f4a7c15ULL ^ kim;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end() && it->second.first == z) return it->second.second;
    }
    ScaledCplx v = inner_(z);
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(key, std::make_pair(z, v));
    return v;
  }

 private:
  Eval inner_;
  mutable std::mutex mu_;
  mutable std::unordered_map<uint64_t, std::pair<cplx, ScaledCplx>> map_;
};

// Step cap from the growth rate of D_-: |d log D_-/d lambda| is of order
// 2 sqrt(|lambda|) away from zeros, so segments longer than this can hide a
// full phase turn from endpoint sampling.
double phase_step_cap(cplx a, cplx b) {
  // rate bound ~2 sqrt(r) and a 2.2 rad budget: an unseen full turn would
  // need ~5 rad between samples, so this cannot alias
  double r = std::max(std::abs(a), std::abs(b));
  return 1.1 / std::sqrt(1.0 + r);
}

// Accumulated argument change of f along [a, b]: split until segments respect
// the a-priori cap, then refine adaptively so each step stays below 1.2 rad.
double arg_walk(const Eval& f, cplx a, ScaledCplx va, cplx b, ScaledCplx vb, int depth) {
  if (std::abs(va.mantissa) < 1e-280 || std::abs(vb.mantissa) < 1e-280) throw ZeroOnContour{};
  double d = std::arg(vb.mantissa / va.mantissa);
  if (std::abs(b - a) <= phase_step_cap(a, b) && std::abs(d) < 1.2) return d;
  if (depth > 34) throw ZeroOnContour{};
  cplx mid = 0.5 * (a + b);
  ScaledCplx vm = f(mid);
  return arg_walk(f, a, va, mid, vm, depth + 1) + arg_walk(f, mid, vm, b, vb, depth + 1);
}

int winding_polygon(const Eval& f, const std::vector<cplx>& pts) {
  std::vector<ScaledCplx> vals(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);
  double total = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    size_t j = (i + 1) % pts.size();
    total += arg_walk(f, pts[i], vals[i], pts[j], vals[j], 0);
  }
  double k = total / (2.0 * kPi);
  int count = static_cast<int>(std::lround(k));
  if (std::abs(k - count) > 1e-3)
    throw CertificationError("winding: non-integer argument-principle count");
  return count;
}

int winding_rect(const Eval& f, double re_lo, double re_hi, double im_lo, double im_hi) {
  std::vector<cplx> pts{
      {re_lo, im_lo}, {re_hi, im_lo}, {re_hi, im_hi}, {re_lo, im_hi}};
  return winding_polygon(f, pts);
}

// half-disc {|z| <= r, Im z >= strip}
int winding_half_disc(const Eval& f, double r, double strip) {
  double a0 = std::asin(std::min(1.0, strip / r));
  std::vector<cplx> pts;
  double x0 = r * std::cos(a0);
  const int seg = 16;
  for (int k = 0; k < seg; ++k)
    pts.push_back(cplx(-x0 + (2.0 * x0) * double(k) / seg, strip));
  const int arcn = 64;
  for (int k = 0; k < arcn; ++k) {
    double th = a0 + (kPi - 2.0 * a0) * double(k) / arcn;
    pts.push_back(std::polar(r, th));
  }
  return winding_polygon(f, pts);
}

// derivative by a 4-point Cauchy integral on a small circle
cplx cauchy_derivative_scaled(const Eval& f, cplx z0, double h, double ref_log) {
  cplx sum = 0.0;
  const cplx dirs[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  for (int k = 0; k < 4; ++k) {
    ScaledCplx v = f(z0 + h * dirs[k]);
    sum += v.mantissa * std::exp(v.log_scale - ref_log) / dirs[k];
  }
  return sum / (4.0 * h);  // mantissa-scale derivative relative to e^{ref_log}
}

struct Cell {
  double re_lo, re_hi, im_lo, im_hi;
  int count = -1;
  double diam() const { return std::hypot(re_hi - re_lo, im_hi - im_lo); }
  cplx center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
};

struct FoundZero {
  cplx z;
  int multiplicity;
  double residual;
  bool converged;
};

// Newton on D_- with the derivative from a small Cauchy circle. Works on
// mantissas relative to the local scale, so exponential growth cancels.
FoundZero newton_zero(const Eval& f, cplx start, double scale_hint, double strip) {
  cplx z = start;
  bool ok = false;
  double best_step = 1e300;
  int stagnant = 0;
  cplx dv = 0.0;
  double dv_log = 0.0;
  for (int it = 0; it < 30; ++it) {
    ScaledCplx v = f(z);
    // refresh the Cauchy-circle derivative every other iteration; the zero is
    // simple, so a slightly stale slope only costs an extra step
    if (it % 2 == 0 || std::abs(dv) < 1e-280) {
      double h = std::max(1e-7, std::min(1e-4 * scale_hint, 0.4 * z.imag()));
      dv = cauchy_derivative_scaled(f, z, h, v.log_scale);
      dv_log = v.log_scale;
    }
    if (std::abs(dv) < 1e-280) break;
    cplx step = -v.mantissa * std::exp(v.log_scale - dv_log) / dv;
    if (std::abs(step) > 0.5 * std::max(1.0, scale_hint))
      step *= 0.5 * std::max(1.0, scale_hint) / std::abs(step);
    z += step;
    if (z.imag() < strip) z = cplx(z.real(), strip);
    double slen = std::abs(step);
    if (slen < 1e-9 * (1.0 + std::abs(z))) {
      ok = true;
      break;
    }
    // evaluator noise floor reached: successive corrections stop shrinking
    if (slen < 1e-6 * (1.0 + std::abs(z)) && slen > 0.3 * best_step) {
      if (++stagnant >= 2) {
        ok = true;
        break;
      }
    } else {
      stagnant = 0;
    }
    best_step = std::min(best_step, slen);
  }
  // residual relative to the local scale of D_- on the Newton circle
  ScaledCplx v = f(z);
  double h = std::max(1e-6, std::min(1e-3 * scale_hint, 0.4 * z.imag()));
  double local = 0.0;
  for (const cplx dir : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)}) {
    ScaledCplx w = f(z + h * dir);
    local = std::max(local, std::abs(w.mantissa) * std::exp(w.log_scale - v.log_scale));
  }
  double resid = local > 0.0 ? std::abs(v.mantissa) / local : std::abs(v.mantissa);
  return {z, 1, resid, ok};
}

// Quadtree task: a cell with a known zero count. Children always partition
// the parent exactly; a split is retried with a shifted line whenever a zero
// lands on a child edge or the child counts fail to add up to the parent.
struct Task {
  Cell cell;
  int count;
};

struct TaskOutcome {
  std::vector<FoundZero> zeros;
  std::vector<Task> children;
  std::string error;
};

TaskOutcome process_task(const Eval& count_eval, const Eval& refine_eval, const Task& task,
                         double strip, double stall, double disc_radius) {
  TaskOutcome out;
  const Cell& cell = task.cell;
  const int count = task.count;
  if (count == 0) return out;
  if (cell.diam() < stall) {
    FoundZero z = newton_zero(refine_eval, cell.center(), cell.diam(), strip * 0.5);
    z.multiplicity = count;
    if (!(z.converged && std::abs(z.z - cell.center()) < 4.0 * stall))
      z = FoundZero{cell.center(), count, 1.0, false};
    out.zeros.push_back(z);
    return out;
  }
  if (count == 1) {
    FoundZero z = newton_zero(refine_eval, cell.center(), cell.diam(), strip * 0.5);
    double mx = 0.02 * (cell.re_hi - cell.re_lo) + 1e-9;
    double my = 0.02 * (cell.im_hi - cell.im_lo) + 1e-9;
    if (z.converged && z.z.real() > cell.re_lo - mx && z.z.real() < cell.re_hi + mx &&
        z.z.imag() > cell.im_lo - my && z.z.imag() < cell.im_hi + my) {
      z.multiplicity = 1;
      out.zeros.push_back(z);
      return out;
    }
    // fall through to subdivision when Newton escapes the cell
  }
  const double jitter[6] = {0.0, 0.037, -0.043, 0.081, -0.077, 0.11};
  for (int attempt = 0; attempt < 6; ++attempt) {
    double fx = 0.5 + jitter[attempt], fy = 0.5 - jitter[attempt];
    double rm = cell.re_lo + fx * (cell.re_hi - cell.re_lo);
    double im = cell.im_lo + fy * (cell.im_hi - cell.im_lo);
    Cell kids[4] = {{cell.re_lo, rm, cell.im_lo, im},
                    {rm, cell.re_hi, cell.im_lo, im},
                    {cell.re_lo, rm, im, cell.im_hi},
                    {rm, cell.re_hi, im, cell.im_hi}};
    int counts[4];
    bool bad = false;
    int sum = 0;
    for (int k = 0; k < 4 && !bad; ++k) {
      try {
        counts[k] = winding_rect(count_eval, kids[k].re_lo, kids[k].re_hi, kids[k].im_lo,
                                 kids[k].im_hi);
        sum += counts[k];
      } catch (const ZeroOnContour&) {
        bad = true;
      }
    }
    if (bad || sum != count) continue;
    for (int k = 0; k < 4; ++k) {
      if (counts[k] <= 0) continue;
      double xmin = (kids[k].re_lo * kids[k].re_hi > 0.0)
                        ? std::min(std::abs(kids[k].re_lo), std::abs(kids[k].re_hi))
                        : 0.0;
      if (std::hypot(xmin, kids[k].im_lo) > disc_radius * 1.03) continue;
      out.children.push_back({kids[k], counts[k]});
    }
    return out;
  }
  out.error = "find_resonances: could not tile around a boundary zero (cell [" +
              std::to_string(cell.re_lo) + "," + std::to_string(cell.re_hi) + "]x[" +
              std::to_string(cell.im_lo) + "," + std::to_string(cell.im_hi) +
              "] count=" + std::to_string(count) + ")";
  return out;
}

}  // namespace

int count_zeros_contour(const Potential& v, double re_lo, double re_hi, double im_lo,
                        double im_hi, const QuadratureRule& rule) {
  if (!(im_lo > 0.0) || !(im_hi > im_lo) || !(re_hi > re_lo))
    throw InputError("count_zeros_contour: need a rectangle in the open upper half plane");
  if (v.is_zero()) return 0;
  Eval f = [&](cplx z) {
    KernelSystem sys = make_kernel_system(v, z, rule, HalfPlane::upper);
    return scaled_mul(s_matrix_eval(v, sys, rule).s_scaled, scaled_from(sys.det));
  };
  for (int attempt = 0; attempt < 5; ++attempt) {
    double pad = attempt * 0.013 * (im_hi - im_lo);
    try {
      return winding_rect(f, re_lo - pad, re_hi + pad, std::max(1e-6, im_lo - pad),
                          im_hi + pad);
    } catch (const ZeroOnContour&) {
      continue;
    }
  }
  throw CertificationError("count_zeros_contour: zero on contour after 5 perturbations");
}

ResonanceSet find_resonances(const Potential& v, double radius, const ResonanceOptions& opts) {
  ResonanceSet out;
  out.search_radius = radius;
  if (v.is_zero()) {
    out.certified = true;
    return out;
  }
  DMinusEvaluator coarse(v, opts.n_count, false);
  DMinusEvaluator fine(v, opts.n_refine, opts.richardson);
  CachedEval cached([&](cplx z) { return coarse.scaled(z); });
  Eval fc = [&](cplx z) { return cached(z); };
  Eval ff = [&](cplx z) { return fine.scaled(z); };

  const double strip = opts.strip;
  // one root box containing the half disc; the bottom edge sits on the guard
  // strip and is lowered slightly if a zero lands on it
  std::vector<Task> frontier;
  {
    std::string why = "persistent zero on the root contour";
    for (int attempt = 0; attempt < 5 && frontier.empty(); ++attempt) {
      double pad = attempt * 0.011 * radius;
      double bottom = strip * (1.0 - 0.15 * attempt);
      Cell box{-radius - pad, radius + pad, bottom, radius + pad};
      try {
        int n = winding_rect(fc, box.re_lo, box.re_hi, box.im_lo, box.im_hi);
        frontier.push_back({box, n});
      } catch (const ZeroOnContour&) {
      }
    }
    if (frontier.empty()) throw CertificationError("find_resonances: " + why);
  }

  std::vector<FoundZero> zeros;
  int generations = 0;
  while (!frontier.empty()) {
    if (++generations > 80)
      throw CertificationError("find_resonances: subdivision depth exhausted");
    std::vector<TaskOutcome> outcomes(frontier.size());
    parallel_map(frontier.size(), opts.threads, [&](size_t i) {
      outcomes[i] = process_task(fc, ff, frontier[i], strip, opts.stall_diameter, radius);
    });
    std::vector<Task> next;
    for (const TaskOutcome& o : outcomes) {
      if (!o.error.empty()) throw CertificationError(o.error);
      zeros.insert(zeros.end(), o.zeros.begin(), o.zeros.end());
      next.insert(next.end(), o.children.begin(), o.children.end());
    }
    frontier = std::move(next);
  }

  // certificate over the half disc; retry with a slightly perturbed radius
  // when a zero straddles the arc
  if (std::getenv("STARK_RES_DEBUG"))
    for (const FoundZero& z : zeros)
      std::fprintf(stderr, "zero (%.10f, %.10f) mult=%d resid=%.2e conv=%d |z|=%.6f\n",
                   z.z.real(), z.z.imag(), z.multiplicity, z.residual, z.converged,
                   std::abs(z.z));
  // adjacent cells can converge to the same zero when Newton hops a cell
  // boundary; collapse bitwise-close duplicates
  std::sort(zeros.begin(), zeros.end(), [](const FoundZero& a, const FoundZero& b) {
    return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
  });
  std::vector<FoundZero> unique;
  for (const FoundZero& z : zeros) {
    bool dup = false;
    for (const FoundZero& u : unique)
      if (std::abs(u.z - z.z) < 1e-6 * (1.0 + std::abs(z.z))) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(z);
  }
  zeros = std::move(unique);

  std::vector<FoundZero> kept;
  int inside_count = 0, contour_count = -1;
  for (double scale : {1.0, 1.015, 0.985}) {
    int cc;
    try {
      cc = winding_half_disc(fc, radius * scale, strip);
    } catch (const ZeroOnContour&) {
      continue;
    }
    kept.clear();
    inside_count = 0;
    for (const FoundZero& z : zeros)
      if (std::abs(z.z) <= radius * scale && z.z.imag() >= strip) {
        kept.push_back(z);
        inside_count += z.multiplicity;
      }
    contour_count = cc;
    if (contour_count == inside_count) break;
  }
  out.certified = (contour_count == inside_count);
  if (!out.certified)
    throw CertificationError("find_resonances: contour count " +
                             std::to_string(contour_count) + " != located count " +
                             std::to_string(inside_count));

  for (const FoundZero& z : kept)
    out.items.push_back({std::conj(z.z), z.multiplicity, z.residual, z.converged});
  std::sort(out.items.begin(), out.items.end(), [](const Resonance& a, const Resonance& b) {
    double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
    if (ma != mb) return ma < mb;
    return std::arg(a.lambda) < std::arg(b.lambda);
  });

  // Hadamard data: p = D+'(0)/D+(0) by a 16-point trapezoid Cauchy circle
  // through the entire extension (upper: D+, lower: conj(D-(conj z)))
  auto dplus = [&](cplx z) -> cplx {
    if (z.imag() >= 0.0) {
      ScaledCplx s = fine.d_plus_scaled(z);
      return s.value();
    }
    ScaledCplx s = fine.scaled(std::conj(z));
    return std::conj(s.value());
  };
  const int m = 16;
  const double rc = 0.5;
  cplx dp0 = dplus(cplx(0.0, 0.0));
  cplx deriv = 0.0;
  for (int k = 0; k < m; ++k) {
    cplx w = std::polar(rc, 2.0 * kPi * k / m);
    deriv += dplus(w) / w;
  }
  deriv /= double(m);
  out.p_const = deriv / dp0;
  out.d_plus_at_zero = dp0;
  return out;
}

cplx refine_resonance(const Potential& v, cplx zero_upper, int n, bool richardson) {
  DMinusEvaluator fine(v, n, richardson);
  Eval f = [&](cplx z) { return fine.scaled(z); };
  FoundZero z = newton_zero(f, zero_upper, 0.1, 1e-4);
  if (!z.converged) throw NumericalError("refine_resonance: Newton did not converge");
  return z.z;
}

int counting_function(const ResonanceSet& rs, double r) {
  if (r > rs.search_radius)
    throw InputError("counting_function: r beyond the certified radius");
  int n = 0;
  for (const Resonance& x : rs.items)
    if (std::abs(x.lambda) <= r) n += x.multiplicity;
  return n;
}

cplx hadamard_eval(const ResonanceSet& rs, cplx lambda, double radius) {
  cplx prod = rs.d_plus_at_zero * std::exp(rs.p_const * lambda);
  for (const Resonance& x : rs.items) {
    if (std::abs(x.lambda) > radius) continue;
    cplx factor = (1.0 - lambda / x.lambda) * std::exp(lambda / x.lambda);
    for (int m = 0; m < x.multiplicity; ++m) prod *= factor;
  }
  return prod;
}

double truncation_tail_indicator(const ResonanceSet& rs, cplx lambda, double radius) {
  double shell = 0.0;
  for (const Resonance& x : rs.items) {
    double r = std::abs(x.lambda);
    if (r > 0.5 * radius && r <= radius)
      shell += x.multiplicity / (r * r);
  }
  return std::norm(lambda) * shell;
}

double trace_formula_residual(const Potential& v, const ResonanceSet& rs, cplx lambda,
                              const QuadratureRule& rule, double radius) {
  for (const Resonance& x : rs.items)
    if (std::abs(lambda - x.lambda) < 1e-3)
      throw InputError("trace_formula_residual: lambda within 1e-3 of a resonance");
  cplx lhs;
  if (lambda.imag() > 0.0) {
    lhs = logdet_prime(v, lambda, rule, Side::plus);
  } else if (lambda.imag() < 0.0) {
    lhs = logdet_prime(v, std::conj(lambda), rule, Side::plus);
    lhs = std::conj(lhs);  // the entire extension of D+ is conj(D-(conj lambda))
  } else {
    throw InputError("trace_formula_residual: lambda off the real axis required");
  }
  cplx sum = rs.p_const;
  for (const Resonance& x : rs.items) {
    if (std::abs(x.lambda) > radius) continue;
    sum += double(x.multiplicity) * lambda / (x.lambda * (lambda - x.lambda));
  }
  return std::abs(lhs - sum);
}

PhaseCurve make_phase_curve(const Potential& v, double lo, double hi, int npts,
                            const QuadratureRule& rule, int threads) {
  PhaseCurve pc;
  pc.grid.resize(npts);
  for (int i = 0; i < npts; ++i) pc.grid[i] = lo + (hi - lo) * i / (npts - 1.0);
  pc.phase = scattering_phase(v, pc.grid, rule, threads);
  pc.dphase = derivative_5pt(pc.grid, pc.phase);
  return pc;
}

namespace {
size_t curve_index(const PhaseCurve& pc, double lambda) {
  double h = pc.grid[1] - pc.grid[0];
  double t = (lambda - pc.grid[0]) / h;
  auto i = static_cast<long>(std::lround(t));
  if (i < 0 || i >= static_cast<long>(pc.grid.size()) ||
      std::abs(pc.grid[i] - lambda) > 1e-9 * (1.0 + std::abs(lambda)))
    throw InputError("phase curve: lambda is not a grid point");
  return static_cast<size_t>(i);
}
}  // namespace

double phase_curve_at(const PhaseCurve& pc, double lambda) {
  return pc.phase[curve_index(pc, lambda)];
}
double phase_curve_deriv_at(const PhaseCurve& pc, double lambda) {
  return pc.dphase[curve_index(pc, lambda)];
}

std::pair<double, double> breit_wigner_phase(const ResonanceSet& rs, const PhaseCurve& pc,
                                             double lambda, double radius) {
  double lhs = phase_curve_deriv_at(pc, lambda);
  cplx sum = 0.0;
  for (const Resonance& x : rs.items) {
    if (std::abs(x.lambda) > radius) continue;
    sum += double(x.multiplicity) / (x.lambda * (lambda - x.lambda));
  }
  double rhs = rs.p_const.imag() / kPi + lambda / kPi * sum.imag();
  return {lhs, rhs};
}

std::pair<double, double> krein_consistency(const ResonanceSet& rs, const PhaseCurve& pc,
                                            const std::function<double(double)>& f,
                                            double radius) {
  // trapezoid on the phase grid; f must be supported inside it
  double lhs = 0.0, rhs = 0.0;
  double h = pc.grid[1] - pc.grid[0];
  for (size_t i = 0; i < pc.grid.size(); ++i) {
    double t = pc.grid[i];
    double w = (i == 0 || i + 1 == pc.grid.size()) ? 0.5 * h : h;
    double ft = f(t);
    if (ft == 0.0) continue;
    lhs += -w * ft * pc.dphase[i];
    cplx sum = 0.0;
    for (const Resonance& x : rs.items) {
      if (std::abs(x.lambda) > radius) continue;
      sum += double(x.multiplicity) / (x.lambda * (t - x.lambda));
    }
    rhs += -w * ft * (rs.p_const.imag() / kPi + t / kPi * sum.imag());
  }
  return {lhs, rhs};
}

cplx s1_product(const ResonanceSet& rs, cplx lambda, double radius) {
  double dphi0 = rs.p_const.imag() / kPi;
  cplx prod = std::exp(cplx(0.0, -2.0 * kPi * dphi0) * lambda);
  for (const Resonance& x : rs.items) {
    if (std::abs(x.lambda) > radius) continue;
    cplx lbar = std::conj(x.lambda);
    cplx factor = (1.0 - lambda / lbar) / (1.0 - lambda / x.lambda) *
                  std::exp(lambda / lbar - lambda / x.lambda);
    for (int m = 0; m < x.multiplicity; ++m) prod *= factor;
  }
  return prod;
}

cplx s_from_resonances(const ResonanceSet& rs, cplx lambda, double far_left_anchor,
                       double radius) {
  if (rs.items.empty()) return 1.0;
  // |S1| = 1 identically on the real axis, so amplitude cannot flag a bad
  // anchor; require the anchor to sit in the phase-decay zone, well left of
  // the support and the low-|lambda| resonance region.
  if (!(far_left_anchor <= -3.0))
    throw NumericalError("s_from_resonances: anchor not in the phase-decay regime");
  cplx s0 = std::conj(s1_product(rs, cplx(far_left_anchor, 0.0), radius));
  return s0 * s1_product(rs, lambda, radius);
}

}  // namespace stark
