#include "stark/airy.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace stark {

namespace {

constexpr double kRho0 = 8.0;        // series/asymptotic crossover
constexpr double kRMax = 1.0e4;      // supported range for the unscaled entry point
constexpr double kConnectionArg = 2.0943951023931954923;  // 2*pi/3
constexpr double kInv2SqrtPi = 0.28209479177387814347;    // 1/(2 sqrt(pi))

// ----- double-double arithmetic (enough for the Maclaurin series) -----
// The two-series solution of w'' = z w loses up to ~13 digits to cancellation
// near arg z = 0 at |z| ~ rho0; double-double keeps the absolute error below
// 1e-25 there.

struct DD {
  double hi = 0.0, lo = 0.0;
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}
inline DD quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}
inline DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}
inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  return quick_two_sum(s.hi, lo);
}
inline DD dd_sub(DD a, DD b) { return dd_add(a, {-b.hi, -b.lo}); }
inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}
inline DD dd_mul_d(DD a, double b) {
  DD p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}
inline DD dd_div_d(DD a, double b) {
  double q1 = a.hi / b;
  DD p = two_prod(q1, b);
  double r = ((a.hi - p.hi) - p.lo + a.lo) / b;
  return quick_two_sum(q1, r);
}

struct CDD {
  DD re, im;
};
inline CDD cdd_from(cplx z) { return {{z.real(), 0.0}, {z.imag(), 0.0}}; }
inline cplx cdd_to(CDD z) { return {z.re.hi + z.re.lo, z.im.hi + z.im.lo}; }
inline CDD cdd_add(CDD a, CDD b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }
inline CDD cdd_mul(CDD a, CDD b) {
  DD re = dd_sub(dd_mul(a.re, b.re), dd_mul(a.im, b.im));
  DD im = dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re));
  return {re, im};
}
inline CDD cdd_div_d(CDD a, double b) { return {dd_div_d(a.re, b), dd_div_d(a.im, b)}; }
inline CDD cdd_mul_d(CDD a, double b) { return {dd_mul_d(a.re, b), dd_mul_d(a.im, b)}; }
inline double cdd_abs(CDD a) { return std::hypot(a.re.hi, a.im.hi); }

// Ai(0) and -Ai'(0) as double-double pairs.
const CDD kC1 = {{3.55028053887817219e-01, 2.05233632436211994e-17}, {0.0, 0.0}};
const CDD kC2 = {{2.58819403792806824e-01, -2.52224311161083207e-17}, {0.0, 0.0}};

// ----- asymptotic coefficients -----

constexpr int kAsymTerms = 46;

struct AsymTables {
  std::array<double, kAsymTerms> u{}, v{};
  AsymTables() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kAsymTerms; ++k) {
      double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / (216.0 * kk * (2 * kk - 1));
      v[k] = u[k] * (6 * kk + 1) / (1 - 6 * kk);
    }
  }
};
const AsymTables kTab;

AiryScaled series_eval(cplx z) {
  if (z == cplx(0.0)) {
    return {cplx(kC1.re.hi + kC1.re.lo), cplx(-(kC2.re.hi + kC2.re.lo)), 0.0,
            AiryRegime::series, 1e-30};
  }
  CDD z3 = cdd_mul(cdd_mul(cdd_from(z), cdd_from(z)), cdd_from(z));
  CDD a = {{1.0, 0.0}, {0.0, 0.0}};  // term of f, equals coeff * z^{3k}
  CDD b = cdd_from(z);               // term of g, equals coeff * z^{3k+1}
  CDD f = a, g = b;
  CDD fp = {{0.0, 0.0}, {0.0, 0.0}};  // f' accumulates 3k * a_k / z
  CDD gp = {{1.0, 0.0}, {0.0, 0.0}};  // g' accumulates (3k+1) * b_k / z
  CDD inv_z = cdd_from(cplx(1.0) / z);
  double maxmag = 1.0;
  double drop = 0.0;
  for (int k = 1; k <= 80; ++k) {
    a = cdd_div_d(cdd_mul(a, z3), (3.0 * k - 1) * (3.0 * k));
    b = cdd_div_d(cdd_mul(b, z3), (3.0 * k) * (3.0 * k + 1));
    f = cdd_add(f, a);
    g = cdd_add(g, b);
    fp = cdd_add(fp, cdd_mul(cdd_mul_d(a, 3.0 * k), inv_z));
    gp = cdd_add(gp, cdd_mul(cdd_mul_d(b, 3.0 * k + 1), inv_z));
    double am = cdd_abs(a), bm = cdd_abs(b);
    maxmag = std::max({maxmag, cdd_abs(f), cdd_abs(g)});
    if (am + bm < 1e-34 * maxmag && k > 3) {
      drop = am + bm;
      break;
    }
    drop = am + bm;
  }
  auto combine = [](CDD x, CDD y) {
    return cdd_to(cdd_add(cdd_mul(kC1, x), cdd_mul(cdd_mul_d(kC2, -1.0), y)));
  };
  cplx ai = combine(f, g);
  cplx aip = combine(fp, gp);
  double est = drop + 1e-30 * maxmag;
  return {ai, aip, 0.0, AiryRegime::series, est};
}

// Direct expansion, reliable for |arg z| <= 2*pi/3 and |z| >= rho0.
AiryScaled asym_eval(cplx z) {
  cplx xi = (2.0 / 3.0) * std::pow(z, 1.5);
  cplx inv_xi = cplx(1.0) / xi;
  cplx su(1.0), sv(1.0);
  cplx tu(1.0), tv(1.0);
  double min_term = 1.0;
  double prev = 1.0;
  for (int k = 1; k < kAsymTerms; ++k) {
    cplx r = -inv_xi;
    tu *= r * (kTab.u[k] / kTab.u[k - 1]);
    tv *= r * (kTab.v[k] / kTab.v[k - 1]);
    double m = std::abs(tu) + std::abs(tv);
    if (m > prev) break;  // divergent tail reached
    su += tu;
    sv += tv;
    prev = m;
    min_term = std::min(min_term, m);
    if (m < 1e-18) break;
  }
  cplx zq = std::pow(z, 0.25);
  cplx phase = std::exp(cplx(0.0, -xi.imag()));
  cplx ai_m = kInv2SqrtPi / zq * phase * su;
  cplx aip_m = -kInv2SqrtPi * zq * phase * sv;
  double scale = kInv2SqrtPi * std::max(std::abs(zq), 1.0 / std::abs(zq));
  double est = scale * (min_term + 4e-16);
  return {ai_m, aip_m, -xi.real(), AiryRegime::asymptotic, est};
}

AiryScaled scaled_eval(cplx z);

// Ai(z) = -w Ai(w z) - w* Ai(w* z), w = e^{2 pi i/3}; routes arguments in the
// sector |arg z| > 2*pi/3 through sectors where the expansion is stable.
AiryScaled connection_eval(cplx z) {
  const cplx w = kOmegaPlus, wb = kOmegaMinus;
  AiryScaled p = scaled_eval(w * z);
  AiryScaled m = scaled_eval(wb * z);
  ScaledCplx ai = scaled_add(ScaledCplx{-w * p.ai_m, p.log_scale},
                             ScaledCplx{-wb * m.ai_m, m.log_scale});
  ScaledCplx aip = scaled_add(ScaledCplx{-w * w * p.aip_m, p.log_scale},
                              ScaledCplx{-wb * wb * m.aip_m, m.log_scale});
  double ls = ai.log_scale;
  cplx aip_m = aip.mantissa * std::exp(aip.log_scale - ls);
  double est = p.est_err_m * std::exp(p.log_scale - ls) + m.est_err_m * std::exp(m.log_scale - ls);
  return {ai.mantissa, aip_m, ls, AiryRegime::connection, est};
}

AiryScaled scaled_eval(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw InputError("airy: non-finite argument");
  double r = std::abs(z);
  if (r <= kRho0) return series_eval(z);
  if (std::abs(std::arg(z)) <= kConnectionArg) return asym_eval(z);
  AiryScaled out = connection_eval(z);
  // Arguments on the negative real axis give a real (oscillatory) value; the
  // two connection components are conjugate, so symmetrize away roundoff.
  if (z.imag() == 0.0) {
    out.ai_m = cplx(out.ai_m.real(), 0.0);
    out.aip_m = cplx(out.aip_m.real(), 0.0);
  }
  return out;
}

}  // namespace

double airy_crossover_radius() { return kRho0; }
double airy_r_max() { return kRMax; }

namespace {

struct MemoState {
  bool enabled = false;
  std::string path;
  std::shared_mutex mu;
  std::unordered_map<uint64_t, std::pair<cplx, AiryScaled>> map;
};
MemoState g_memo;

uint64_t memo_key(cplx z) {
  uint64_t a = std::bit_cast<uint64_t>(z.real());
  uint64_t b = std::bit_cast<uint64_t>(z.imag());
  return a * 0x9e3779b97f4a7c15ULL ^ (b + 0x165667b19e3779f9ULL);
}

}  // namespace

void airy_memo_enable(const std::string& dir) {
  std::unique_lock lock(g_memo.mu);
  g_memo.path = dir + "/airy_cache.bin";
  g_memo.enabled = true;
  std::FILE* f = std::fopen(g_memo.path.c_str(), "rb");
  if (!f) return;
  char magic[6] = {0};
  uint64_t count = 0;
  if (std::fread(magic, 1, 6, f) == 6 && std::string(magic, 6) == "STKA1\n" &&
      std::fread(&count, sizeof(count), 1, f) == 1) {
    for (uint64_t i = 0; i < count; ++i) {
      double rec[8];
      int64_t regime;
      if (std::fread(rec, sizeof(double), 8, f) != 8 ||
          std::fread(&regime, sizeof(regime), 1, f) != 1)
        break;
      cplx z{rec[0], rec[1]};
      AiryScaled s{{rec[2], rec[3]}, {rec[4], rec[5]}, rec[6],
                   static_cast<AiryRegime>(regime), rec[7]};
      g_memo.map.emplace(memo_key(z), std::make_pair(z, s));
    }
  }
  std::fclose(f);
}

void airy_memo_flush() {
  std::shared_lock lock(g_memo.mu);
  if (!g_memo.enabled) return;
  std::string tmp = g_memo.path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) return;
  std::fwrite("STKA1\n", 1, 6, f);
  uint64_t count = g_memo.map.size();
  std::fwrite(&count, sizeof(count), 1, f);
  for (const auto& [key, entry] : g_memo.map) {
    (void)key;
    const cplx& z = entry.first;
    const AiryScaled& s = entry.second;
    double rec[8] = {z.real(),         z.imag(),         s.ai_m.real(), s.ai_m.imag(),
                     s.aip_m.real(),   s.aip_m.imag(),   s.log_scale,   s.est_err_m};
    int64_t regime = static_cast<int64_t>(s.regime);
    std::fwrite(rec, sizeof(double), 8, f);
    std::fwrite(&regime, sizeof(regime), 1, f);
  }
  std::fclose(f);
  std::rename(tmp.c_str(), g_memo.path.c_str());
}

AiryScaled airy_ai_scaled(cplx z) {
  if (g_memo.enabled) {
    uint64_t key = memo_key(z);
    {
      std::shared_lock lock(g_memo.mu);
      auto it = g_memo.map.find(key);
      if (it != g_memo.map.end() && it->second.first == z) return it->second.second;
    }
    AiryScaled s = scaled_eval(z);
    std::unique_lock lock(g_memo.mu);
    g_memo.map.emplace(key, std::make_pair(z, s));
    return s;
  }
  return scaled_eval(z);
}

AiryValue airy_ai(cplx z) {
  if (std::abs(z) > kRMax) throw InputError("airy_ai: |z| beyond supported range");
  AiryScaled s = scaled_eval(z);
  double mag = std::log(std::abs(s.ai_m) + std::abs(s.aip_m) + 1e-300) + s.log_scale;
  if (mag > 690.0)
    throw OverflowRiskError("airy_ai: value exceeds double range, use airy_ai_log");
  double e = std::exp(s.log_scale);
  AiryValue v{s.ai_m * e, s.aip_m * e, s.regime, s.est_err_m * e};
  if (z.imag() == 0.0) {
    v.ai = cplx(v.ai.real(), 0.0);
    v.ai_prime = cplx(v.ai_prime.real(), 0.0);
  }
  return v;
}

AiryValue airy_rotated(cplx z) { return airy_ai(kOmegaPlus * z); }

AiryLog airy_ai_log(cplx z) {
  AiryScaled s = scaled_eval(z);
  if (std::abs(s.ai_m) < 1e-280 || std::abs(s.aip_m) < 1e-280)
    throw BranchError("airy_ai_log: argument too close to a zero of Ai");
  return {std::log(s.ai_m) + s.log_scale, std::log(s.aip_m) + s.log_scale};
}

namespace detail {

AiryScaled airy_series_forced(cplx z) { return series_eval(z); }
AiryScaled airy_asymptotic_forced(cplx z) {
  if (std::abs(std::arg(z)) <= kConnectionArg) return asym_eval(z);
  return connection_eval(z);
}

cplx airy_second_reference(cplx z) {
  if (std::abs(z) <= kRho0) {
    if (z == cplx(0.0)) return 0.0;
    // term-wise second derivative of the two Maclaurin series
    CDD z3 = cdd_mul(cdd_mul(cdd_from(z), cdd_from(z)), cdd_from(z));
    CDD a = {{1.0, 0.0}, {0.0, 0.0}};
    CDD b = cdd_from(z);
    CDD inv_z2 = cdd_from(cplx(1.0) / (z * z));
    CDD fpp = {{0.0, 0.0}, {0.0, 0.0}};
    CDD gpp = {{0.0, 0.0}, {0.0, 0.0}};
    double maxmag = 1.0;
    for (int k = 1; k <= 80; ++k) {
      a = cdd_div_d(cdd_mul(a, z3), (3.0 * k - 1) * (3.0 * k));
      b = cdd_div_d(cdd_mul(b, z3), (3.0 * k) * (3.0 * k + 1));
      fpp = cdd_add(fpp, cdd_mul(cdd_mul_d(a, 3.0 * k * (3.0 * k - 1)), inv_z2));
      gpp = cdd_add(gpp, cdd_mul(cdd_mul_d(b, (3.0 * k + 1) * 3.0 * k), inv_z2));
      maxmag = std::max(maxmag, cdd_abs(fpp));
      if (cdd_abs(a) + cdd_abs(b) < 1e-34 * maxmag && k > 3) break;
    }
    CDD out = cdd_add(cdd_mul(kC1, fpp), cdd_mul(cdd_mul_d(kC2, -1.0), gpp));
    return cdd_to(out);
  }
  if (std::abs(std::arg(z)) > kConnectionArg) {
    const cplx w = kOmegaPlus, wb = kOmegaMinus;
    return -airy_second_reference(w * z) - airy_second_reference(wb * z);
  }
  // d/dz of the Ai' expansion
  cplx xi = (2.0 / 3.0) * std::pow(z, 1.5);
  cplx inv_xi = cplx(1.0) / xi;
  cplx sv(1.0), dsv(0.0);
  cplx tv(1.0);
  double prev = 1.0;
  for (int k = 1; k < kAsymTerms; ++k) {
    tv *= -inv_xi * (kTab.v[k] / kTab.v[k - 1]);
    double m = std::abs(tv);
    if (m > prev) break;
    sv += tv;
    dsv += tv * cplx(-double(k)) * inv_xi;
    prev = m;
    if (m < 1e-18) break;
  }
  cplx sq = std::sqrt(z);
  cplx q = std::pow(z, 0.25);
  cplx bracket = sv / (4.0 * z) - sq * sv + sq * dsv;
  return -kInv2SqrtPi * q * std::exp(-xi) * bracket;
}

}  // namespace detail

}  // namespace stark
