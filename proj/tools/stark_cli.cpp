// Command-line front end: potential in, JSON/CSV artifacts out.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stark/io.hpp"
#include "stark/resonances.hpp"
#include "stark/studies.hpp"

using namespace stark;
using nlohmann::json;

namespace {

struct Range {
  double lo = 0.0, hi = 0.0;
};

Range parse_range(const std::string& s) {
  auto pos = s.find(':');
  if (pos == std::string::npos) throw InputError("range must look like LO:HI");
  Range r;
  try {
    r.lo = std::stod(s.substr(0, pos));
    r.hi = std::stod(s.substr(pos + 1));
  } catch (const std::exception&) {
    throw InputError("range must look like LO:HI");
  }
  if (!(r.hi > r.lo)) throw InputError("range needs HI > LO");
  return r;
}

struct Common {
  std::string potential_path;
  std::string potential_blob;  // file contents, part of the config hash
  int n = 256;
  double tol = 1e-8;
  std::string out;
  int threads = 1;
};

std::string config_digest(const Common& c, const std::string& command,
                          const std::string& args) {
  std::ostringstream os;
  os << command << '\n' << args << '\n' << c.n << '\n' << g17(c.tol) << '\n'
     << c.potential_blob;
  return hash_hex(fnv1a64(os.str()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json cplx_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

void parallel_rows(size_t count, int threads, const std::function<void(size_t)>& fn) {
  int nt = std::max(1, threads);
  if (nt == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

int run(int argc, char** argv) {
  CLI::App app{"resonances of the one-dimensional perturbed Stark operator"};
  app.require_subcommand(1);

  Common c;
  app.add_option("--potential", c.potential_path, "potential descriptor JSON")->required();
  app.add_option("--n", c.n, "quadrature size");
  app.add_option("--tol", c.tol, "tolerance override");
  app.add_option("--out", c.out, "output artifact path")->required();
  app.add_option("--threads", c.threads, "worker threads");

  auto* cmd_res = app.add_subcommand("resonances", "locate and certify resonances");
  double radius = 20.0;
  cmd_res->add_option("--radius", radius, "search radius");

  auto* cmd_detmap = app.add_subcommand("detmap", "log|D+| over a rectangle (CSV)");
  std::string re_range = "-10:10", im_range = "-8:0", range = "-50:50";
  int points = 200;
  cmd_detmap->add_option("--re", re_range, "real-axis range LO:HI");
  cmd_detmap->add_option("--im", im_range, "imaginary-axis range LO:HI");
  cmd_detmap->add_option("--points", points, "grid points per axis");

  auto* cmd_phase = app.add_subcommand("phase", "unwrapped scattering phase (CSV)");
  cmd_phase->add_option("--range", range, "lambda range LO:HI");
  cmd_phase->add_option("--points", points, "grid points");

  auto* cmd_smatrix = app.add_subcommand("smatrix", "S(lambda) on a real grid (CSV)");
  cmd_smatrix->add_option("--range", range, "lambda range LO:HI");
  cmd_smatrix->add_option("--points", points, "grid points");

  auto* cmd_trace = app.add_subcommand("trace-check", "trace-formula residuals (JSON)");
  double lam_re = 2.0, lam_im = 2.0;
  std::vector<double> radii{10.0, 15.0, 20.0, 25.0};
  cmd_trace->add_option("--lambda-re", lam_re);
  cmd_trace->add_option("--lambda-im", lam_im);
  cmd_trace->add_option("--radii", radii, "truncation radii");

  auto* cmd_count = app.add_subcommand("count", "counting function and its exponent (JSON)");
  cmd_count->add_option("--radius", radius, "search radius");

  auto* cmd_study = app.add_subcommand("study", "asymptotic claim study (JSON)");
  std::string claim;
  cmd_study->add_option("claim", claim, "claim id")->required();

  auto* cmd_rec = app.add_subcommand("reconstruct", "S from resonances vs direct (CSV)");
  cmd_rec->add_option("--radius", radius, "truncation radius");
  cmd_rec->add_option("--range", range, "lambda range LO:HI");
  cmd_rec->add_option("--points", points, "grid points");

  for (CLI::App* sub :
       {cmd_res, cmd_detmap, cmd_phase, cmd_smatrix, cmd_trace, cmd_count, cmd_study, cmd_rec})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (const char* dir = std::getenv("STARK_CACHE_DIR")) airy_memo_enable(dir);

  c.potential_blob = slurp(c.potential_path);
  Potential v = load_potential(c.potential_path);
  if (c.n < 8 || c.threads <= 0 || !(c.tol > 0.0) || points < 2 || !(radius > 0.0))
    throw InputError("numeric flags must be positive (and --n >= 8, --points >= 2)");
  QuadratureRule rule = rule_for_potential(v, c.n);
  if (c.out.empty()) throw InputError("--out is required");

  std::ostringstream art;

  if (*cmd_res) {
    std::string digest = config_digest(c, "resonances", "radius=" + g17(radius));
    ResonanceOptions opts;
    opts.threads = c.threads;
    ResonanceSet rs = find_resonances(v, radius, opts);
    json out;
    out["config_hash"] = digest;
    out["n"] = c.n;
    out["radius"] = radius;
    out["certified"] = rs.certified;
    out["p"] = cplx_json(rs.p_const);
    out["d_plus_at_zero"] = cplx_json(rs.d_plus_at_zero);
    out["resonances"] = json::array();
    for (const Resonance& x : rs.items)
      out["resonances"].push_back(json{{"re", x.lambda.real()},
                                       {"im", x.lambda.imag()},
                                       {"multiplicity", x.multiplicity},
                                       {"residual", x.refine_residual}});
    art << out.dump(2) << '\n';
  } else if (*cmd_detmap) {
    Range rr = parse_range(re_range), ri = parse_range(im_range);
    std::string digest =
        config_digest(c, "detmap", re_range + ";" + im_range + ";" + std::to_string(points));
    std::vector<std::string> rows(points);
    parallel_rows(points, c.threads, [&](size_t i) {
      std::ostringstream os;
      double im = ri.lo + (ri.hi - ri.lo) * i / (points - 1.0);
      for (int j = 0; j < points; ++j) {
        double re = rr.lo + (rr.hi - rr.lo) * j / (points - 1.0);
        cplx d = d_plus_entire(v, cplx(re, im), rule);
        os << g17(re) << ',' << g17(im) << ',' << g17(std::log(std::abs(d))) << ','
           << g17(std::arg(d)) << '\n';
      }
      rows[i] = os.str();
    });
    art << "# stark detmap config_hash=" << digest << " n=" << c.n << '\n';
    art << "re,im,log_abs_d_plus,arg_d_plus\n";
    for (const auto& r : rows) art << r;
  } else if (*cmd_phase) {
    Range rg = parse_range(range);
    std::string digest = config_digest(c, "phase", range + ";" + std::to_string(points));
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = rg.lo + (rg.hi - rg.lo) * i / (points - 1.0);
    std::vector<double> ph = scattering_phase(v, grid, rule, c.threads);
    art << "# stark phase config_hash=" << digest << " n=" << c.n << '\n';
    art << "lambda,phi_sc\n";
    for (int i = 0; i < points; ++i) art << g17(grid[i]) << ',' << g17(ph[i]) << '\n';
  } else if (*cmd_smatrix) {
    Range rg = parse_range(range);
    std::string digest = config_digest(c, "smatrix", range + ";" + std::to_string(points));
    std::vector<std::string> rows(points);
    parallel_rows(points, c.threads, [&](size_t i) {
      double lam = rg.lo + (rg.hi - rg.lo) * i / (points - 1.0);
      ScatteringSample s = s_matrix(v, cplx(lam, 0.0), rule);
      std::ostringstream os;
      os << g17(lam) << ',' << g17(s.s.real()) << ',' << g17(s.s.imag()) << ','
         << g17(std::abs(s.s)) << ',' << g17(s.a0.real()) << ',' << g17(s.a0.imag()) << ','
         << g17(s.a1.real()) << ',' << g17(s.a1.imag()) << '\n';
      rows[i] = os.str();
    });
    art << "# stark smatrix config_hash=" << digest << " n=" << c.n << '\n';
    art << "lambda,re_s,im_s,abs_s,re_a0,im_a0,re_a1,im_a1\n";
    for (const auto& r : rows) art << r;
  } else if (*cmd_trace) {
    double rmax = 0.0;
    for (double r : radii) rmax = std::max(rmax, r);
    std::ostringstream key;
    key << "lam=" << g17(lam_re) << "," << g17(lam_im) << ";radii=";
    for (double r : radii) key << g17(r) << ",";
    std::string digest = config_digest(c, "trace-check", key.str());
    ResonanceOptions opts;
    opts.threads = c.threads;
    ResonanceSet rs = find_resonances(v, rmax, opts);
    cplx lam(lam_re, lam_im);
    cplx lhs = lam.imag() > 0.0
                   ? logdet_prime(v, lam, rule, Side::plus)
                   : std::conj(logdet_prime(v, std::conj(lam), rule, Side::plus));
    json out;
    out["config_hash"] = digest;
    out["n"] = c.n;
    out["lambda"] = cplx_json(lam);
    out["logdet_prime"] = cplx_json(lhs);
    out["p"] = cplx_json(rs.p_const);
    out["residuals"] = json::array();
    for (double r : radii)
      out["residuals"].push_back(
          json{{"radius", r},
               {"residual", trace_formula_residual(v, rs, lam, rule, r)},
               {"tail_indicator", truncation_tail_indicator(rs, lam, r)}});
    PhaseCurve pc = make_phase_curve(v, -6.0, 6.0, 601, rule, c.threads);
    out["phi_prime_0_direct"] = phase_curve_deriv_at(pc, 0.0);
    out["im_p_over_pi"] = rs.p_const.imag() / kPi;
    art << out.dump(2) << '\n';
  } else if (*cmd_count) {
    std::string digest = config_digest(c, "count", "radius=" + g17(radius));
    ResonanceOptions opts;
    opts.threads = c.threads;
    ResonanceSet rs = find_resonances(v, radius, opts);
    json out;
    out["config_hash"] = digest;
    out["n"] = c.n;
    out["radius"] = radius;
    out["certified"] = rs.certified;
    out["counts"] = json::array();
    // midpoints between consecutive moduli avoid step-edge artifacts
    std::vector<double> rads;
    for (size_t i = 0; i + 1 < rs.items.size(); ++i)
      rads.push_back(0.5 * (std::abs(rs.items[i].lambda) + std::abs(rs.items[i + 1].lambda)));
    if (!rs.items.empty()) rads.push_back(radius);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (double r : rads) {
      int cnt = counting_function(rs, r);
      out["counts"].push_back(json{{"r", r}, {"count", cnt}});
      if (cnt >= 3) {
        double x = std::log(r), y = std::log(double(cnt));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
      }
    }
    double exponent = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    out["loglog_exponent"] = exponent;
    art << out.dump(2) << '\n';
  } else if (*cmd_study) {
    ClaimId id = claim_from_name(claim);
    std::string digest = config_digest(c, "study", claim);
    AsymptoticStudy st = run_study(v, id, {}, rule, c.threads);
    json out;
    out["config_hash"] = digest;
    out["n"] = c.n;
    out["claim_id"] = claim_name(st.claim_id);
    out["tolerance"] = st.tolerance;
    out["pass"] = st.pass;
    out["fit"] = json{{"exponent", st.fit.exponent},
                      {"coefficient", cplx_json(st.fit.coefficient)},
                      {"residual", st.fit.residual}};
    if (!st.note.empty()) out["note"] = st.note;
    out["samples"] = json::array();
    for (const auto& s : st.samples)
      out["samples"].push_back(json{{"parameter", s.parameter},
                                    {"observed", cplx_json(s.observed)},
                                    {"predicted", cplx_json(s.predicted)}});
    art << out.dump(2) << '\n';
  } else if (*cmd_rec) {
    Range rg = parse_range(range);
    std::string digest = config_digest(
        c, "reconstruct", range + ";" + std::to_string(points) + ";" + g17(radius));
    ResonanceOptions opts;
    opts.threads = c.threads;
    ResonanceSet rs = find_resonances(v, radius, opts);
    std::vector<std::string> rows(points);
    parallel_rows(points, c.threads, [&](size_t i) {
      double lam = rg.lo + (rg.hi - rg.lo) * i / (points - 1.0);
      cplx sdir = s_matrix(v, cplx(lam, 0.0), rule).s;
      cplx srec = rs.items.empty()
                      ? cplx(1.0)
                      : s_from_resonances(rs, cplx(lam, 0.0), -1.6 * radius, radius);
      std::ostringstream os;
      os << g17(lam) << ',' << g17(sdir.real()) << ',' << g17(sdir.imag()) << ','
         << g17(srec.real()) << ',' << g17(srec.imag()) << ',' << g17(std::abs(srec - sdir))
         << '\n';
      rows[i] = os.str();
    });
    art << "# stark reconstruct config_hash=" << digest << " n=" << c.n
        << " radius=" << g17(radius) << '\n';
    art << "lambda,re_s_direct,im_s_direct,re_s_reconstructed,im_s_reconstructed,abs_diff\n";
    for (const auto& r : rows) art << r;
  }

  write_atomic(c.out, art.str());
  airy_memo_flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return 3;
  } catch (const CertificationError& e) {
    std::cerr << "certification error: " << e.what() << '\n';
    return 4;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
