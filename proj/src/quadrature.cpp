#include "stark/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace stark {

namespace {

// Legendre P_n and P_n' at x by recurrence.
void legendre_pair(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

void gauss_legendre_ref(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(n, t, p, dp);
      double dt = -p / dp;
      t += dt;
      if (std::abs(dt) < 1e-15) break;
    }
    legendre_pair(n, t, p, dp);
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

QuadratureRule build_rule(int n, double gamma) {
  if (n < 8) throw InputError("build_rule: need n >= 8");
  if (!(gamma > 0.0)) throw InputError("build_rule: gamma must be positive");
  std::vector<double> x, w;
  gauss_legendre_ref(n, x, w);
  QuadratureRule r;
  r.gamma = gamma;
  r.order = 2 * n - 1;
  r.piece_edges = {0.0, gamma};
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = gamma * (x[i] + 1.0) / 2.0;
    r.weights[i] = gamma * w[i] / 2.0;
  }
  return r;
}

QuadratureRule build_rule_pieces(int n, double gamma, const std::vector<double>& breaks) {
  if (breaks.empty()) return build_rule(n, gamma);
  if (n < 8) throw InputError("build_rule_pieces: need n >= 8");
  for (double b : breaks)
    if (!(b > 0.0 && b < gamma)) throw InputError("build_rule_pieces: break outside (0, gamma)");
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), breaks.begin(), breaks.end());
  edges.push_back(gamma);
  std::sort(edges.begin(), edges.end());
  std::vector<double> x, w;
  gauss_legendre_ref(n, x, w);
  QuadratureRule r;
  r.gamma = gamma;
  r.order = 2 * n - 1;
  r.piece_edges = edges;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    double a = edges[p], b = edges[p + 1], h = b - a;
    for (int i = 0; i < n; ++i) {
      r.nodes.push_back(a + h * (x[i] + 1.0) / 2.0);
      r.weights.push_back(h * w[i] / 2.0);
    }
  }
  return r;
}

namespace {

// Kronrod 15 / Gauss 7 nodes and weights (positive half).
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct Panel {
  double a, b;
  cplx value;
  double err;
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fc = f(c);
  cplx resk = kWgk[7] * fc;
  cplx resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    cplx f1 = f(c - x), f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, resk * h, std::abs(resk - resg) * std::abs(h)};
}

}  // namespace

IntegralResult integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                            double abs_tol, int max_intervals) {
  auto cmp = [](const Panel& p, const Panel& q) { return p.err < q.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  heap.push(gk15(f, a, b));
  int evals = 15;
  cplx total = heap.top().value;
  double toterr = heap.top().err;
  while (toterr > abs_tol && static_cast<int>(heap.size()) < max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted by roundoff
      heap.push(worst);
      break;
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    toterr += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }
  return {total, toterr, toterr <= abs_tol, evals};
}

}  // namespace stark
