#include "fspohn/quadrature.hpp"

#include <cmath>
#include <limits>

#include "fspohn/errors.hpp"

namespace fspohn::quadrature {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct LegendreEval {
  double value;  // P_n(x)
  double deriv;  // P_n'(x)
};

LegendreEval legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int j = 2; j <= n; ++j) {
    double p2 = (double(2 * j - 1) * x * p1 - double(j - 1) * p0) / double(j);
    p0 = p1;
    p1 = p2;
  }
  double d = double(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, d};
}

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1 || n > 2048)
    throw DomainError("gauss_legendre: n outside [1, 2048]");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.lower = -1.0;
  r.upper = 1.0;
  if (n == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
    return r;
  }
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      LegendreEval e = legendre(n, x);
      double dx = e.value / e.deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    LegendreEval e = legendre(n, x);
    double w = 2.0 / ((1.0 - x * x) * e.deriv * e.deriv);
    r.nodes[i] = -x;
    r.weights[i] = w;
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

Rule map_to_interval(const Rule& base, double a, double b) {
  if (!(a < b)) throw DomainError("map_to_interval: requires a < b");
  Rule r;
  const std::size_t n = base.nodes.size();
  r.nodes.resize(n);
  r.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * base.nodes[i];
    r.weights[i] = half * base.weights[i];
  }
  r.lower = a;
  r.upper = b;
  return r;
}

Rule semiinfinite_rule(double s, double decay_scale, int n_panels,
                       int n_per_panel) {
  if (!(decay_scale > 0.0))
    throw DomainError("semiinfinite_rule: decay_scale must be positive");
  if (n_panels < 1) throw DomainError("semiinfinite_rule: n_panels < 1");
  const Rule base = gauss_legendre(n_per_panel);
  const double length = 46.0 * decay_scale;
  const double growth = 1.5;
  const double first =
      length * (growth - 1.0) / (std::pow(growth, n_panels) - 1.0);
  Rule r;
  r.lower = s;
  r.semi_infinite = true;
  r.truncation_bound = std::exp(-46.0);
  double a = s;
  double panel = first;
  for (int p = 0; p < n_panels; ++p) {
    const double b = a + panel;
    Rule seg = map_to_interval(base, a, b);
    r.nodes.insert(r.nodes.end(), seg.nodes.begin(), seg.nodes.end());
    r.weights.insert(r.weights.end(), seg.weights.begin(), seg.weights.end());
    a = b;
    panel *= growth;
  }
  r.upper = a;
  return r;
}

Rule default_semiinfinite(double s) {
  return semiinfinite_rule(s, 1.0, kDefaultPanels, kDefaultNodesPerPanel);
}

}  // namespace fspohn::quadrature
