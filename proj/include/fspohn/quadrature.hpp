#pragma once

#include <cstddef>
#include <vector>

// Gauss-Legendre rules and composite mappings used by every analytic module.

namespace fspohn::quadrature {

struct Rule {
  std::vector<double> nodes;    // strictly increasing, inside the domain
  std::vector<double> weights;  // all positive
  double lower = 0.0;
  double upper = 0.0;           // finite truncation point of the domain
  bool semi_infinite = false;   // domain is (lower, inf), truncated at upper
  double truncation_bound = 0.0;  // certified neglected mass for e^{-x}-type integrands
};

// n-point rule on [-1,1]; 1 <= n <= 2048; nodes via Newton on the
// three-term recurrence, accurate to ~1e-15
Rule gauss_legendre(int n);

// affine image of a rule on [a,b]
Rule map_to_interval(const Rule& base, double a, double b);

// Composite rule on (s, s+L], L = 46*decay_scale, panel lengths growing
// x1.5; truncation_bound = e^{-L/decay_scale} = e^{-46}.
Rule semiinfinite_rule(double s, double decay_scale, int n_panels,
                       int n_per_panel);

inline constexpr int kDefaultPanels = 8;
inline constexpr int kDefaultNodesPerPanel = 40;

// default 8x40 composite with unit decay scale
Rule default_semiinfinite(double s);

template <typename F>
double integrate(const Rule& r, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * f(r.nodes[i]);
  return s;
}

}  // namespace fspohn::quadrature
