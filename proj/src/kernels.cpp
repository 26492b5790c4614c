#include "fspohn/kernels.hpp"

#include <cmath>
#include <string>

#include "fspohn/airy.hpp"
#include "fspohn/basis.hpp"
#include "fspohn/errors.hpp"
#include "fspohn/quadrature.hpp"

namespace fspohn::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

// sup|Ai| <= 0.7858 and |Ai'(-omega_k)| >= |Ai'(-omega_1)| = 0.70121, so
// |phi_k(x) phi_k(y)| <= kPhiPairBound for every k, x, y.
const double kPhiPairBound = (0.7858 / 0.70121) * (0.7858 / 0.70121);

double mu_lower(int k) { return std::pow(1.5 * kPi * (k - 0.25), 2.0 / 3.0); }

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

double airy_positive_integral(double xi_i, double xi_j, double rate,
                              const KernelOptions& opt) {
  double total = 0.0;
  for (const auto& node : airy_lambda_grid(opt)) {
    double w = std::exp(-rate * node.lambda);
    if (w == 0.0) continue;
    total += node.weight * w * airy::ai(xi_i + node.lambda) *
             airy::ai(xi_j + node.lambda);
  }
  return total;
}

}  // namespace

std::vector<LambdaNode> airy_lambda_grid(const KernelOptions& opt) {
  if (opt.airy_panels < 1 || opt.airy_nodes < 1)
    throw DomainError("airy_lambda_grid: panel and node counts must be >= 1");
  // lambda = u^2 stretches the quadrature toward 0 where the integrand lives.
  auto base = quadrature::gauss_legendre(opt.airy_nodes);
  double u_max = std::sqrt(opt.lambda_cutoff);
  double h = u_max / opt.airy_panels;
  std::vector<LambdaNode> grid;
  grid.reserve(static_cast<std::size_t>(opt.airy_panels) * base.nodes.size());
  for (int p = 0; p < opt.airy_panels; ++p) {
    double mid = (p + 0.5) * h, half = 0.5 * h;
    for (std::size_t q = 0; q < base.nodes.size(); ++q) {
      double u = mid + half * base.nodes[q];
      grid.push_back({u * u, 2.0 * u * half * base.weights[q]});
    }
  }
  return grid;
}

std::vector<LambdaNode> airy_lambda_grid_reversed(double gap,
                                                  const KernelOptions& opt) {
  if (!(gap > 0.0)) throw DomainError("airy_lambda_grid_reversed: gap must be > 0");
  double L = std::max(opt.lambda_cutoff,
                      (std::log(1e12) + std::log1p(1.0 / gap)) / gap);
  // Panels of width <= 2 resolve the sqrt(|lambda|) Airy oscillation.
  int n_panels = std::max(opt.airy_panels, static_cast<int>(std::ceil(L / 2.0)));
  auto base = quadrature::gauss_legendre(opt.airy_nodes);
  double h = L / n_panels;
  std::vector<LambdaNode> grid;
  grid.reserve(static_cast<std::size_t>(n_panels) * base.nodes.size());
  for (int p = 0; p < n_panels; ++p) {
    double mid = -L + (p + 0.5) * h, half = 0.5 * h;
    for (std::size_t q = 0; q < base.nodes.size(); ++q)
      grid.push_back({mid + half * base.nodes[q], half * base.weights[q]});
  }
  return grid;
}

double airy_gaussian_term(double gap, double a, double b) {
  if (!(gap > 0.0)) throw DomainError("airy_gaussian_term: gap must be > 0");
  double expo =
      gap * gap * gap / 12.0 - 0.5 * (a + b) * gap - (a - b) * (a - b) / (4.0 * gap);
  return std::exp(expo) / std::sqrt(4.0 * kPi * gap);
}

double scaling_c0() {
  static const double c0 = std::cbrt(3.0 / (2.0 * kPi * kPi));
  return c0;
}

double scaling_c1() {
  static const double c1 = std::cbrt(2.25 * kPi * kPi);
  return c1;
}

double edge_shift(int M) {
  if (M < 1) throw DomainError("edge_shift: M must be >= 1");
  double r = std::cbrt(static_cast<double>(M));
  return scaling_c1() * r * r;
}

double eigen_tail_bound(int K, double delta, double shift) {
  if (K < 1) throw DomainError("eigen_tail_bound: K must be >= 1");
  if (!(delta > 0.0)) return HUGE_VAL;
  double mu1 = mu_lower(K + 1);
  double a = mu1 * delta;
  double integral_factor =
      (std::sqrt(a) + 0.5 / std::sqrt(a)) / (kPi * std::pow(delta, 1.5));
  return kPhiPairBound * std::exp((shift - mu1) * delta) * (1.0 + integral_factor);
}

double kernel_stationary(int M, double x, double y) {
  if (M < 1) throw DomainError("kernel_stationary: M must be >= 1");
  if (!(x >= 0.0) || !(y >= 0.0))
    throw DomainError("kernel_stationary: coordinates must be >= 0");
  double sum = 0.0;
  for (int k = 1; k <= M; ++k) sum += basis::phi(k, x) * basis::phi(k, y);
  return sum;
}

double kernel_extended(int M, double x, double t_i, double y, double t_j,
                       const KernelOptions& opt) {
  if (M < 1) throw DomainError("kernel_extended: M must be >= 1");
  check_finite(t_i, "kernel_extended: t_i");
  check_finite(t_j, "kernel_extended: t_j");
  if (!(x >= 0.0) || !(y >= 0.0))
    throw DomainError("kernel_extended: coordinates must be >= 0");
  if (t_i == t_j) return kernel_stationary(M, x, y);

  if (t_i > t_j) {
    double dt = t_i - t_j;
    double sum = 0.0;
    for (int k = 1; k <= M; ++k)
      sum += std::exp(0.5 * airy::airy_zero(k).omega * dt) *
             (basis::phi(k, x) * basis::phi(k, y));
    return sum;
  }

  double delta = 0.5 * (t_j - t_i);
  int k_end = M + opt.k_tail;
  double tail = eigen_tail_bound(k_end, delta, 0.0);
  if (!(tail <= opt.tail_tol))
    throw TruncationError("kernel_extended: certified tail " + std::to_string(tail) +
                          " exceeds tolerance; increase k_tail or the time gap");
  double sum = 0.0;
  for (int k = M + 1; k <= k_end; ++k) {
    double e = airy::airy_zero(k).omega * delta;
    if (e > 80.0) break;
    sum += std::exp(-e) * (basis::phi(k, x) * basis::phi(k, y));
  }
  return -sum;
}

double kernel_rescaled(int M, double xi_i, double tau_i, double xi_j, double tau_j,
                       const KernelOptions& opt) {
  if (M < 1) throw DomainError("kernel_rescaled: M must be >= 1");
  check_finite(tau_i, "kernel_rescaled: tau_i");
  check_finite(tau_j, "kernel_rescaled: tau_j");
  double shift = edge_shift(M);
  double x_i = shift + xi_i, x_j = shift + xi_j;
  if (!(x_i >= 0.0) || !(x_j >= 0.0))
    throw DomainError("kernel_rescaled: shifted coordinate below 0");
  if (tau_i == tau_j) return kernel_stationary(M, x_i, x_j);

  if (tau_i > tau_j) {
    double dtau = tau_i - tau_j;
    double sum = 0.0;
    for (int k = 1; k <= M; ++k)
      sum += std::exp((airy::airy_zero(k).omega - shift) * dtau) *
             (basis::phi(k, x_i) * basis::phi(k, x_j));
    return sum;
  }

  double delta = tau_j - tau_i;
  int k_end = M + opt.k_tail;
  double tail = eigen_tail_bound(k_end, delta, shift);
  if (!(tail <= opt.tail_tol))
    throw TruncationError("kernel_rescaled: certified tail " + std::to_string(tail) +
                          " exceeds tolerance; increase k_tail or the time gap");
  double sum = 0.0;
  for (int k = M + 1; k <= k_end; ++k) {
    double e = (airy::airy_zero(k).omega - shift) * delta;
    if (e > 80.0) break;
    sum += std::exp(-e) * (basis::phi(k, x_i) * basis::phi(k, x_j));
  }
  return -sum;
}

double kernel_airy_extended(double xi_i, double tau_i, double xi_j, double tau_j,
                            const KernelOptions& opt) {
  check_finite(xi_i, "kernel_airy_extended: xi_i");
  check_finite(xi_j, "kernel_airy_extended: xi_j");
  check_finite(tau_i, "kernel_airy_extended: tau_i");
  check_finite(tau_j, "kernel_airy_extended: tau_j");

  double dtau = tau_i - tau_j;
  if (dtau >= 0.0) return airy_positive_integral(xi_i, xi_j, dtau, opt);

  double gap = -dtau;
  if (gap < 1e-3)
    throw IllConditionedError(
        "kernel_airy_extended: reversed-time gap below 1e-3; the negative-side "
        "integral decays too slowly at the default cutoff");

  if (gap < 1.0) {
    // Route the slowly-decaying (-inf,0) integral through the closed-form
    // two-sided Laplace transform minus the well-behaved (0,inf) part.
    double positive_part = airy_positive_integral(xi_i, xi_j, -gap, opt);
    return positive_part - airy_gaussian_term(gap, xi_i, xi_j);
  }

  // For larger gaps e^{lambda gap} localizes the integrand near 0, so direct
  // panels on [-L, 0] resolve the Airy oscillations cheaply.
  double value = 0.0;
  for (const auto& node : airy_lambda_grid_reversed(gap, opt)) {
    double w = std::exp(node.lambda * gap);
    if (w == 0.0) continue;
    value += node.weight * w * airy::ai(xi_i + node.lambda) *
             airy::ai(xi_j + node.lambda);
  }
  return -value;
}

double semigroup_kernel(double t, double x, double y, int K_terms) {
  if (!(t > 0.0)) throw DomainError("semigroup_kernel: t must be > 0");
  if (!(x >= 0.0) || !(y >= 0.0))
    throw DomainError("semigroup_kernel: coordinates must be >= 0");
  if (K_terms < 1) throw DomainError("semigroup_kernel: K_terms must be >= 1");
  double tail = eigen_tail_bound(K_terms, 0.5 * t, 0.0);
  if (!(tail <= 1e-10))
    throw TruncationError("semigroup_kernel: certified tail " + std::to_string(tail) +
                          " exceeds 1e-10; increase K_terms or t");
  double sum = 0.0;
  for (int k = 1; k <= K_terms; ++k) {
    double e = 0.5 * airy::airy_zero(k).omega * t;
    if (e > 80.0) break;
    sum += std::exp(-e) * (basis::phi(k, x) * basis::phi(k, y));
  }
  return sum;
}

double transition_single(double t, double x, double y, int K_terms) {
  if (!(x > 0.0)) throw DomainError("transition_single: x must be > 0");
  double ratio = basis::phi(1, y) / basis::phi(1, x);
  return std::exp(0.5 * airy::airy_zero(1).omega * t) * ratio *
         semigroup_kernel(t, x, y, K_terms);
}

double evaluate(const KernelSpec& spec, double xi_i, double tau_i, double xi_j,
                double tau_j) {
  switch (spec.kind) {
    case KernelKind::stationary:
      return kernel_stationary(spec.m_count, xi_i, xi_j);
    case KernelKind::extended:
      return kernel_extended(spec.m_count, xi_i, tau_i, xi_j, tau_j, spec.options);
    case KernelKind::rescaled:
      return kernel_rescaled(spec.m_count, xi_i, tau_i, xi_j, tau_j, spec.options);
    case KernelKind::airy_extended:
      return kernel_airy_extended(xi_i, tau_i, xi_j, tau_j, spec.options);
    case KernelKind::semigroup:
      return semigroup_kernel(tau_i - tau_j, xi_i, xi_j, spec.m_count);
  }
  throw UsageError("evaluate: unknown kernel kind");
}

}  // namespace fspohn::kernels
