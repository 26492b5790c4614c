#pragma once

#include <vector>

// Correlation kernels of the non-intersecting diffusion ensemble: the rank-M
// stationary projection kernel, its two-branch space-time extension, the
// edge-rescaled kernel, the eigenfunction semigroup, and the extended Airy
// kernel that arises in the M -> infinity limit.

namespace fspohn::kernels {

// Edge-scaling constants: c0 = 3^{1/3} / (2^{1/3} pi^{2/3}) and
// c1 = 3^{2/3} pi^{2/3} / 2^{2/3}; c0 * c1 = 3/2 exactly.
double scaling_c0();
double scaling_c1();

// Spatial shift c1 * M^{2/3} used by the edge rescaling.
double edge_shift(int M);

struct KernelOptions {
  int k_tail = 400;            // eigen-terms kept beyond M in the reversed-time branch
  double tail_tol = 1e-10;     // certified bound the neglected tail must satisfy
  double lambda_cutoff = 40.0; // upper limit of the Airy-kernel lambda integral
  int airy_panels = 8;         // quadrature panels for the lambda integral
  int airy_nodes = 32;         // Gauss-Legendre nodes per panel
};

enum class KernelKind { stationary, extended, rescaled, airy_extended, semigroup };

// m_count is the projection rank M; for the semigroup kind it is the
// eigen-expansion length and for airy_extended it is ignored.
struct KernelSpec {
  KernelKind kind = KernelKind::stationary;
  int m_count = 1;
  KernelOptions options{};
};

// K_M(x,y) = sum_{k<=M} phi_k(x) phi_k(y).
double kernel_stationary(int M, double x, double y);

// Space-time kernel: sum_{k<=M} e^{-omega_k (t_j-t_i)/2} phi_k(x) phi_k(y) for
// t_i >= t_j, and minus the tail sum over k > M (truncated, tail certified
// <= tail_tol) for t_i < t_j.
double kernel_extended(int M, double x, double t_i, double y, double t_j,
                       const KernelOptions& opt = {});

// Conjugated edge rescaling: times tau = t/2, space x = c1 M^{2/3} + xi, and a
// per-mode factor e^{(omega_k - c1 M^{2/3})(tau_i - tau_j)}.
double kernel_rescaled(int M, double xi_i, double tau_i, double xi_j, double tau_j,
                       const KernelOptions& opt = {});

// Extended Airy kernel: int_0^inf e^{-lambda (tau_i-tau_j)} Ai(xi_i+lambda)
// Ai(xi_j+lambda) dlambda for tau_i >= tau_j, minus the same integral over
// (-inf, 0) for tau_i < tau_j.
double kernel_airy_extended(double xi_i, double tau_i, double xi_j, double tau_j,
                            const KernelOptions& opt = {});

// Semigroup e^{-t H} of the half-line Airy operator, truncated eigen-sum with
// certified tail <= 1e-10.
double semigroup_kernel(double t, double x, double y, int K_terms);

// Doob-transformed transition density of the single diffusion:
// e^{omega_1 t / 2} phi_1(y)/phi_1(x) * semigroup_kernel(t, x, y, K_terms).
double transition_single(double t, double x, double y, int K_terms);

// Certified upper bound on sum_{k>K} e^{-(omega_k - shift) delta} |phi_k phi_k|
// for delta > 0, from the zero asymptotics omega_k >= (3 pi (k-1/4)/2)^{2/3}.
double eigen_tail_bound(int K, double delta, double shift);

// Quadrature grid of the lambda integral: the (0, lambda_cutoff] branch uses
// the substitution lambda = u^2; the reversed branch lives on [-L, 0) with L
// chosen so the e^{lambda * gap} tail beyond -L is below 1e-12.
struct LambdaNode {
  double lambda;
  double weight;
};
std::vector<LambdaNode> airy_lambda_grid(const KernelOptions& opt = {});
std::vector<LambdaNode> airy_lambda_grid_reversed(double gap,
                                                  const KernelOptions& opt = {});

// Closed form of int_{-inf}^{inf} e^{lambda*gap} Ai(a+lambda) Ai(b+lambda)
// dlambda, gap > 0; subtracted from the (0,inf) integral to reach the
// reversed-time branch when the gap is too small for direct integration.
double airy_gaussian_term(double gap, double a, double b);

// Uniform dispatch used by the Nystrom assembly; coordinates are interpreted
// per kind (unscaled x,t for stationary/extended/semigroup, rescaled xi,tau
// for rescaled/airy_extended).
double evaluate(const KernelSpec& spec, double xi_i, double tau_i, double xi_j,
                double tau_j);

}  // namespace fspohn::kernels
