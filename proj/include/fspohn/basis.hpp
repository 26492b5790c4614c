#pragma once

#include <vector>

// Normalized Airy eigenfunctions, ground states, and log-derivative drifts
// of the single and M-particle hard-wall diffusions.

namespace fspohn::basis {

// coordinates of an M-particle configuration, sorted ascending
struct OrderedConfiguration {
  std::vector<double> coords;
};

// phi_k(x) = Ai(x - omega_k) / |Ai'(-omega_k)|, exact 0 at x = 0
double phi(int k, double x);
double phi_prime(int k, double x);

// a(x) = Ai'(x - omega_1) / Ai(x - omega_1) for x > 0
double drift_single(double x);

// Slater determinant det[phi_i(x_j)]; 0 when the configuration touches
// the chamber boundary (tied coordinates or a coordinate at 0)
double ground_state_m(const OrderedConfiguration& cfg);

// log |Omega_M| and its sign without underflow (sign, log_abs)
struct LogDet {
  double sign;
  double log_abs;
};
LogDet ground_state_m_log(const OrderedConfiguration& cfg);

// drift components (A^{-1} A')_{kk} of the M-particle diffusion; requires a
// strictly ordered interior configuration with Omega_M above the threshold
std::vector<double> drift_dyson(const OrderedConfiguration& cfg,
                                double positivity_threshold = 1e-300);

// rho(x) = phi_1(x)^2
double stationary_density_single(double x);

}  // namespace fspohn::basis
