#include "fspohn/basis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "fspohn/airy.hpp"
#include "fspohn/errors.hpp"

namespace fspohn::basis {

namespace {

void check_sorted(const OrderedConfiguration& cfg, bool strict) {
  const auto& x = cfg.coords;
  if (x.empty()) throw DomainError("configuration: empty coordinate list");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j]) || x[j] < 0.0)
      throw DomainError("configuration: coordinates must be finite and >= 0");
    if (j > 0) {
      if (strict ? !(x[j] > x[j - 1]) : (x[j] < x[j - 1]))
        throw DomainError("configuration: coordinates must be sorted");
    }
  }
  if (strict && !(x[0] > 0.0))
    throw DomainError("configuration: interior requires x_1 > 0");
}

Eigen::MatrixXd slater_matrix(const std::vector<double>& x) {
  const int m = int(x.size());
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = phi(i + 1, x[j]);
  return a;
}

}  // namespace

double phi(int k, double x) {
  if (k < 1) throw DomainError("phi: k must be >= 1");
  if (!(x >= 0.0)) throw DomainError("phi: x must be >= 0");
  if (x == 0.0) return 0.0;
  const auto z = airy::airy_zero(k);
  const double arg = x - z.omega;
  if (arg > 200.0) return 0.0;  // below double underflow
  return airy::ai(arg) / std::abs(z.deriv);
}

double phi_prime(int k, double x) {
  if (k < 1) throw DomainError("phi_prime: k must be >= 1");
  if (!(x >= 0.0)) throw DomainError("phi_prime: x must be >= 0");
  const auto z = airy::airy_zero(k);
  const double arg = x - z.omega;
  if (arg > 200.0) return 0.0;
  return airy::ai_prime(arg) / std::abs(z.deriv);
}

double drift_single(double x) {
  if (!(x > 0.0)) throw DomainError("drift_single: x must be > 0");
  const auto z = airy::airy_zero(1);
  const auto p = airy::ai_both(x - z.omega);
  return p.deriv / p.value;
}

double ground_state_m(const OrderedConfiguration& cfg) {
  check_sorted(cfg, false);
  const auto& x = cfg.coords;
  const int m = int(x.size());
  if (x[0] == 0.0) return 0.0;
  for (int j = 1; j < m; ++j)
    if (x[j] == x[j - 1]) return 0.0;
  if (m == 1) return phi(1, x[0]);
  return slater_matrix(x).partialPivLu().determinant();
}

LogDet ground_state_m_log(const OrderedConfiguration& cfg) {
  check_sorted(cfg, false);
  const auto& x = cfg.coords;
  const int m = int(x.size());
  if (x[0] == 0.0) return {0.0, -HUGE_VAL};
  for (int j = 1; j < m; ++j)
    if (x[j] == x[j - 1]) return {0.0, -HUGE_VAL};
  if (m == 1) {
    double v = phi(1, x[0]);
    return {v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0), std::log(std::abs(v))};
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(slater_matrix(x));
  double sign = double(lu.permutationP().determinant());
  double log_abs = 0.0;
  const auto& u = lu.matrixLU();
  for (int i = 0; i < m; ++i) {
    const double d = u(i, i);
    if (d == 0.0) return {0.0, -HUGE_VAL};
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  return {sign, log_abs};
}

std::vector<double> drift_dyson(const OrderedConfiguration& cfg,
                                double positivity_threshold) {
  check_sorted(cfg, true);
  const auto& x = cfg.coords;
  const int m = int(x.size());
  if (m == 1) return {drift_single(x[0])};

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(slater_matrix(x));
  double sign = double(lu.permutationP().determinant());
  double log_abs = 0.0;
  const auto& u = lu.matrixLU();
  for (int i = 0; i < m; ++i) {
    const double d = u(i, i);
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  if (!(sign > 0.0) || !(log_abs > std::log(positivity_threshold)))
    throw NearBoundaryError(
        "drift_dyson: ground state below positivity threshold " +
        std::to_string(positivity_threshold));

  std::vector<double> out(m);
  Eigen::VectorXd b(m);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < m; ++i) b(i) = phi_prime(i + 1, x[k]);
    out[k] = lu.solve(b)(k);
  }
  return out;
}

double stationary_density_single(double x) {
  if (!(x >= 0.0))
    throw DomainError("stationary_density_single: x must be >= 0");
  const double v = phi(1, x);
  return v * v;
}

}  // namespace fspohn::basis
