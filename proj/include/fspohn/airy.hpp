#pragma once

// Airy function Ai, its derivative, and negative-axis zeros.
//
// Piecewise evaluation: Maclaurin series in plain doubles on [-4.25, 2.5],
// Maclaurin in compensated (double-double) arithmetic on [-13.5, 9] outside
// that (the series suffers up to ~e^{2*zeta} cancellation, which compensated
// accumulation absorbs), and asymptotic expansions beyond (exponential form
// for x > 9, modulus/phase oscillatory form for x < -13.5).  Validity range
// |x| <= 200; measured relative accuracy ~1e-15 inside the series windows
// and better than 1e-12 everywhere away from the zeros of Ai.

namespace fspohn::airy {

struct Pair {
  double value;
  double deriv;
};

struct Zero {
  double omega;  // k-th zero of Ai is at -omega, omega > 0
  double deriv;  // Ai'(-omega), sign (-1)^{k-1}
};

// max index of the cached zero table (omega_600 ~ 199.9 sits at the domain cap)
inline constexpr int kZeroTableMax = 600;

double ai(double x);
double ai_prime(double x);
Pair ai_both(double x);

// k-th negative zero (k >= 1), Newton-refined, |Ai(-omega_k)| <= 1e-11
Zero airy_zero(int k);

// two-term asymptotic approximations of omega_k and Ai'(-omega_k)
Zero asymptotic_zero(int k);

}  // namespace fspohn::airy
