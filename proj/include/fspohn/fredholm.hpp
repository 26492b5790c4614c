#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fspohn/kernels.hpp"
#include "fspohn/quadrature.hpp"

// Block Nystrom discretization of multi-time kernels and Fredholm determinant
// evaluation: gap probabilities of the rank-M ensemble, the GUE Tracy-Widom
// distribution, and multi-time distributions of the limiting process.

namespace fspohn::fredholm {

struct RuleParams {
  int n_panels = 8;
  int n_per_panel = 40;
  double decay_scale = 1.0;
};

// Dense discretization with symmetrized sqrt-weights: entry (a,b) =
// sqrt(w_a) K(x_a, tau_{t(a)}; x_b, tau_{t(b)}) sqrt(w_b). Carries its own
// build recipe so the determinant can re-assemble at a refined rule.
struct BlockKernelMatrix {
  kernels::KernelSpec spec;
  std::vector<double> times;
  std::vector<double> cutoffs;
  RuleParams rule_params;
  std::vector<quadrature::Rule> rules;
  Eigen::MatrixXd blocks;
  double truncation_budget = 0.0;
};

struct FredholmResult {
  double value = 0.0;
  double quadrature_error_estimate = 0.0;
  double truncation_budget = 0.0;
};

BlockKernelMatrix build_block_matrix(const kernels::KernelSpec& spec,
                                     const std::vector<double>& times,
                                     const std::vector<double>& cutoffs,
                                     const RuleParams& rule_params = {});

// det(I - B) by partial-pivot LU with log-accumulated magnitudes; the error
// estimate is the difference against a node-doubled re-assembly.
FredholmResult fredholm_det(const BlockKernelMatrix& matrix);

// Joint law of the rescaled top path: P(top(2 tau_k) <= c1 M^{2/3} + S_k for
// all k) as a Fredholm determinant of the edge-rescaled kernel.
FredholmResult gap_probability_topline(int M, const std::vector<double>& taus,
                                       const std::vector<double>& Ss);

// GUE Tracy-Widom distribution F2(S).
double tracy_widom_gue(double S);

// Multi-time distribution of the limiting top-path process via the extended
// Airy kernel; reduces to tracy_widom_gue for a single time.
FredholmResult airy2_joint(const std::vector<double>& taus,
                           const std::vector<double>& Ss);

}  // namespace fspohn::fredholm
