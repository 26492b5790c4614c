#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "fspohn/basis.hpp"
#include "fspohn/errors.hpp"
#include "fspohn/fredholm.hpp"
#include "fspohn/kernels.hpp"
#include "fspohn/quadrature.hpp"

using namespace fspohn;
using fredholm::airy2_joint;
using fredholm::build_block_matrix;
using fredholm::fredholm_det;
using fredholm::gap_probability_topline;
using fredholm::tracy_widom_gue;

namespace {

kernels::KernelSpec make_spec(kernels::KernelKind kind, int m_count = 1) {
  kernels::KernelSpec spec;
  spec.kind = kind;
  spec.m_count = m_count;
  return spec;
}

}  // namespace

TEST_CASE("rank-one restriction reproduces the closed-form determinant") {
  // For a single mode the operator is phi_1 (x) phi_1 (y) restricted to
  // (s, inf), so det(I - B) = 1 - int_s^inf phi_1^2.
  const std::vector<std::pair<double, double>> tail_mass = {
      {0.5, 0.96255394305057644},
      {1.0, 0.77404876967473128},
      {2.0, 0.24566244661560528},
      {3.5, 0.0092882148844327876},
  };
  for (const auto& [s, mass] : tail_mass) {
    auto matrix = build_block_matrix(make_spec(kernels::KernelKind::stationary, 1),
                                     {0.0}, {s});
    double trace = matrix.blocks.trace();
    auto result = fredholm_det(matrix);
    CHECK(std::abs(result.value - (1.0 - trace)) <= 1e-10);
    CHECK(std::abs(result.value - (1.0 - mass)) <= 1e-9);
    CHECK(result.quadrature_error_estimate <= 1e-8);
  }
}

TEST_CASE("two-mode exit law matches its reference values") {
  const std::vector<std::pair<double, double>> reference = {
      {1.0, 0.000343973561}, {2.0, 0.071332003714}, {3.0, 0.484816829474},
      {4.0, 0.875628449753}, {5.0, 0.986258784137}, {6.0, 0.999219802148},
  };
  double shift = kernels::edge_shift(2);
  for (const auto& [s, prob] : reference) {
    auto matrix = build_block_matrix(make_spec(kernels::KernelKind::stationary, 2),
                                     {0.0}, {s});
    auto result = fredholm_det(matrix);
    CHECK(std::abs(result.value - prob) <= 1e-8);

    auto rescaled = gap_probability_topline(2, {0.0}, {s - shift});
    CHECK(std::abs(rescaled.value - result.value) <= 1e-9);
  }
}

TEST_CASE("factorized blocks agree with per-entry kernel evaluation") {
  kernels::KernelOptions opt;

  SUBCASE("ordered and reversed blocks of the finite-system kernel") {
    auto matrix = build_block_matrix(make_spec(kernels::KernelKind::extended, 2),
                                     {0.0, 0.6}, {0.7, 0.7});
    const auto& r0 = matrix.rules[0];
    const auto& r1 = matrix.rules[1];
    int n0 = static_cast<int>(r0.nodes.size());
    for (int a : {0, 5, 150, n0 - 1}) {
      for (int b : {0, 7, 200, n0 - 1}) {
        double sw = std::sqrt(r0.weights[a] * r1.weights[b]);
        double rev = sw * kernels::kernel_extended(2, r0.nodes[a], 0.0,
                                                   r1.nodes[b], 0.6, opt);
        double fwd = sw * kernels::kernel_extended(2, r1.nodes[b], 0.6,
                                                   r0.nodes[a], 0.0, opt);
        CHECK(std::abs(matrix.blocks(a, n0 + b) - rev) <=
              1e-13 * std::max(1.0, std::abs(rev)));
        CHECK(std::abs(matrix.blocks(n0 + b, a) - fwd) <=
              1e-13 * std::max(1.0, std::abs(fwd)));
      }
    }
    // reversed-time block carries the negated tail sum
    CHECK(matrix.blocks(0, n0 + 0) * kernels::kernel_extended(
                                         2, r0.nodes[0], 0.0, r1.nodes[0], 0.6,
                                         opt) > 0.0);
  }

  SUBCASE("edge-rescaled blocks") {
    auto matrix = build_block_matrix(make_spec(kernels::KernelKind::rescaled, 8),
                                     {0.0, 0.5}, {-0.5, 0.0});
    const auto& r0 = matrix.rules[0];
    const auto& r1 = matrix.rules[1];
    int n0 = static_cast<int>(r0.nodes.size());
    for (int a : {0, 11, 240}) {
      for (int b : {3, 100, 319}) {
        double sw = std::sqrt(r0.weights[a] * r1.weights[b]);
        double rev = sw * kernels::kernel_rescaled(8, r0.nodes[a], 0.0,
                                                   r1.nodes[b], 0.5, opt);
        double fwd = sw * kernels::kernel_rescaled(8, r1.nodes[b], 0.5,
                                                   r0.nodes[a], 0.0, opt);
        CHECK(std::abs(matrix.blocks(a, n0 + b) - rev) <=
              1e-12 * std::max(1.0, std::abs(rev)));
        CHECK(std::abs(matrix.blocks(n0 + b, a) - fwd) <=
              1e-12 * std::max(1.0, std::abs(fwd)));
      }
    }
  }

  SUBCASE("scale-free blocks on both reversed-time routes") {
    for (double t1 : {0.5, 1.5}) {
      auto matrix = build_block_matrix(make_spec(kernels::KernelKind::airy_extended),
                                       {0.0, t1}, {-0.4, 0.2});
      const auto& r0 = matrix.rules[0];
      const auto& r1 = matrix.rules[1];
      int n0 = static_cast<int>(r0.nodes.size());
      for (int a : {0, 40, 280}) {
        for (int b : {2, 90, 310}) {
          double sw = std::sqrt(r0.weights[a] * r1.weights[b]);
          double rev = sw * kernels::kernel_airy_extended(r0.nodes[a], 0.0,
                                                          r1.nodes[b], t1, opt);
          double fwd = sw * kernels::kernel_airy_extended(r1.nodes[b], t1,
                                                          r0.nodes[a], 0.0, opt);
          CHECK(std::abs(matrix.blocks(a, n0 + b) - rev) <=
                1e-12 * std::max(1.0, std::abs(rev)));
          CHECK(std::abs(matrix.blocks(n0 + b, a) - fwd) <=
                1e-12 * std::max(1.0, std::abs(fwd)));
        }
      }
    }
  }
}

TEST_CASE("single-time block matrix is symmetric and a numerical contraction") {
  auto matrix = build_block_matrix(make_spec(kernels::KernelKind::stationary, 6),
                                   {0.0}, {0.0});
  double asym = (matrix.blocks - matrix.blocks.transpose()).cwiseAbs().maxCoeff();
  CHECK(asym <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix.blocks);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-8);
}

TEST_CASE("GUE edge law: reference values, tails, and monotonicity") {
  const std::vector<std::pair<double, double>> reference = {
      {-2.0, 0.41322414250512}, {-1.0, 0.80721424199929},
      {0.0, 0.9693728283552651}, {1.0, 0.99750543814939},
      {2.0, 0.99988755369831},
  };
  for (const auto& [s, value] : reference)
    CHECK(std::abs(tracy_widom_gue(s) - value) <= 1e-8);

  CHECK(std::abs(tracy_widom_gue(-10.0)) <= 1e-6);
  CHECK(tracy_widom_gue(8.0) >= 1.0 - 1e-8);

  double prev = -1.0;
  for (int i = 0; i < 20; ++i) {
    double s = -3.0 + 6.0 * i / 19.0;
    double v = tracy_widom_gue(s);
    CHECK(v > prev);
    prev = v;
  }

  auto at_zero = airy2_joint({0.0}, {0.0});
  CHECK(at_zero.quadrature_error_estimate <= 1e-6);
  CHECK(at_zero.truncation_budget <= 1e-10);
}

TEST_CASE("one-point gap law at small M matches its reference values") {
  const std::vector<std::pair<double, double>> reference = {
      {-1.0, 0.742310573509}, {0.0, 0.955843359850}, {1.0, 0.996257208827},
  };
  for (const auto& [s, value] : reference) {
    auto result = gap_probability_topline(8, {0.0}, {s});
    CHECK(std::abs(result.value - value) <= 1e-8);
    CHECK(result.quadrature_error_estimate <= 1e-6);
  }
}

TEST_CASE("gap determinant saturates at the cutoff extremes") {
  for (int m : {1, 3}) {
    auto low = fredholm_det(build_block_matrix(
        make_spec(kernels::KernelKind::stationary, m), {0.0}, {1e-8}));
    CHECK(std::abs(low.value) <= 1e-6);
  }
  auto high = fredholm_det(build_block_matrix(
      make_spec(kernels::KernelKind::stationary, 2), {0.0}, {30.0}));
  CHECK(std::abs(high.value - 1.0) <= 1e-9);
}

TEST_CASE("gap determinant is increasing in the cutoff") {
  double prev = -1.0;
  for (int i = 0; i < 20; ++i) {
    double s = -2.0 + 4.0 * i / 19.0;
    double v = gap_probability_topline(8, {0.0}, {s}).value;
    CHECK(v > prev);
    prev = v;
  }
  prev = -1.0;
  for (double s2 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    double v = gap_probability_topline(8, {0.0, 0.5}, {0.0, s2}).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("two-point joint laws match their reference values") {
  const struct {
    std::vector<double> taus, cutoffs;
    double value;
  } cases[] = {
      {{0.0, 1.0}, {0.0, 0.0}, 0.943432927959},
      {{0.0, 0.5}, {-0.5, 0.5}, 0.912803119834},
      {{0.0, 2.0}, {0.0, 0.0}, 0.940900482659},
  };
  for (const auto& c : cases) {
    auto result = airy2_joint(c.taus, c.cutoffs);
    CHECK(std::abs(result.value - c.value) <= 1e-8);
  }
}

TEST_CASE("distant times decorrelate to the product of marginals") {
  double marginal = gap_probability_topline(8, {0.0}, {0.0}).value;
  double joint = gap_probability_topline(8, {0.0, 50.0}, {0.0, 0.0}).value;
  CHECK(std::abs(joint - marginal * marginal) <= 1e-4);

  double f2 = tracy_widom_gue(0.0);
  double airy_joint = airy2_joint({0.0, 50.0}, {0.0, 0.0}).value;
  CHECK(std::abs(airy_joint - f2 * f2) <= 1e-4);
}

TEST_CASE("stationarity symmetries of the two-point joint law") {
  double a = airy2_joint({0.0, 0.7}, {0.4, -0.3}).value;
  double b = airy2_joint({0.0, 0.7}, {-0.3, 0.4}).value;
  CHECK(std::abs(a - b) <= 1e-8);

  double shifted = airy2_joint({2.0, 2.7}, {0.4, -0.3}).value;
  CHECK(std::abs(shifted - a) <= 1e-9);
}

TEST_CASE("vanishing time separation collapses to the one-point law") {
  // The collapse defect scales like sqrt(gap) (local Brownian modulus), with
  // a prefactor proportional to the edge-law density at the cutoff.
  double f2_one = tracy_widom_gue(1.0);
  double prev = HUGE_VAL;
  for (double g : {0.08, 0.04, 0.02, 0.01}) {
    double diff = f2_one - airy2_joint({0.0, g}, {1.0, 1.0}).value;
    CHECK(diff > 0.0);
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev <= 1e-3);

  double f2_zero = tracy_widom_gue(0.0);
  double r1 = (f2_zero - airy2_joint({0.0, 0.04}, {0.0, 0.0}).value) / std::sqrt(0.04);
  double r2 = (f2_zero - airy2_joint({0.0, 0.01}, {0.0, 0.0}).value) / std::sqrt(0.01);
  CHECK(std::abs(r1 - r2) <= 0.05 * r2);
}

TEST_CASE("single-time joint law reduces to the GUE edge law") {
  double via_joint = airy2_joint({5.0}, {0.3}).value;
  double direct = tracy_widom_gue(0.3);
  CHECK(via_joint == direct);
}

TEST_CASE("gap law at M = 128 sits close to the GUE edge law at 0") {
  auto result = gap_probability_topline(128, {0.0}, {0.0});
  CHECK(std::abs(result.value - tracy_widom_gue(0.0)) <= 0.02);
}

TEST_CASE("sup distance of the one-point gap law decays in M") {
  std::map<double, double> f2;
  for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) f2[s] = tracy_widom_gue(s);
  double prev = HUGE_VAL;
  double last = HUGE_VAL;
  for (int m : {8, 16, 32, 64, 128}) {
    double sup = 0.0;
    for (const auto& [s, ref] : f2) {
      double v = gap_probability_topline(m, {0.0}, {s}).value;
      sup = std::max(sup, std::abs(v - ref));
    }
    CHECK(sup < prev);
    prev = sup;
    last = sup;
  }
  // first-order edge effects decay like M^{-1/3}; measured sup at M = 128
  CHECK(last <= 0.045);
}

TEST_CASE("reversed-time truncation and self-convergence accounting") {
  auto two_time = gap_probability_topline(8, {0.0, 1.0}, {0.0, 0.0});
  CHECK(two_time.quadrature_error_estimate <= 1e-6);
  CHECK(two_time.truncation_budget <= 1e-10);

  auto airy_two = airy2_joint({0.0, 1.0}, {0.0, 0.0});
  CHECK(airy_two.quadrature_error_estimate <= 1e-6);
  CHECK(airy_two.truncation_budget <= 1e-10);
}

TEST_CASE("block matrix layout tracks the per-time quadrature rules") {
  auto matrix = build_block_matrix(make_spec(kernels::KernelKind::rescaled, 4),
                                   {0.0, 1.0}, {-0.5, 0.5});
  int n0 = static_cast<int>(matrix.rules[0].nodes.size());
  int n1 = static_cast<int>(matrix.rules[1].nodes.size());
  CHECK(matrix.blocks.rows() == n0 + n1);
  CHECK(matrix.blocks.cols() == n0 + n1);
  CHECK(matrix.times.size() == 2);
  CHECK(matrix.cutoffs[0] == -0.5);
}

TEST_CASE("invalid grids and kernels are rejected") {
  auto spec = make_spec(kernels::KernelKind::rescaled, 4);
  CHECK_THROWS_AS(build_block_matrix(spec, {0.0, 0.0}, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(build_block_matrix(spec, {1.0, 0.0}, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(build_block_matrix(spec, {0.0, 1.0}, {0.0}), DomainError);
  CHECK_THROWS_AS(build_block_matrix(spec, {}, {}), DomainError);
  CHECK_THROWS_AS(
      build_block_matrix(make_spec(kernels::KernelKind::semigroup, 3), {0.0}, {0.0}),
      UsageError);

  CHECK_THROWS_AS(gap_probability_topline(0, {0.0}, {0.0}), DomainError);
  CHECK_THROWS_AS(gap_probability_topline(1, {0.0}, {-3.0}), DomainError);
  CHECK_THROWS_AS(gap_probability_topline(8, {0.0, 0.001}, {0.0, 0.0}),
                  TruncationError);
  CHECK_THROWS_AS(gap_probability_topline(250, {0.0, 1.0}, {0.0, 0.0}),
                  CapacityError);

  CHECK_THROWS_AS(airy2_joint({0.0, 0.0005}, {0.0, 0.0}), IllConditionedError);
  CHECK_THROWS_AS(tracy_widom_gue(HUGE_VAL), DomainError);

  auto matrix = build_block_matrix(make_spec(kernels::KernelKind::stationary, 1),
                                   {0.0}, {1.0});
  matrix.blocks(0, 0) = std::nan("");
  CHECK_THROWS_AS(fredholm_det(matrix), NumericError);
}
