#include "fspohn/fredholm.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fspohn/airy.hpp"
#include "fspohn/basis.hpp"
#include "fspohn/errors.hpp"

namespace fspohn::fredholm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Assembly {
  std::vector<quadrature::Rule> rules;
  MatrixXd blocks;
  double truncation_budget = 0.0;
};

void validate_grid(const std::vector<double>& times,
                   const std::vector<double>& cutoffs) {
  if (times.empty()) throw DomainError("build_block_matrix: need at least one time");
  if (times.size() != cutoffs.size())
    throw DomainError("build_block_matrix: one cutoff per time required");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(cutoffs[i]))
      throw DomainError("build_block_matrix: non-finite time or cutoff");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw DomainError("build_block_matrix: times must be strictly increasing");
  }
}

// Eigen-sum kinds share one factorization: block(i,j) = Phi_i^T D_ij Phi_j
// with D_ij diagonal in the mode index. The forward-time branch runs over
// modes 1..M; the reversed branch runs negated over the tail modes.
void assemble_eigen_kind(const kernels::KernelSpec& spec,
                         const std::vector<double>& times, Assembly& out,
                         const std::vector<int>& offset) {
  const auto& opt = spec.options;
  const int m = static_cast<int>(times.size());
  const int M = spec.m_count;
  if (M < 1) throw DomainError("build_block_matrix: m_count must be >= 1");
  const bool is_stationary = spec.kind == kernels::KernelKind::stationary;
  const bool is_rescaled = spec.kind == kernels::KernelKind::rescaled;
  const double shift = is_rescaled ? kernels::edge_shift(M) : 0.0;
  const bool needs_tail = !is_stationary && m > 1;
  const int k_rows = M + (needs_tail ? opt.k_tail : 0);

  auto rate = [&](int k) {
    if (is_stationary) return 0.0;
    double w = airy::airy_zero(k).omega;
    return is_rescaled ? w - shift : 0.5 * w;
  };

  std::vector<MatrixXd> phi(m);
  for (int i = 0; i < m; ++i) {
    const auto& rule = out.rules[i];
    const int n = static_cast<int>(rule.nodes.size());
    phi[i].resize(k_rows, n);
    for (int a = 0; a < n; ++a) {
      double x = shift + rule.nodes[a];
      if (!(x >= 0.0))
        throw DomainError("build_block_matrix: coordinate below 0 after shift");
      double sw = std::sqrt(rule.weights[a]);
      for (int k = 1; k <= k_rows; ++k) phi[i](k - 1, a) = basis::phi(k, x) * sw;
    }
  }

  for (int i = 0; i < m; ++i) {
    const int ni = static_cast<int>(out.rules[i].nodes.size());
    for (int j = 0; j < m; ++j) {
      const int nj = static_cast<int>(out.rules[j].nodes.size());
      double dtau = times[i] - times[j];
      if (i >= j) {
        VectorXd d(M);
        for (int k = 1; k <= M; ++k) d(k - 1) = std::exp(rate(k) * dtau);
        out.blocks.block(offset[i], offset[j], ni, nj).noalias() =
            phi[i].topRows(M).transpose() * d.asDiagonal() * phi[j].topRows(M);
      } else {
        double delta = times[j] - times[i];
        double tail = kernels::eigen_tail_bound(
            k_rows, is_rescaled ? delta : 0.5 * delta, shift);
        if (!(tail <= opt.tail_tol))
          throw TruncationError(
              "build_block_matrix: certified eigen-tail " + std::to_string(tail) +
              " exceeds tolerance for time gap " + std::to_string(delta));
        out.truncation_budget += tail;
        const int tail_rows = k_rows - M;
        VectorXd d(tail_rows);
        for (int t = 0; t < tail_rows; ++t) {
          double e = rate(M + 1 + t) * dtau;
          d(t) = e < -745.0 ? 0.0 : std::exp(e);
        }
        out.blocks.block(offset[i], offset[j], ni, nj).noalias() =
            -(phi[i].bottomRows(tail_rows).transpose() * d.asDiagonal() *
              phi[j].bottomRows(tail_rows));
      }
    }
  }
}

void assemble_airy_kind(const kernels::KernelSpec& spec,
                        const std::vector<double>& times, Assembly& out,
                        const std::vector<int>& offset) {
  const auto& opt = spec.options;
  const int m = static_cast<int>(times.size());
  const auto grid = kernels::airy_lambda_grid(opt);
  const int q_n = static_cast<int>(grid.size());

  std::vector<MatrixXd> ai_mat(m);
  double min_cutoff = HUGE_VAL;
  for (int i = 0; i < m; ++i) {
    const auto& rule = out.rules[i];
    const int n = static_cast<int>(rule.nodes.size());
    min_cutoff = std::min(min_cutoff, rule.nodes[0]);
    ai_mat[i].resize(q_n, n);
    for (int a = 0; a < n; ++a) {
      double sw = std::sqrt(rule.weights[a]);
      for (int q = 0; q < q_n; ++q)
        ai_mat[i](q, a) = airy::ai(rule.nodes[a] + grid[q].lambda) * sw;
    }
  }
  // |Ai(x)| <= e^{-x} turns the lambda cutoff into a certified remainder
  out.truncation_budget +=
      0.5 * std::exp(-2.0 * opt.lambda_cutoff - 2.0 * std::min(min_cutoff, 0.0));

  for (int i = 0; i < m; ++i) {
    const auto& rule_i = out.rules[i];
    const int ni = static_cast<int>(rule_i.nodes.size());
    for (int j = 0; j < m; ++j) {
      const auto& rule_j = out.rules[j];
      const int nj = static_cast<int>(rule_j.nodes.size());
      double dtau = times[i] - times[j];
      if (i >= j) {
        VectorXd d(q_n);
        for (int q = 0; q < q_n; ++q)
          d(q) = grid[q].weight * std::exp(-grid[q].lambda * dtau);
        out.blocks.block(offset[i], offset[j], ni, nj).noalias() =
            ai_mat[i].transpose() * d.asDiagonal() * ai_mat[j];
        continue;
      }
      double gap = times[j] - times[i];
      if (gap < 1e-3)
        throw IllConditionedError(
            "build_block_matrix: reversed-time gap below 1e-3 in the Airy kernel");
      if (gap < 1.0) {
        VectorXd d(q_n);
        for (int q = 0; q < q_n; ++q)
          d(q) = grid[q].weight * std::exp(grid[q].lambda * gap);
        MatrixXd gauss(ni, nj);
        for (int a = 0; a < ni; ++a) {
          double sw_a = std::sqrt(rule_i.weights[a]);
          for (int b = 0; b < nj; ++b)
            gauss(a, b) = sw_a *
                          kernels::airy_gaussian_term(gap, rule_i.nodes[a],
                                                      rule_j.nodes[b]) *
                          std::sqrt(rule_j.weights[b]);
        }
        out.blocks.block(offset[i], offset[j], ni, nj).noalias() =
            ai_mat[i].transpose() * d.asDiagonal() * ai_mat[j];
        out.blocks.block(offset[i], offset[j], ni, nj) -= gauss;
        out.truncation_budget +=
            std::exp(-(2.0 - gap) * opt.lambda_cutoff - 2.0 * std::min(min_cutoff, 0.0));
      } else {
        const auto rgrid = kernels::airy_lambda_grid_reversed(gap, opt);
        const int qr = static_cast<int>(rgrid.size());
        MatrixXd ar_i(qr, ni), ar_j(qr, nj);
        VectorXd d(qr);
        for (int q = 0; q < qr; ++q) {
          double e = rgrid[q].lambda * gap;
          d(q) = e < -745.0 ? 0.0 : rgrid[q].weight * std::exp(e);
        }
        for (int a = 0; a < ni; ++a) {
          double sw = std::sqrt(rule_i.weights[a]);
          for (int q = 0; q < qr; ++q)
            ar_i(q, a) = d(q) == 0.0
                             ? 0.0
                             : airy::ai(rule_i.nodes[a] + rgrid[q].lambda) * sw;
        }
        for (int b = 0; b < nj; ++b) {
          double sw = std::sqrt(rule_j.weights[b]);
          for (int q = 0; q < qr; ++q)
            ar_j(q, b) = d(q) == 0.0
                             ? 0.0
                             : airy::ai(rule_j.nodes[b] + rgrid[q].lambda) * sw;
        }
        out.blocks.block(offset[i], offset[j], ni, nj).noalias() =
            -(ar_i.transpose() * d.asDiagonal() * ar_j);
        out.truncation_budget += 1e-12;
      }
    }
  }
}

Assembly assemble(const kernels::KernelSpec& spec, const std::vector<double>& times,
                  const std::vector<double>& cutoffs, const RuleParams& rp) {
  validate_grid(times, cutoffs);
  if (spec.kind == kernels::KernelKind::semigroup)
    throw UsageError(
        "build_block_matrix: the semigroup kind is not a space-time correlation "
        "kernel; use stationary, extended, rescaled, or airy_extended");
  Assembly out;
  const int m = static_cast<int>(times.size());
  out.rules.reserve(m);
  std::vector<int> offset(m);
  int total = 0;
  for (int i = 0; i < m; ++i) {
    out.rules.push_back(quadrature::semiinfinite_rule(cutoffs[i], rp.decay_scale,
                                                      rp.n_panels, rp.n_per_panel));
    offset[i] = total;
    total += static_cast<int>(out.rules[i].nodes.size());
    out.truncation_budget += out.rules[i].truncation_bound;
  }
  out.blocks.resize(total, total);
  if (spec.kind == kernels::KernelKind::airy_extended)
    assemble_airy_kind(spec, times, out, offset);
  else
    assemble_eigen_kind(spec, times, out, offset);
  return out;
}

double log_safe_det_i_minus(const MatrixXd& b) {
  if (!b.allFinite())
    throw NumericError("fredholm_det: non-finite kernel matrix entries");
  MatrixXd a = MatrixXd::Identity(b.rows(), b.cols()) - b;
  Eigen::PartialPivLU<MatrixXd> lu(a);
  double sign = lu.permutationP().determinant();
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double d = lu.matrixLU()(i, i);
    if (d == 0.0) return 0.0;
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  return sign * std::exp(log_abs);
}

}  // namespace

BlockKernelMatrix build_block_matrix(const kernels::KernelSpec& spec,
                                     const std::vector<double>& times,
                                     const std::vector<double>& cutoffs,
                                     const RuleParams& rule_params) {
  Assembly a = assemble(spec, times, cutoffs, rule_params);
  BlockKernelMatrix out;
  out.spec = spec;
  out.times = times;
  out.cutoffs = cutoffs;
  out.rule_params = rule_params;
  out.rules = std::move(a.rules);
  out.blocks = std::move(a.blocks);
  out.truncation_budget = a.truncation_budget;
  return out;
}

FredholmResult fredholm_det(const BlockKernelMatrix& matrix) {
  FredholmResult r;
  r.value = log_safe_det_i_minus(matrix.blocks);
  RuleParams refined_params = matrix.rule_params;
  refined_params.n_per_panel *= 2;
  Assembly refined =
      assemble(matrix.spec, matrix.times, matrix.cutoffs, refined_params);
  double refined_value = log_safe_det_i_minus(refined.blocks);
  r.quadrature_error_estimate = std::abs(r.value - refined_value);
  r.truncation_budget = std::max(matrix.truncation_budget, refined.truncation_budget);
  if (!(r.value >= -1e-6 && r.value <= 1.0 + 1e-6))
    throw NumericError("fredholm_det: determinant " + std::to_string(r.value) +
                       " is outside the probability band [-1e-6, 1+1e-6]");
  return r;
}

FredholmResult gap_probability_topline(int M, const std::vector<double>& taus,
                                       const std::vector<double>& Ss) {
  if (M < 1) throw DomainError("gap_probability_topline: M must be >= 1");
  if (taus.empty() || taus.size() != Ss.size())
    throw DomainError("gap_probability_topline: need one cutoff per time");
  double shift = kernels::edge_shift(M);
  for (double s : Ss)
    if (!(shift + s >= 0.0))
      throw DomainError(
          "gap_probability_topline: unscaled cutoff c1 M^{2/3} + S below 0");
  kernels::KernelSpec spec;
  spec.kind = kernels::KernelKind::rescaled;
  spec.m_count = M;
  return fredholm_det(build_block_matrix(spec, taus, Ss));
}

FredholmResult airy2_joint(const std::vector<double>& taus,
                           const std::vector<double>& Ss) {
  if (taus.empty() || taus.size() != Ss.size())
    throw DomainError("airy2_joint: need one cutoff per time");
  kernels::KernelSpec spec;
  spec.kind = kernels::KernelKind::airy_extended;
  return fredholm_det(build_block_matrix(spec, taus, Ss));
}

double tracy_widom_gue(double S) {
  if (!std::isfinite(S)) throw DomainError("tracy_widom_gue: S must be finite");
  return airy2_joint({0.0}, {S}).value;
}

}  // namespace fspohn::fredholm
