#include "fspohn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fspohn/basis.hpp"
#include "fspohn/errors.hpp"
#include "fspohn/kernels.hpp"

namespace fspohn::sampling {

namespace {

constexpr int kGridCells = 4096;
constexpr double kMinSeparation = 1e-8;

void validate_sim_args(double t_end, double dt, const SimOptions& options) {
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw DomainError("simulate: t_end must be positive");
  if (!(dt > 0.0) || dt > 1e-3)
    throw DomainError("simulate: dt must lie in (0, 1e-3]");
  if (!(options.burn_in >= 0.0) || !std::isfinite(options.burn_in))
    throw DomainError("simulate: burn_in must be nonnegative");
  if (options.record_every < 1)
    throw DomainError("simulate: record_every must be >= 1");
  if (options.max_redraws < 1)
    throw DomainError("simulate: max_redraws must be >= 1");
}

bool in_open_chamber(const std::vector<double>& x, double floor) {
  if (!(x.front() > floor)) return false;
  for (std::size_t k = 1; k < x.size(); ++k)
    if (!(x[k] - x[k - 1] > floor)) return false;
  return true;
}

}  // namespace

DppSampler::DppSampler(int m_count) : m_(m_count) {
  if (m_count < 1) throw DomainError("DppSampler: m_count must be >= 1");
  if (m_count > 64)
    throw CapacityError("DppSampler: grid tables support m_count <= 64");
  const double x_hi = kernels::edge_shift(m_count) + 12.0;
  cell_ = x_hi / kGridCells;
  features_.resize(static_cast<std::size_t>(kGridCells) * m_);
  for (int c = 0; c < kGridCells; ++c) {
    double x = (c + 0.5) * cell_;
    for (int k = 1; k <= m_; ++k)
      features_[static_cast<std::size_t>(c) * m_ + (k - 1)] = basis::phi(k, x);
  }
}

std::vector<double> DppSampler::sample(rng::Stream& stream) const {
  // residual diagonal of the conditional kernel on the grid
  std::vector<double> residual(kGridCells);
  for (int c = 0; c < kGridCells; ++c) {
    const double* v = &features_[static_cast<std::size_t>(c) * m_];
    double s = 0.0;
    for (int k = 0; k < m_; ++k) s += v[k] * v[k];
    residual[c] = s;
  }

  std::vector<double> ortho;  // selected directions, row-major m_ each
  ortho.reserve(static_cast<std::size_t>(m_) * m_);
  std::vector<double> points;
  points.reserve(m_);
  std::vector<double> v(m_), w(m_);

  for (int pick = 0; pick < m_; ++pick) {
    double total = 0.0;
    for (int c = 0; c < kGridCells; ++c) total += std::max(residual[c], 0.0);
    total *= cell_;
    if (!(total > 0.0))
      throw SamplerError("DppSampler: conditional density mass vanished at point " +
                         std::to_string(pick + 1));

    double x = 0.0;
    double w_norm2 = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
      double target = stream.uniform() * total;
      double acc = 0.0;
      int cell = kGridCells - 1;
      for (int c = 0; c < kGridCells; ++c) {
        acc += std::max(residual[c], 0.0) * cell_;
        if (acc >= target) {
          cell = c;
          break;
        }
      }
      x = (cell + stream.uniform()) * cell_;
      // exact features at the continuous position
      for (int k = 0; k < m_; ++k) w[k] = v[k] = basis::phi(k + 1, x);
      double norm2 = 0.0;
      for (int k = 0; k < m_; ++k) norm2 += v[k] * v[k];
      for (int p = 0; p < pick; ++p) {
        const double* e = &ortho[static_cast<std::size_t>(p) * m_];
        double proj = 0.0;
        for (int k = 0; k < m_; ++k) proj += w[k] * e[k];
        for (int k = 0; k < m_; ++k) w[k] -= proj * e[k];
      }
      w_norm2 = 0.0;
      for (int k = 0; k < m_; ++k) w_norm2 += w[k] * w[k];
      accepted = w_norm2 > 1e-12 * std::max(norm2, 1e-300);
    }
    if (!accepted)
      throw SamplerError(
          "DppSampler: conditional density evaluation stalled (degenerate "
          "residual) at point " + std::to_string(pick + 1));

    double inv = 1.0 / std::sqrt(w_norm2);
    for (int k = 0; k < m_; ++k) w[k] *= inv;
    ortho.insert(ortho.end(), w.begin(), w.end());
    points.push_back(x);

    for (int c = 0; c < kGridCells; ++c) {
      const double* f = &features_[static_cast<std::size_t>(c) * m_];
      double proj = 0.0;
      for (int k = 0; k < m_; ++k) proj += f[k] * w[k];
      residual[c] -= proj * proj;
    }
  }

  std::sort(points.begin(), points.end());
  return points;
}

std::vector<double> sample_stationary_dpp(int m_count, rng::Stream& stream) {
  return DppSampler(m_count).sample(stream);
}

PathEnsemble simulate_fs(double x0, double t_end, double dt, std::uint64_t seed,
                         std::uint64_t stream_index, const SimOptions& options) {
  if (!(x0 > 0.0) || !std::isfinite(x0))
    throw DomainError("simulate_fs: x0 must be positive");
  validate_sim_args(t_end, dt, options);

  rng::Stream stream(seed, stream_index);
  const long long burn_steps = std::llround(options.burn_in / dt);
  const long long total_steps = burn_steps + std::llround(t_end / dt);

  PathEnsemble ensemble;
  ensemble.m_count = 1;
  ensemble.time_step = dt * options.record_every;
  ensemble.rng_seed = seed;
  ensemble.rng_stream = stream_index;
  ensemble.burned_in = options.burn_in > 0.0;
  ensemble.times.reserve(
      static_cast<std::size_t>((total_steps - burn_steps) / options.record_every) + 1);

  double x = x0;
  const double root_dt = std::sqrt(dt);
  for (long long step = 0; step <= total_steps; ++step) {
    if (step >= burn_steps && (step - burn_steps) % options.record_every == 0) {
      ensemble.times.push_back(step * dt);
      ensemble.states.push_back({x});
    }
    if (step == total_steps) break;
    double mean = x + basis::drift_single(x) * dt;
    double next = 0.0;
    bool accepted = false;
    for (int r = 0; r < options.max_redraws; ++r) {
      next = mean + root_dt * stream.normal();
      if (next > 0.0) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw SamplerError("simulate_fs: redraw budget exhausted at t = " +
                         std::to_string(step * dt) +
                         "; the time step is too large near the wall");
    x = next;
  }
  return ensemble;
}

PathEnsemble simulate_dyson_fs(int m_count, const std::vector<double>& x0,
                               double t_end, double dt, std::uint64_t seed,
                               std::uint64_t stream_index,
                               const SimOptions& options) {
  if (m_count < 1) throw DomainError("simulate_dyson_fs: m_count must be >= 1");
  if (static_cast<int>(x0.size()) != m_count)
    throw DomainError("simulate_dyson_fs: x0 must hold m_count coordinates");
  for (double c : x0)
    if (!std::isfinite(c)) throw DomainError("simulate_dyson_fs: non-finite x0");
  validate_sim_args(t_end, dt, options);
  const double floor = std::max(
      options.stability_floor < 0.0 ? std::sqrt(dt) : options.stability_floor,
      kMinSeparation);
  if (!in_open_chamber(x0, floor))
    throw DomainError(
        "simulate_dyson_fs: x0 must be strictly ordered with wall distance and "
        "gaps above the stability floor " + std::to_string(floor));

  rng::Stream stream(seed, stream_index);
  const long long burn_steps = std::llround(options.burn_in / dt);
  const long long total_steps = burn_steps + std::llround(t_end / dt);

  PathEnsemble ensemble;
  ensemble.m_count = m_count;
  ensemble.time_step = dt * options.record_every;
  ensemble.rng_seed = seed;
  ensemble.rng_stream = stream_index;
  ensemble.burned_in = options.burn_in > 0.0;

  basis::OrderedConfiguration cfg;
  cfg.coords = x0;
  std::vector<double> proposal(m_count);
  const double root_dt = std::sqrt(dt);
  for (long long step = 0; step <= total_steps; ++step) {
    if (step >= burn_steps && (step - burn_steps) % options.record_every == 0) {
      ensemble.times.push_back(step * dt);
      ensemble.states.push_back(cfg.coords);
    }
    if (step == total_steps) break;
    std::vector<double> drift = basis::drift_dyson(cfg);
    bool accepted = false;
    for (int r = 0; r < options.max_redraws; ++r) {
      for (int k = 0; k < m_count; ++k)
        proposal[k] = cfg.coords[k] + drift[k] * dt + root_dt * stream.normal();
      if (in_open_chamber(proposal, floor)) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw SamplerError("simulate_dyson_fs: redraw budget exhausted at t = " +
                         std::to_string(step * dt) +
                         "; the time step is too large near the chamber boundary");
    cfg.coords = proposal;
  }
  return ensemble;
}

TopPathStatistics top_path_statistics(const PathEnsemble& ensemble,
                                      const std::vector<double>& lag_set,
                                      std::vector<double> s_grid) {
  if (!ensemble.burned_in)
    throw StatisticsError(
        "top_path_statistics: ensemble lacks a stationary burn-in");
  const std::size_t n = ensemble.states.size();
  if (n < 100)
    throw StatisticsError("top_path_statistics: need at least 100 recorded states");
  if (!(ensemble.time_step > 0.0))
    throw StatisticsError("top_path_statistics: ensemble has no time spacing");

  std::vector<double> top(n);
  for (std::size_t i = 0; i < n; ++i) top[i] = ensemble.states[i].back();

  if (s_grid.empty()) {
    auto [lo_it, hi_it] = std::minmax_element(top.begin(), top.end());
    double lo = *lo_it, hi = *hi_it;
    s_grid.resize(20);
    for (int i = 0; i < 20; ++i) s_grid[i] = lo + (hi - lo) * i / 19.0;
  }

  const int n_batches = static_cast<int>(std::sqrt(static_cast<double>(n)));
  if (n_batches < 10)
    throw StatisticsError("top_path_statistics: too few states for batch means");

  // batch-means mean and standard error of a 0/1 series
  auto batch_stats = [&](auto&& indicator, std::size_t len, double& mean,
                         double& se) {
    const std::size_t batch_len = len / n_batches;
    if (batch_len == 0)
      throw StatisticsError("top_path_statistics: too few states for batch means");
    double grand = 0.0;
    std::vector<double> means(n_batches);
    for (int b = 0; b < n_batches; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < batch_len; ++i)
        s += indicator(static_cast<std::size_t>(b) * batch_len + i);
      means[b] = s / batch_len;
      grand += means[b];
    }
    grand /= n_batches;
    double var = 0.0;
    for (double mb : means) var += (mb - grand) * (mb - grand);
    var /= (n_batches - 1);
    mean = grand;
    se = std::sqrt(var / n_batches);
  };

  TopPathStatistics stats;
  stats.s_grid = s_grid;
  stats.n_batches = n_batches;
  for (double s : s_grid) {
    double mean, se;
    batch_stats([&](std::size_t i) { return top[i] <= s ? 1.0 : 0.0; }, n, mean, se);
    stats.marginal_cdf.push_back(mean);
    stats.marginal_se.push_back(se);
  }

  for (double lag : lag_set) {
    if (!(lag >= 0.0) || !std::isfinite(lag))
      throw DomainError("top_path_statistics: lags must be nonnegative");
    const auto k = static_cast<std::size_t>(std::llround(lag / ensemble.time_step));
    if (k >= n / 2)
      throw StatisticsError(
          "top_path_statistics: lag leaves too few sample pairs");
    TwoTimeCdf two;
    two.lag = k * ensemble.time_step;
    for (double s : s_grid) {
      double mean, se;
      batch_stats(
          [&](std::size_t i) {
            return (top[i] <= s && top[i + k] <= s) ? 1.0 : 0.0;
          },
          n - k, mean, se);
      two.values.push_back(mean);
      two.std_errors.push_back(se);
    }
    stats.two_time.push_back(std::move(two));
  }
  return stats;
}

}  // namespace fspohn::sampling
