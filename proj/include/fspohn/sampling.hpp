#pragma once

#include <cstdint>
#include <vector>

#include "fspohn/rng.hpp"

// Exact determinantal sampling of the stationary M-point ensemble and
// Euler-Maruyama simulation of the single and M-particle hard-wall
// diffusions, with batch-means statistics of the top coordinate.

namespace fspohn::sampling {

// Inverse-CDF sampler for the rank-M projection ensemble on a fine grid
// (4096 cells over [0, c1 M^{2/3} + 12]); selected points keep their
// continuous within-cell positions, and the conditional kernel is updated
// by Gram-Schmidt in the M-dimensional feature space.
class DppSampler {
 public:
  explicit DppSampler(int m_count);

  // one exact draw: M strictly increasing positive coordinates
  std::vector<double> sample(rng::Stream& stream) const;

  int m_count() const { return m_; }
  double cell_width() const { return cell_; }

 private:
  int m_;
  double cell_;
  std::vector<double> features_;  // 4096 x M row-major, phi_k at cell centers
};

// convenience one-shot draw (builds the grid tables each call)
std::vector<double> sample_stationary_dpp(int m_count, rng::Stream& stream);

struct SimOptions {
  double burn_in = 50.0;  // simulated time discarded before recording
  int record_every = 1;   // record every k-th Euler step
  int max_redraws = 100;  // per-step rejection budget at the hard wall
  // multi-particle proposals whose wall distance or smallest gap falls below
  // this floor are rejected; the log-derivative drift is ~1/gap, so states
  // below ~sqrt(dt) make the next explicit Euler step explode. Negative
  // selects sqrt(dt); 0 restores the bare ordering test.
  double stability_floor = -1.0;
};

struct PathEnsemble {
  int m_count = 0;
  double time_step = 0.0;  // spacing of the recorded grid
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // one ordered configuration per time
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_stream = 0;
  bool burned_in = false;
};

// Euler-Maruyama for dX = a(X)dt + dB on (0, inf); proposals at or below
// the wall are rejected and the Gaussian redrawn
PathEnsemble simulate_fs(double x0, double t_end, double dt, std::uint64_t seed,
                         std::uint64_t stream = 0, const SimOptions& options = {});

// componentwise Euler-Maruyama for the M-particle diffusion; proposals
// leaving the open ordered chamber trigger a joint redraw of the step
PathEnsemble simulate_dyson_fs(int m_count, const std::vector<double>& x0,
                               double t_end, double dt, std::uint64_t seed,
                               std::uint64_t stream = 0,
                               const SimOptions& options = {});

struct TwoTimeCdf {
  double lag = 0.0;  // realized lag, a multiple of the recorded spacing
  std::vector<double> values;  // P(top(t) <= s, top(t + lag) <= s) over s_grid
  std::vector<double> std_errors;
};

struct TopPathStatistics {
  std::vector<double> s_grid;
  std::vector<double> marginal_cdf;
  std::vector<double> marginal_se;
  std::vector<TwoTimeCdf> two_time;
  int n_batches = 0;
};

// empirical one- and two-time CDFs of the top coordinate with batch-means
// standard errors; an empty s_grid selects 20 points spanning the data
TopPathStatistics top_path_statistics(const PathEnsemble& ensemble,
                                      const std::vector<double>& lag_set,
                                      std::vector<double> s_grid = {});

}  // namespace fspohn::sampling
