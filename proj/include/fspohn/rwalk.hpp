#pragma once

#include <utility>
#include <vector>

// Area-tilted lattice walks on heights {1..h_max}: exact transfer-operator
// marginals, partition functions, non-intersecting determinants, and the
// diffusive-scaling comparison against the hard-wall stationary law.

namespace fspohn::rwalk {

struct WalkModel {
  std::vector<std::pair<int, double>> step_law;  // displacement -> probability
  double lambda = 0.0;  // area tilt per unit height
  int n_half = 0;       // time runs -n_half .. n_half
  int h_max = 0;        // lattice height cap
  int u = 1;            // height at time -n_half
  int v = 1;            // height at time +n_half
  double sigma2 = 0.0;  // recorded step variance
};

// lazy +-1 walk p(0)=1/2, p(+-1)=1/4; h_max auto = ceil(25 lambda^{-1/3})
WalkModel make_lazy_model(double lambda, int n_half, int u = 1, int v = 1,
                          int h_max = 0);

// general zero-mean step law; h_max = 0 selects the automatic cap
WalkModel make_model(const std::vector<std::pair<int, double>>& step_law,
                     double lambda, int n_half, int u, int v, int h_max = 0);

// exact marginal of the height at time k under the tilted bridge measure;
// index 0 of the result is height 1
std::vector<double> transfer_marginal(const WalkModel& model, int k);

// log of the tilted bridge partition function Z^{uv}
double log_partition(const WalkModel& model);

// partition function of M <= 4 mutually avoiding walks with ordered
// endpoint vectors, via a transfer operator on strictly increasing
// height tuples (synchronous steps admit touchless crossings, so a
// determinant of single-walk bridge weights would undercount)
double nonintersecting_weight(const WalkModel& base, const std::vector<int>& us,
                              const std::vector<int>& vs);

// P(X_{[beta t N^{2/3}]} <= s alpha N^{1/3}) for the lazy walk with
// lambda = 1/N pinned at u = v = 1; the amplitude alpha = sigma^{2/3} 2^{-1/3}
// and clock rate beta = sigma^{-2/3} 2^{-2/3} give the rescaled walk unit
// diffusion coefficient and unit area tilt
double scaled_cdf(int n, double t, double s);

}  // namespace fspohn::rwalk
