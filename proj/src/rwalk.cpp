#include "fspohn/rwalk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fspohn/errors.hpp"

namespace fspohn::rwalk {

namespace {

struct ScaledVector {
  std::vector<double> values;  // index h-1 holds height h
  double log_scale = 0.0;
};

// one application of T(x,y) = p(y-x) e^{-lambda(x+y)/2} on heights 1..h_max
void apply_transfer(const WalkModel& m, const std::vector<double>& half_tilt,
                    ScaledVector& f) {
  const int h = m.h_max;
  std::vector<double> g(h), out(h, 0.0);
  for (int x = 0; x < h; ++x) g[x] = f.values[x] * half_tilt[x];
  for (const auto& [d, p] : m.step_law) {
    const int lo = std::max(0, -d);
    const int hi = std::min(h, h - d);
    for (int x = lo; x < hi; ++x) out[x + d] += g[x] * p;
  }
  double mx = 0.0;
  for (int y = 0; y < h; ++y) {
    out[y] *= half_tilt[y];
    mx = std::max(mx, out[y]);
  }
  if (mx > 0.0 && mx < 1e-200) {
    for (auto& v : out) v /= mx;
    f.log_scale += std::log(mx);
  }
  f.values = std::move(out);
}

std::vector<double> half_tilt_table(const WalkModel& m) {
  std::vector<double> t(m.h_max);
  for (int h = 1; h <= m.h_max; ++h) t[h - 1] = std::exp(-0.5 * m.lambda * h);
  return t;
}

ScaledVector endpoint_vector(const WalkModel& m, int height) {
  ScaledVector f;
  f.values.assign(m.h_max, 0.0);
  f.values[height - 1] = std::exp(-0.5 * m.lambda * height);
  return f;
}

void validate_endpoint(const WalkModel& m, int height, const char* name) {
  if (height < 1 || height > m.h_max)
    throw DomainError(std::string("WalkModel: endpoint ") + name +
                      " must lie in [1, h_max]");
}

// forward vector at time k (all edge weights up to k and the u half-weight)
ScaledVector forward_to(const WalkModel& m, int k) {
  auto tilt = half_tilt_table(m);
  ScaledVector f = endpoint_vector(m, m.u);
  for (int step = -m.n_half; step < k; ++step) apply_transfer(m, tilt, f);
  return f;
}

}  // namespace

WalkModel make_model(const std::vector<std::pair<int, double>>& step_law,
                     double lambda, int n_half, int u, int v, int h_max) {
  if (step_law.empty()) throw DomainError("WalkModel: empty step law");
  double total = 0.0, mean = 0.0, var = 0.0;
  bool moves = false;
  for (const auto& [d, p] : step_law) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw DomainError("WalkModel: step probabilities must be nonnegative");
    total += p;
    mean += d * p;
    var += double(d) * d * p;
    if (d != 0 && p > 0.0) moves = true;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw DomainError("WalkModel: step probabilities must sum to 1");
  if (std::abs(mean) > 1e-12)
    throw DomainError("WalkModel: step law must have zero mean");
  if (!moves) throw DomainError("WalkModel: step law never moves");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("WalkModel: lambda must be positive");
  if (n_half < 0) throw DomainError("WalkModel: n_half must be >= 0");

  WalkModel m;
  m.step_law = step_law;
  m.lambda = lambda;
  m.n_half = n_half;
  m.sigma2 = var;
  m.h_max = h_max > 0
                ? h_max
                : static_cast<int>(std::ceil(25.0 / std::cbrt(lambda)));
  m.u = u;
  m.v = v;
  validate_endpoint(m, u, "u");
  validate_endpoint(m, v, "v");
  return m;
}

WalkModel make_lazy_model(double lambda, int n_half, int u, int v, int h_max) {
  return make_model({{-1, 0.25}, {0, 0.5}, {1, 0.25}}, lambda, n_half, u, v,
                    h_max);
}

std::vector<double> transfer_marginal(const WalkModel& model, int k) {
  if (k < -model.n_half || k > model.n_half)
    throw DomainError("transfer_marginal: time index outside [-N, N]");
  auto tilt = half_tilt_table(model);
  ScaledVector fwd = forward_to(model, k);
  ScaledVector bwd = endpoint_vector(model, model.v);
  for (int step = k; step < model.n_half; ++step)
    apply_transfer(model, tilt, bwd);

  std::vector<double> marginal(model.h_max);
  double z = 0.0;
  for (int x = 0; x < model.h_max; ++x) {
    marginal[x] = fwd.values[x] * bwd.values[x];
    z += marginal[x];
  }
  if (!(z > 0.0))
    throw DomainError(
        "transfer_marginal: no admissible bridge between the endpoints");
  for (auto& p : marginal) p /= z;
  return marginal;
}

double log_partition(const WalkModel& model) {
  ScaledVector fwd = forward_to(model, model.n_half);
  double paired =
      fwd.values[model.v - 1] * std::exp(-0.5 * model.lambda * model.v);
  if (!(paired > 0.0))
    throw DomainError(
        "log_partition: no admissible bridge between the endpoints");
  return std::log(paired) + fwd.log_scale;
}

namespace {

// strictly increasing m-tuples in [1, h_max], colex-ranked via binomials
struct TupleSpace {
  int h_max, m;
  std::vector<std::vector<long long>> binom;  // binom[n][k], k <= m
  long long size;

  TupleSpace(int h, int mm) : h_max(h), m(mm) {
    binom.assign(h + 1, std::vector<long long>(mm + 1, 0));
    for (int n = 0; n <= h; ++n) {
      binom[n][0] = 1;
      for (int k = 1; k <= std::min(n, mm); ++k)
        binom[n][k] = (n - 1 >= k ? binom[n - 1][k] : 0) + binom[n - 1][k - 1];
    }
    size = binom[h][mm];
  }

  long long rank(const int* x) const {
    long long r = 0;
    for (int i = 0; i < m; ++i) r += binom[x[i] - 1][i + 1];
    return r;
  }
};

}  // namespace

// exact partition function of m walks conditioned to stay strictly ordered
// at every time step, computed by transfer over ordered height tuples
double nonintersecting_weight(const WalkModel& base, const std::vector<int>& us,
                              const std::vector<int>& vs) {
  const int m = static_cast<int>(us.size());
  if (m < 1 || static_cast<int>(vs.size()) != m)
    throw DomainError("nonintersecting_weight: need matching endpoint vectors");
  if (m > 4)
    throw CapacityError("nonintersecting_weight: exact evaluation supports M <= 4");
  bool degenerate = false;
  for (int i = 0; i < m; ++i) {
    validate_endpoint(base, us[i], "u");
    validate_endpoint(base, vs[i], "v");
    if (i > 0 && (us[i] < us[i - 1] || vs[i] < vs[i - 1]))
      throw DomainError("nonintersecting_weight: endpoints must be ordered");
    if (i > 0 && (us[i] == us[i - 1] || vs[i] == vs[i - 1])) degenerate = true;
  }
  if (degenerate) return 0.0;
  if (base.h_max < m) return 0.0;

  TupleSpace space(base.h_max, m);
  if (space.size > 4'000'000)
    throw CapacityError(
        "nonintersecting_weight: ordered-tuple state space too large");

  std::vector<int> states(space.size * m);
  {
    int x[4];
    for (int i = 0; i < m; ++i) x[i] = i + 1;
    for (long long s = 0; s < space.size; ++s) {
      long long r = space.rank(x);
      for (int i = 0; i < m; ++i) states[r * m + i] = x[i];
      int i = 0;
      while (i < m) {
        ++x[i];
        if (x[i] <= (i + 1 < m ? x[i + 1] - 1 : base.h_max)) break;
        x[i] = i + 1;
        ++i;
      }
    }
  }

  const int n_disp = static_cast<int>(base.step_law.size());
  std::vector<int> combo_d;
  std::vector<double> combo_p;
  {
    std::vector<int> idx(m, 0);
    while (true) {
      double p = 1.0;
      for (int i = 0; i < m; ++i) p *= base.step_law[idx[i]].second;
      if (p > 0.0) {
        for (int i = 0; i < m; ++i)
          combo_d.push_back(base.step_law[idx[i]].first);
        combo_p.push_back(p);
      }
      int i = 0;
      while (i < m && ++idx[i] == n_disp) idx[i++] = 0;
      if (i == m) break;
    }
  }

  std::vector<double> half(base.h_max + 1);
  for (int h = 1; h <= base.h_max; ++h)
    half[h] = std::exp(-0.5 * base.lambda * h);

  std::vector<double> f(space.size, 0.0), out(space.size);
  double start = 1.0, finish = 1.0;
  for (int i = 0; i < m; ++i) {
    start *= half[us[i]];
    finish *= half[vs[i]];
  }
  f[space.rank(us.data())] = start;
  double log_scale = 0.0;

  for (int step = 0; step < 2 * base.n_half; ++step) {
    std::fill(out.begin(), out.end(), 0.0);
    for (long long s = 0; s < space.size; ++s) {
      if (f[s] == 0.0) continue;
      const int* x = &states[s * m];
      double tx = 1.0;
      for (int i = 0; i < m; ++i) tx *= half[x[i]];
      const double fx = f[s] * tx;
      for (size_t c = 0; c < combo_p.size(); ++c) {
        int y[4];
        bool ok = true;
        for (int i = 0; i < m; ++i) {
          y[i] = x[i] + combo_d[c * m + i];
          if (y[i] < 1 || y[i] > base.h_max || (i > 0 && y[i] <= y[i - 1])) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        double ty = 1.0;
        for (int i = 0; i < m; ++i) ty *= half[y[i]];
        out[space.rank(y)] += fx * combo_p[c] * ty;
      }
    }
    double mx = 0.0;
    for (double v : out) mx = std::max(mx, v);
    if (mx > 0.0 && mx < 1e-200) {
      for (auto& v : out) v /= mx;
      log_scale += std::log(mx);
    }
    f.swap(out);
  }

  return f[space.rank(vs.data())] * finish * std::exp(log_scale);
}

double scaled_cdf(int n, double t, double s) {
  if (n < 1) throw DomainError("scaled_cdf: n must be >= 1");
  if (!std::isfinite(t) || !std::isfinite(s))
    throw DomainError("scaled_cdf: arguments must be finite");
  WalkModel model = make_lazy_model(1.0 / n, n);
  // space multiplier 2^{1/3} sigma^{-2/3} lambda^{1/3} and time multiplier
  // 2^{-2/3} sigma^{-2/3} lambda^{-2/3} map the tilted walk onto the
  // unit-diffusion process with stationary density Ai(x-omega_1)^2:
  // the Brownian part forces alpha^2 sigma^2 beta = 1 and the area tilt
  // forces beta/alpha = 1/2
  const double scale = std::cbrt(0.5 * model.sigma2);  // 1/alpha
  const double beta = std::cbrt(0.25 / model.sigma2);
  long long k = static_cast<long long>(
      std::floor(beta * t * std::pow(double(n), 2.0 / 3.0)));
  k = std::clamp<long long>(k, -model.n_half, model.n_half);
  const double threshold = s * scale * std::cbrt(double(n));
  if (threshold < 1.0) return 0.0;
  auto marginal = transfer_marginal(model, static_cast<int>(k));
  const int h_star = std::min<long long>(
      static_cast<long long>(std::floor(threshold)), model.h_max);
  double cdf = 0.0;
  for (int h = 1; h <= h_star; ++h) cdf += marginal[h - 1];
  return cdf;
}

}  // namespace fspohn::rwalk
