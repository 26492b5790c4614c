#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fspohn/airy.hpp"
#include "fspohn/basis.hpp"
#include "fspohn/errors.hpp"
#include "fspohn/fredholm.hpp"
#include "fspohn/kernels.hpp"
#include "fspohn/rwalk.hpp"
#include "fspohn/sampling.hpp"
#include "fspohn/study.hpp"

namespace {

using fspohn::UsageError;

std::string num(double v) { return fspohn::study::format_csv_number(v); }

std::string coord_header(const std::string& lead, int m) {
  std::string h = lead;
  for (int i = 1; i <= m; ++i) h += ",x_" + std::to_string(i);
  return h;
}

fspohn::kernels::KernelKind kernel_kind_from(const std::string& name) {
  using fspohn::kernels::KernelKind;
  if (name == "stationary") return KernelKind::stationary;
  if (name == "extended") return KernelKind::extended;
  if (name == "rescaled") return KernelKind::rescaled;
  if (name == "airy") return KernelKind::airy_extended;
  if (name == "semigroup") return KernelKind::semigroup;
  throw UsageError("unknown kernel kind '" + name + "'");
}

void run_airy_eval(double x) {
  auto p = fspohn::airy::ai_both(x);
  std::cout << "x,ai,ai_prime\n"
            << num(x) << "," << num(p.value) << "," << num(p.deriv) << "\n";
}

void run_airy_zeros(int count) {
  if (count < 1) throw UsageError("--count must be >= 1");
  std::cout << "k,omega,deriv\n";
  for (int k = 1; k <= count; ++k) {
    auto z = fspohn::airy::airy_zero(k);
    std::cout << k << "," << num(z.omega) << "," << num(z.deriv) << "\n";
  }
}

void run_basis_phi(int k, double x) {
  std::cout << "k,x,phi\n"
            << k << "," << num(x) << "," << num(fspohn::basis::phi(k, x))
            << "\n";
}

void run_basis_drift(const std::string& coords_text) {
  auto coords = fspohn::study::parse_double_list(coords_text, "coords");
  if (coords.empty()) throw UsageError("--coords needs at least one value");
  fspohn::basis::OrderedConfiguration cfg{coords};
  auto drift = fspohn::basis::drift_dyson(cfg);
  std::cout << "i,x_i,drift_i\n";
  for (std::size_t i = 0; i < coords.size(); ++i)
    std::cout << (i + 1) << "," << num(coords[i]) << "," << num(drift[i])
              << "\n";
}

void run_kernel_eval(const std::string& kind, int m,
                     const std::string& points_text) {
  auto vals = fspohn::study::parse_double_list(points_text, "points");
  if (vals.empty() || vals.size() % 4 != 0)
    throw UsageError("--points needs xi_i,tau_i,xi_j,tau_j quadruples");
  fspohn::kernels::KernelSpec spec;
  spec.kind = kernel_kind_from(kind);
  spec.m_count = m;
  std::cout << "xi_i,tau_i,xi_j,tau_j,value\n";
  for (std::size_t q = 0; q < vals.size(); q += 4) {
    double v = fspohn::kernels::evaluate(spec, vals[q], vals[q + 1],
                                         vals[q + 2], vals[q + 3]);
    std::cout << num(vals[q]) << "," << num(vals[q + 1]) << ","
              << num(vals[q + 2]) << "," << num(vals[q + 3]) << "," << num(v)
              << "\n";
  }
}

void run_fredholm_gap(int m, const std::string& taus_text,
                      const std::string& cutoffs_text) {
  auto taus = fspohn::study::parse_double_list(taus_text, "taus");
  auto cutoffs = fspohn::study::parse_double_list(cutoffs_text, "cutoffs");
  if (taus.empty() || taus.size() != cutoffs.size())
    throw UsageError("--taus and --cutoffs need equal nonzero lengths");
  auto r = fspohn::fredholm::gap_probability_topline(m, taus, cutoffs);
  std::cout << "value,quadrature_error_estimate,truncation_budget\n"
            << num(r.value) << "," << num(r.quadrature_error_estimate) << ","
            << num(r.truncation_budget) << "\n";
}

void run_fredholm_tw2(const std::string& grid_text) {
  auto ss = fspohn::study::parse_grid(grid_text, "s-grid");
  std::cout << "S,F2,quad_est,trunc_bound\n";
  for (double s : ss) {
    auto r = fspohn::fredholm::airy2_joint({0.0}, {s});
    std::cout << num(s) << "," << num(r.value) << ","
              << num(r.quadrature_error_estimate) << ","
              << num(r.truncation_budget) << "\n";
  }
}

void run_sample_dpp(int m, long long n, std::uint64_t seed) {
  if (n < 1) throw UsageError("--n must be >= 1");
  fspohn::rng::Stream stream(seed);
  fspohn::sampling::DppSampler sampler(m);
  std::cout << coord_header("draw", m) << "\n";
  for (long long d = 1; d <= n; ++d) {
    auto xs = sampler.sample(stream);
    std::cout << d;
    for (double x : xs) std::cout << "," << num(x);
    std::cout << "\n";
  }
}

void run_sample_sde(int m, double t_end, double dt, std::uint64_t seed,
                    const std::string& x0_text, double burn_in,
                    int record_every, std::uint64_t stream) {
  std::vector<double> x0;
  if (x0_text.empty()) {
    for (int i = 0; i < m; ++i) x0.push_back(0.8 * (i + 1));
  } else {
    x0 = fspohn::study::parse_double_list(x0_text, "x0");
  }
  fspohn::sampling::SimOptions opt;
  opt.burn_in = burn_in;
  opt.record_every = record_every;
  auto ens =
      fspohn::sampling::simulate_dyson_fs(m, x0, t_end, dt, seed, stream, opt);
  std::cout << coord_header("t", m) << "\n";
  for (std::size_t r = 0; r < ens.times.size(); ++r) {
    std::cout << num(ens.times[r]);
    for (double x : ens.states[r]) std::cout << "," << num(x);
    std::cout << "\n";
  }
}

void run_rw_marginal(int n, double lambda, int k, int u, int v) {
  auto model = fspohn::rwalk::make_lazy_model(lambda, n, u, v);
  auto marg = fspohn::rwalk::transfer_marginal(model, k);
  std::cout << "height,probability\n";
  for (std::size_t h = 0; h < marg.size(); ++h)
    std::cout << (h + 1) << "," << num(marg[h]) << "\n";
}

void run_rw_scaled_cdf(const std::string& n_list_text, double t,
                       const std::string& grid_text) {
  auto ns = fspohn::study::parse_int_list(n_list_text, "n-list");
  if (ns.empty()) throw UsageError("--n-list needs at least one value");
  auto ss = fspohn::study::parse_grid(grid_text, "s-grid");
  std::cout << "n,s,cdf\n";
  for (int n : ns)
    for (double s : ss)
      std::cout << n << "," << num(s) << ","
                << num(fspohn::rwalk::scaled_cdf(n, t, s)) << "\n";
}

void run_study_run(const std::string& config_path,
                   const std::vector<std::string>& overrides,
                   const std::string& out_dir) {
  auto config = fspohn::study::parse_config_file(config_path);
  for (const auto& assignment : overrides)
    fspohn::study::apply_override(config, assignment);
  if (!out_dir.empty()) config.out_dir = out_dir;
  int failed = fspohn::study::run_study(config);
  std::cout << config.out_dir << "/" << config.kind << ".csv\n";
  if (failed > 0)
    throw fspohn::NumericError("study: " + std::to_string(failed) +
                               " rows failed (see # row_error lines)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hard-wall Airy diffusion toolkit"};
  app.require_subcommand(1);

  auto* airy_cmd = app.add_subcommand("airy", "Airy function and its zeros");
  airy_cmd->require_subcommand(1);
  double airy_x = 0.0;
  auto* airy_eval = airy_cmd->add_subcommand("eval", "Ai and Ai' at a point");
  airy_eval->add_option("--x", airy_x, "evaluation point")->required();
  airy_eval->callback([&] { run_airy_eval(airy_x); });
  int zero_count = 0;
  auto* airy_zeros =
      airy_cmd->add_subcommand("zeros", "negative-axis zeros of Ai");
  airy_zeros->add_option("--count", zero_count, "number of zeros")->required();
  airy_zeros->callback([&] { run_airy_zeros(zero_count); });

  auto* basis_cmd =
      app.add_subcommand("basis", "eigenfunctions and diffusion drifts");
  basis_cmd->require_subcommand(1);
  int phi_k = 0;
  double phi_x = 0.0;
  auto* basis_phi =
      basis_cmd->add_subcommand("phi", "normalized eigenfunction phi_k");
  basis_phi->add_option("--k", phi_k, "eigenfunction index")->required();
  basis_phi->add_option("--x", phi_x, "evaluation point")->required();
  basis_phi->callback([&] { run_basis_phi(phi_k, phi_x); });
  std::string drift_coords;
  auto* basis_drift =
      basis_cmd->add_subcommand("drift", "multi-particle drift components");
  basis_drift
      ->add_option("--coords", drift_coords,
                   "comma-separated ordered configuration")
      ->required();
  basis_drift->callback([&] { run_basis_drift(drift_coords); });

  auto* kernel_cmd = app.add_subcommand("kernel", "correlation kernels");
  kernel_cmd->require_subcommand(1);
  std::string kernel_kind;
  int kernel_m = 0;
  std::string kernel_points;
  auto* kernel_eval =
      kernel_cmd->add_subcommand("eval", "evaluate a kernel at point pairs");
  kernel_eval
      ->add_option("--kind", kernel_kind,
                   "stationary|extended|rescaled|airy|semigroup")
      ->required()
      ->check(CLI::IsMember(
          {"stationary", "extended", "rescaled", "airy", "semigroup"}));
  kernel_eval->add_option("--m", kernel_m, "ensemble size (terms for semigroup)")
      ->required();
  kernel_eval
      ->add_option("--points", kernel_points,
                   "flat comma list of xi_i,tau_i,xi_j,tau_j quadruples")
      ->required();
  kernel_eval->callback(
      [&] { run_kernel_eval(kernel_kind, kernel_m, kernel_points); });

  auto* fredholm_cmd =
      app.add_subcommand("fredholm", "Fredholm determinant evaluations");
  fredholm_cmd->require_subcommand(1);
  int gap_m = 0;
  std::string gap_taus, gap_cutoffs;
  auto* fredholm_gap = fredholm_cmd->add_subcommand(
      "gap", "multi-time gap probability of the top line");
  fredholm_gap->add_option("--m", gap_m, "ensemble size")->required();
  fredholm_gap->add_option("--taus", gap_taus, "comma-separated times")
      ->required();
  fredholm_gap->add_option("--cutoffs", gap_cutoffs, "comma-separated cutoffs")
      ->required();
  fredholm_gap->callback([&] { run_fredholm_gap(gap_m, gap_taus, gap_cutoffs); });
  std::string tw2_grid;
  auto* fredholm_tw2 =
      fredholm_cmd->add_subcommand("tw2", "Tracy-Widom GUE distribution table");
  fredholm_tw2->add_option("--s-grid", tw2_grid, "grid a:b:n")->required();
  fredholm_tw2->callback([&] { run_fredholm_tw2(tw2_grid); });

  auto* sample_cmd = app.add_subcommand("sample", "stochastic samplers");
  sample_cmd->require_subcommand(1);
  int dpp_m = 0;
  long long dpp_n = 0;
  std::uint64_t dpp_seed = 0;
  auto* sample_dpp = sample_cmd->add_subcommand(
      "dpp", "exact draws from the stationary ensemble");
  sample_dpp->add_option("--m", dpp_m, "ensemble size")->required();
  sample_dpp->add_option("--n", dpp_n, "number of draws")->required();
  sample_dpp->add_option("--seed", dpp_seed, "rng seed")->required();
  sample_dpp->callback([&] { run_sample_dpp(dpp_m, dpp_n, dpp_seed); });
  int sde_m = 0;
  double sde_t_end = 0.0, sde_dt = 0.0, sde_burn_in = 50.0;
  std::uint64_t sde_seed = 0, sde_stream = 0;
  int sde_record_every = 1;
  std::string sde_x0;
  auto* sample_sde = sample_cmd->add_subcommand(
      "sde", "Euler-Maruyama trajectory of the ordered diffusion");
  sample_sde->add_option("--m", sde_m, "particle count")->required();
  sample_sde->add_option("--t-end", sde_t_end, "simulated time after burn-in")
      ->required();
  sample_sde->add_option("--dt", sde_dt, "Euler step")->required();
  sample_sde->add_option("--seed", sde_seed, "rng seed")->required();
  sample_sde->add_option("--x0", sde_x0,
                         "comma-separated start (default 0.8*(i+1))");
  sample_sde->add_option("--burn-in", sde_burn_in, "discarded initial time");
  sample_sde->add_option("--record-every", sde_record_every,
                         "record every k-th step");
  sample_sde->add_option("--stream", sde_stream, "rng stream id");
  sample_sde->callback([&] {
    run_sample_sde(sde_m, sde_t_end, sde_dt, sde_seed, sde_x0, sde_burn_in,
                   sde_record_every, sde_stream);
  });

  auto* rw_cmd = app.add_subcommand("rw", "area-tilted lattice walk");
  rw_cmd->require_subcommand(1);
  int rw_n = 0, rw_k = 0, rw_u = 1, rw_v = 1;
  double rw_lambda = 0.0;
  auto* rw_marginal =
      rw_cmd->add_subcommand("marginal", "exact bridge height marginal");
  rw_marginal->add_option("--n", rw_n, "half-length of the bridge")->required();
  rw_marginal->add_option("--lambda", rw_lambda, "area tilt")->required();
  rw_marginal->add_option("--k", rw_k, "time of the marginal")->required();
  rw_marginal->add_option("--u", rw_u, "left endpoint height");
  rw_marginal->add_option("--v", rw_v, "right endpoint height");
  rw_marginal->callback([&] { run_rw_marginal(rw_n, rw_lambda, rw_k, rw_u, rw_v); });
  std::string rw_n_list, rw_grid;
  double rw_t = 0.0;
  auto* rw_scaled = rw_cmd->add_subcommand(
      "scaled-cdf", "diffusively rescaled height distribution");
  rw_scaled->add_option("--n-list", rw_n_list, "comma-separated walk sizes")
      ->required();
  rw_scaled->add_option("--t", rw_t, "rescaled time")->required();
  rw_scaled->add_option("--s-grid", rw_grid, "grid a:b:n")->required();
  rw_scaled->callback([&] { run_rw_scaled_cdf(rw_n_list, rw_t, rw_grid); });

  auto* study_cmd = app.add_subcommand("study", "batch parameter studies");
  study_cmd->require_subcommand(1);
  std::string study_config, study_out_dir;
  std::vector<std::string> study_sets;
  auto* study_run =
      study_cmd->add_subcommand("run", "run a configured study to CSV");
  study_run->add_option("config", study_config, "key=value config file")
      ->required();
  study_run->add_option("--set", study_sets, "override key=value (repeatable)");
  study_run->add_option("--out-dir", study_out_dir, "output directory");
  study_run->callback(
      [&] { run_study_run(study_config, study_sets, study_out_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const fspohn::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fspohn::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fspohn::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fspohn::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
