#include "fspohn/study.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fspohn/basis.hpp"
#include "fspohn/errors.hpp"
#include "fspohn/fredholm.hpp"
#include "fspohn/kernels.hpp"
#include "fspohn/quadrature.hpp"
#include "fspohn/rwalk.hpp"
#include "fspohn/sampling.hpp"

namespace fspohn::study {

namespace {

const std::set<std::string> kKinds = {"kernel-convergence", "theorem1",
                                      "tw2-table", "sde-vs-fredholm",
                                      "rw-scaling"};

const std::map<std::string, std::set<std::string>> kAllowedKeys = {
    {"theorem1", {"m_list", "s_grid"}},
    {"kernel-convergence", {"m_list", "xi_list", "tau_pairs"}},
    {"tw2-table", {"s_grid"}},
    {"sde-vs-fredholm",
     {"m", "t_end", "dt", "seed", "s_grid", "burn_in", "record_every"}},
    {"rw-scaling", {"n_list", "t", "s_grid"}},
};

const std::map<std::string, std::vector<std::string>> kRequiredKeys = {
    {"theorem1", {"m_list"}},
    {"kernel-convergence", {"m_list"}},
    {"tw2-table", {"s_grid"}},
    {"sde-vs-fredholm", {"m", "t_end", "dt", "seed", "s_grid"}},
    {"rw-scaling", {"n_list", "s_grid"}},
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw UsageError("config: key '" + key + "' has malformed number '" +
                     text + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw UsageError("config: key '" + key + "' has malformed integer '" +
                     text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text,
                                                   const std::string& key) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split(text, ',')) {
    auto halves = split(item, ':');
    if (halves.size() != 2)
      throw UsageError("config: key '" + key +
                       "' expects comma-separated a:b pairs");
    out.push_back({parse_double(halves[0], key), parse_double(halves[1], key)});
  }
  return out;
}

const std::string& require_key(const StudyConfig& config,
                               const std::string& key) {
  auto it = config.params.find(key);
  if (it == config.params.end())
    throw UsageError("study config: missing key '" + key + "'");
  return it->second;
}

std::string param_or(const StudyConfig& config, const std::string& key,
                     const std::string& fallback) {
  auto it = config.params.find(key);
  return it == config.params.end() ? fallback : it->second;
}

void validate_keys(const StudyConfig& config) {
  if (config.kind.empty())
    throw UsageError("study config: missing key 'kind'");
  if (!kKinds.count(config.kind)) {
    std::string valid;
    for (const auto& k : kKinds) valid += (valid.empty() ? "" : ", ") + k;
    throw UsageError("study config: unknown kind '" + config.kind +
                     "' (valid: " + valid + ")");
  }
  const auto& allowed = kAllowedKeys.at(config.kind);
  for (const auto& [key, value] : config.params)
    if (!allowed.count(key))
      throw UsageError("study config: unknown key '" + key + "' for kind '" +
                       config.kind + "'");
  for (const auto& key : kRequiredKeys.at(config.kind)) require_key(config, key);
}

void set_pair(StudyConfig& config, const std::string& key,
              const std::string& value, bool allow_replace) {
  if (key == "kind") {
    if (!allow_replace && !config.kind.empty())
      throw UsageError("study config: duplicate key 'kind'");
    config.kind = value;
  } else if (key == "out_dir") {
    config.out_dir = value;
  } else {
    if (!allow_replace && config.params.count(key))
      throw UsageError("study config: duplicate key '" + key + "'");
    config.params[key] = value;
  }
}

struct Row {
  std::string line;
  std::string error;
};

void parallel_rows(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

// runs fn(i) for every row, capturing per-row failures as comment text
void fill_rows(std::vector<Row>& rows,
               const std::function<std::string(std::size_t)>& fn) {
  parallel_rows(rows.size(), [&](std::size_t i) {
    try {
      rows[i].line = fn(i);
    } catch (const Error& e) {
      rows[i].error = e.what();
    }
  });
}

int write_csv(const StudyConfig& config, const std::string& header,
              const std::vector<Row>& rows,
              const std::vector<std::string>& summaries) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec)
    throw UsageError("study: cannot create output directory '" +
                     config.out_dir + "': " + ec.message());
  const std::string path = config.out_dir + "/" + config.kind + ".csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("study: cannot open '" + path + "' for writing");

  char hash_line[64];
  std::snprintf(hash_line, sizeof(hash_line), "# config_hash=%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  out << hash_line << "\n" << header << "\n";
  int failed = 0;
  for (const auto& row : rows) {
    if (row.error.empty()) {
      out << row.line << "\n";
    } else {
      out << "# row_error: " << row.error << "\n";
      ++failed;
    }
  }
  for (const auto& s : summaries) out << "# " << s << "\n";
  if (!out.good()) throw UsageError("study: write to '" + path + "' failed");
  return failed;
}

std::string num(double v) { return format_csv_number(v); }

std::vector<int> sorted_m_list(const StudyConfig& config,
                               const std::string& key) {
  auto ms = parse_int_list(require_key(config, key), key);
  if (ms.empty())
    throw UsageError("study config: key '" + key + "' is empty");
  for (int m : ms)
    if (m < 1)
      throw UsageError("study config: key '" + key +
                       "' entries must be >= 1");
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

std::vector<double> sorted_grid(const StudyConfig& config,
                                const std::string& key,
                                const std::string& fallback) {
  auto g = parse_grid(param_or(config, key, fallback), key);
  std::sort(g.begin(), g.end());
  return g;
}

int run_theorem1(const StudyConfig& config) {
  auto ms = sorted_m_list(config, "m_list");
  auto ss = sorted_grid(config, "s_grid", "-2:2:5");

  std::vector<Row> rows(ms.size() * ss.size());
  std::vector<double> errs(rows.size(), NAN);
  fill_rows(rows, [&](std::size_t i) {
    int m = ms[i / ss.size()];
    double s = ss[i % ss.size()];
    auto gap = fredholm::gap_probability_topline(m, {0.0}, {s});
    auto tw = fredholm::airy2_joint({0.0}, {s});
    errs[i] = std::abs(gap.value - tw.value);
    return std::to_string(m) + "," + num(s) + "," + num(gap.value) + "," +
           num(tw.value) + "," + num(errs[i]) + "," +
           num(gap.quadrature_error_estimate) + "," +
           num(gap.truncation_budget) + "," +
           num(tw.quadrature_error_estimate) + "," + num(tw.truncation_budget);
  });

  std::vector<std::string> summaries;
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    double max_err = -1.0;
    for (std::size_t si = 0; si < ss.size(); ++si) {
      double e = errs[mi * ss.size() + si];
      if (std::isfinite(e)) max_err = std::max(max_err, e);
    }
    summaries.push_back("max_err M=" + std::to_string(ms[mi]) + ": " +
                        (max_err < 0 ? "nan" : num(max_err)));
  }
  return write_csv(config,
                   "M,S,gap_prob,tw2,abs_err,gap_quad_est,gap_trunc_bound,"
                   "tw2_quad_est,tw2_trunc_bound",
                   rows, summaries);
}

int run_kernel_convergence(const StudyConfig& config) {
  auto ms = sorted_m_list(config, "m_list");
  auto xis = parse_double_list(param_or(config, "xi_list", "-1,0,1"), "xi_list");
  auto taus = parse_pairs(param_or(config, "tau_pairs", "0:0,0.5:0"),
                          "tau_pairs");
  if (xis.empty()) throw UsageError("study config: key 'xi_list' is empty");

  const std::size_t per_m = taus.size() * xis.size() * xis.size();
  std::vector<Row> rows(ms.size() * per_m);
  std::vector<double> errs(rows.size(), NAN);
  fill_rows(rows, [&](std::size_t i) {
    int m = ms[i / per_m];
    std::size_t r = i % per_m;
    auto [tau_i, tau_j] = taus[r / (xis.size() * xis.size())];
    double xi_i = xis[(r / xis.size()) % xis.size()];
    double xi_j = xis[r % xis.size()];
    kernels::KernelSpec resc;
    resc.kind = kernels::KernelKind::rescaled;
    resc.m_count = m;
    kernels::KernelSpec airy;
    airy.kind = kernels::KernelKind::airy_extended;
    double k_m = kernels::evaluate(resc, xi_i, tau_i, xi_j, tau_j);
    double k_airy = kernels::evaluate(airy, xi_i, tau_i, xi_j, tau_j);
    errs[i] = std::abs(k_m - k_airy);
    return std::to_string(m) + "," + num(xi_i) + "," + num(tau_i) + "," +
           num(xi_j) + "," + num(tau_j) + "," + num(k_m) + "," + num(k_airy) +
           "," + num(errs[i]);
  });

  std::vector<std::string> summaries;
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    double max_err = -1.0;
    for (std::size_t r = 0; r < per_m; ++r) {
      double e = errs[mi * per_m + r];
      if (std::isfinite(e)) max_err = std::max(max_err, e);
    }
    summaries.push_back("max_err M=" + std::to_string(ms[mi]) + ": " +
                        (max_err < 0 ? "nan" : num(max_err)));
  }
  return write_csv(config, "M,xi_i,tau_i,xi_j,tau_j,k_m,k_airy,abs_err", rows,
                   summaries);
}

int run_tw2_table(const StudyConfig& config) {
  auto ss = sorted_grid(config, "s_grid", "");

  std::vector<Row> rows(ss.size());
  std::vector<double> values(ss.size(), NAN);
  fill_rows(rows, [&](std::size_t i) {
    auto r = fredholm::airy2_joint({0.0}, {ss[i]});
    values[i] = r.value;
    return num(ss[i]) + "," + num(r.value) + "," +
           num(r.quadrature_error_estimate) + "," + num(r.truncation_budget);
  });
  int failed = write_csv(config, "S,F2,quad_est,trunc_bound", rows, {});

  double prev = -HUGE_VAL;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    if (values[i] < prev - 1e-12)
      throw NumericError("tw2-table: F2 not monotone at S=" + num(ss[i]));
    prev = values[i];
  }
  return failed;
}

int run_sde_vs_fredholm(const StudyConfig& config) {
  long long m = parse_int(require_key(config, "m"), "m");
  double t_end = parse_double(require_key(config, "t_end"), "t_end");
  double dt = parse_double(require_key(config, "dt"), "dt");
  long long seed = parse_int(require_key(config, "seed"), "seed");
  auto ss = sorted_grid(config, "s_grid", "");
  double burn_in = parse_double(param_or(config, "burn_in", "50"), "burn_in");
  long long record_every =
      parse_int(param_or(config, "record_every", "10"), "record_every");
  if (m < 1) throw UsageError("study config: key 'm' must be >= 1");
  for (double s : ss)
    if (s < 0)
      throw UsageError("study config: key 's_grid' entries must be >= 0");

  sampling::SimOptions opt;
  opt.burn_in = burn_in;
  opt.record_every = record_every;
  std::vector<double> x0(m);
  for (long long i = 0; i < m; ++i) x0[i] = 0.8 * (i + 1);
  auto ens = sampling::simulate_dyson_fs(static_cast<int>(m), x0, t_end, dt,
                                         static_cast<std::uint64_t>(seed), 0,
                                         opt);
  auto stats = sampling::top_path_statistics(ens, {}, ss);
  double shift = kernels::edge_shift(static_cast<int>(m));

  std::vector<Row> rows(ss.size());
  fill_rows(rows, [&](std::size_t i) {
    auto det = fredholm::gap_probability_topline(static_cast<int>(m), {0.0},
                                                 {ss[i] - shift});
    return num(ss[i]) + "," + num(stats.marginal_cdf[i]) + "," +
           num(stats.marginal_se[i]) + "," + num(det.value) + "," +
           num(det.quadrature_error_estimate) + "," +
           num(det.truncation_budget) + "," +
           num(std::abs(stats.marginal_cdf[i] - det.value));
  });
  return write_csv(config,
                   "s,empirical,std_err,determinant,det_quad_est,"
                   "det_trunc_bound,abs_err",
                   rows, {});
}

int run_rw_scaling(const StudyConfig& config) {
  auto ns = parse_int_list(require_key(config, "n_list"), "n_list");
  if (ns.empty()) throw UsageError("study config: key 'n_list' is empty");
  for (int n : ns)
    if (n < 1)
      throw UsageError("study config: key 'n_list' entries must be >= 1");
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  double t = parse_double(param_or(config, "t", "0"), "t");
  auto ss = sorted_grid(config, "s_grid", "");

  auto rho_cdf = [](double s) {
    if (s <= 0) return 0.0;
    auto rule =
        quadrature::map_to_interval(quadrature::gauss_legendre(200), 0.0, s);
    return quadrature::integrate(rule, basis::stationary_density_single);
  };

  std::vector<Row> rows(ns.size() * ss.size());
  std::vector<double> errs(rows.size(), NAN);
  fill_rows(rows, [&](std::size_t i) {
    int n = ns[i / ss.size()];
    double s = ss[i % ss.size()];
    double walk = rwalk::scaled_cdf(n, t, s);
    double limit = rho_cdf(s);
    errs[i] = std::abs(walk - limit);
    return std::to_string(n) + "," + num(s) + "," + num(walk) + "," +
           num(limit) + "," + num(errs[i]);
  });

  std::vector<std::string> summaries;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    double sup = -1.0;
    for (std::size_t si = 0; si < ss.size(); ++si) {
      double e = errs[ni * ss.size() + si];
      if (std::isfinite(e)) sup = std::max(sup, e);
    }
    summaries.push_back("sup_err N=" + std::to_string(ns[ni]) + ": " +
                        (sup < 0 ? "nan" : num(sup)));
  }
  return write_csv(config, "n,s,walk_cdf,limit_cdf,abs_err", rows, summaries);
}

}  // namespace

StudyConfig parse_config_text(const std::string& text) {
  StudyConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("study config: line " + std::to_string(line_no) +
                       " is not key=value: '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw UsageError("study config: line " + std::to_string(line_no) +
                       " has an empty key");
    set_pair(config, key, value, false);
  }
  validate_keys(config);
  return config;
}

StudyConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("study config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(StudyConfig& config, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw UsageError("study override is not key=value: '" + assignment + "'");
  set_pair(config, trim(assignment.substr(0, eq)),
           trim(assignment.substr(eq + 1)), true);
}

std::uint64_t config_hash(const StudyConfig& config) {
  std::string canon = "kind=" + config.kind + "\n";
  for (const auto& [key, value] : config.params)
    canon += key + "=" + value + "\n";
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int worker_count() {
  const char* env = std::getenv("FS_AIRY_THREADS");
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (!env || !*env) return hw;
  long long v = parse_int(env, "FS_AIRY_THREADS");
  if (v < 1)
    throw UsageError("FS_AIRY_THREADS must be a positive integer");
  return static_cast<int>(std::min<long long>(v, hw));
}

std::string format_csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<double> parse_grid(const std::string& text,
                               const std::string& key) {
  auto parts = split(text, ':');
  if (parts.size() != 3)
    throw UsageError("config: key '" + key +
                     "' expects grid syntax a:b:n");
  double a = parse_double(parts[0], key);
  double b = parse_double(parts[1], key);
  long long n = parse_int(parts[2], key);
  if (n < 1)
    throw UsageError("config: key '" + key +
                     "' needs at least one grid point");
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(a);
  } else {
    for (long long i = 0; i < n; ++i)
      out.push_back(a + (b - a) * static_cast<double>(i) /
                            static_cast<double>(n - 1));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ','))
    out.push_back(parse_double(item, key));
  return out;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& key) {
  std::vector<int> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    long long v = parse_int(item, key);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

int run_study(const StudyConfig& config) {
  validate_keys(config);
  if (config.kind == "theorem1") return run_theorem1(config);
  if (config.kind == "kernel-convergence") return run_kernel_convergence(config);
  if (config.kind == "tw2-table") return run_tw2_table(config);
  if (config.kind == "sde-vs-fredholm") return run_sde_vs_fredholm(config);
  return run_rw_scaling(config);
}

}  // namespace fspohn::study
