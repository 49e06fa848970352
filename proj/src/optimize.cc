#include "cascade/optimize.h"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cascade/csv.h"
#include "cascade/rng.h"
#include "cascade/statistics.h"

namespace cascade {

namespace {

constexpr double kRhoMin = 1e-2;
constexpr double kPenalty = 1.0;

struct ObjectiveData {
  std::size_t n_intermediate;
  double snr;
  std::size_t evaluations = 0;
};

double gsl_objective(const gsl_vector* x, void* params) {
  auto* data = static_cast<ObjectiveData*>(params);
  ++data->evaluations;
  const double rho = std::exp(gsl_vector_get(x, 0));
  const double nu = gsl_vector_get(x, 1);
  return objective_error(data->n_intermediate, data->snr, rho, nu);
}

void validate(std::size_t /*n_intermediate*/, double snr) {
  if (!(snr > 0.0) || !std::isfinite(snr)) throw std::invalid_argument("snr must be positive");
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

double objective_error(std::size_t n_intermediate, double snr, double rho, double nu) {
  if (!(rho > 0.0) || !std::isfinite(rho) || !(nu > 0.0) || !(nu < 1.0)) return kPenalty;
  try {
    const double eps = error_rates_derivative({rho, nu, snr, n_intermediate}).eps_avg;
    return std::isfinite(eps) ? eps : kPenalty;
  } catch (const std::exception&) {
    return kPenalty;
  }
}

OptimizationResult refine_error(std::size_t n_intermediate, double snr, double rho_start,
                                double nu_start, const OptimizerOptions& options) {
  validate(n_intermediate, snr);
  if (!(rho_start > 0.0) || !(nu_start > 0.0) || !(nu_start < 1.0)) {
    throw std::invalid_argument("start point must have rho > 0 and 0 < nu < 1");
  }
  gsl_set_error_handler_off();
  ObjectiveData data{n_intermediate, snr};
  gsl_multimin_function fn{&gsl_objective, 2, &data};

  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(2));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(2));
  gsl_vector_set(x.get(), 0, std::log(rho_start));
  gsl_vector_set(x.get(), 1, nu_start);
  gsl_vector_set(step.get(), 0, 0.3);
  gsl_vector_set(step.get(), 1, std::min({0.05, 0.5 * nu_start, 0.5 * (1.0 - nu_start)}));

  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> minimizer(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2));
  gsl_multimin_fminimizer_set(minimizer.get(), &fn, x.get(), step.get());

  OptimizationResult out;
  while (data.evaluations < options.max_evaluations) {
    if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(minimizer.get());
    if (gsl_multimin_test_size(size, options.simplex_tolerance) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(minimizer.get());
  out.rho_opt = std::exp(gsl_vector_get(best, 0));
  out.nu_opt = gsl_vector_get(best, 1);
  out.eps_opt = gsl_multimin_fminimizer_minimum(minimizer.get());
  out.evaluations = data.evaluations;
  return out;
}

OptimizationResult minimize_error(std::size_t n_intermediate, double snr,
                                  const OptimizerOptions& options) {
  validate(n_intermediate, snr);
  if (options.grid_rho < 2 || options.grid_nu < 1) throw std::invalid_argument("grid too small");
  const double rho_max = 1e2 * std::max(1.0, snr / static_cast<double>(n_intermediate + 1));
  const double log_lo = std::log(kRhoMin);
  const double log_hi = std::log(rho_max);

  double best_eps = std::numeric_limits<double>::infinity();
  double best_rho = kRhoMin;
  double best_nu = 0.5;
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i < options.grid_rho; ++i) {
    const double rho = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                             static_cast<double>(options.grid_rho - 1));
    for (std::size_t j = 0; j < options.grid_nu; ++j) {
      const double nu = static_cast<double>(j + 1) / static_cast<double>(options.grid_nu + 1);
      const double eps = objective_error(n_intermediate, snr, rho, nu);
      ++evaluations;
      if (eps < best_eps) {
        best_eps = eps;
        best_rho = rho;
        best_nu = nu;
      }
    }
  }
  OptimizationResult out = refine_error(n_intermediate, snr, best_rho, best_nu, options);
  out.evaluations += evaluations;
  if (!(out.eps_opt <= best_eps)) {
    out.rho_opt = best_rho;
    out.nu_opt = best_nu;
    out.eps_opt = best_eps;
  }
  return out;
}

std::vector<double> default_fig3_snr_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(std::pow(10.0, k / 4.0));
  return grid;
}

Fig3Table sweep_fig3(const std::vector<double>& snr_values, const std::vector<std::size_t>& n_values,
                     int threads) {
  if (snr_values.empty() || n_values.empty()) throw std::invalid_argument("empty sweep grid");
  Fig3Table table;
  for (std::size_t n : n_values) {
    for (double s : snr_values) table.rows.push_back({n, s, {}, {}});
  }
  const auto count = static_cast<long long>(table.rows.size());
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long k = 0; k < count; ++k) {
    Fig3Row& row = table.rows[static_cast<std::size_t>(k)];
    try {
      row.result = minimize_error(row.n_intermediate, row.snr);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  auto eps_of = [&](std::size_t n, double s) -> const Fig3Row* {
    for (const Fig3Row& row : table.rows) {
      if (row.n_intermediate == n && row.snr == s && row.error.empty()) return &row;
    }
    return nullptr;
  };
  std::vector<double> sorted_s = snr_values;
  std::sort(sorted_s.begin(), sorted_s.end());
  std::vector<std::size_t> sorted_n = n_values;
  std::sort(sorted_n.begin(), sorted_n.end());
  for (std::size_t n : sorted_n) {
    for (std::size_t i = 1; i < sorted_s.size(); ++i) {
      const Fig3Row* lo = eps_of(n, sorted_s[i - 1]);
      const Fig3Row* hi = eps_of(n, sorted_s[i]);
      if (lo && hi && !(hi->result.eps_opt < lo->result.eps_opt)) {
        std::ostringstream msg;
        msg << "N=" << n << ": eps not decreasing from S=" << sorted_s[i - 1] << " to S=" << sorted_s[i];
        table.violations.push_back(msg.str());
      }
    }
  }
  for (double s : sorted_s) {
    if (s < 10.0) continue;
    for (std::size_t i = 1; i < sorted_n.size(); ++i) {
      const Fig3Row* lo = eps_of(sorted_n[i - 1], s);
      const Fig3Row* hi = eps_of(sorted_n[i], s);
      if (lo && hi && !(hi->result.eps_opt < lo->result.eps_opt)) {
        std::ostringstream msg;
        msg << "S=" << s << ": eps not decreasing from N=" << sorted_n[i - 1] << " to N=" << sorted_n[i];
        table.violations.push_back(msg.str());
      }
    }
  }
  for (const Fig3Row& row : table.rows) {
    if (!row.error.empty()) {
      std::ostringstream msg;
      msg << "N=" << row.n_intermediate << ", S=" << row.snr << " failed: " << row.error;
      table.violations.push_back(msg.str());
    }
  }
  return table;
}

void write_fig3_csv(std::ostream& out, const Fig3Table& table) {
  CsvDocument doc;
  doc.set_meta("kind", "fig3");
  doc.header = {"N", "S", "rho_opt", "nu_opt", "eps"};
  for (const Fig3Row& row : table.rows) {
    const bool ok = row.error.empty();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    doc.rows.push_back({std::to_string(row.n_intermediate), format_double(row.snr),
                        format_double(ok ? row.result.rho_opt : nan),
                        format_double(ok ? row.result.nu_opt : nan),
                        format_double(ok ? row.result.eps_opt : nan)});
  }
  write_csv(out, doc);
}

std::vector<double> asymptotic_trend(std::size_t n_intermediate, const std::vector<double>& snr_values) {
  std::vector<double> ratios;
  ratios.reserve(snr_values.size());
  for (std::size_t i = 0; i < snr_values.size(); ++i) {
    if (i > 0 && !(snr_values[i] > snr_values[i - 1])) {
      throw std::invalid_argument("snr values must be increasing");
    }
    const double eps = minimize_error(n_intermediate, snr_values[i]).eps_opt;
    ratios.push_back(eps / asymptotic_error(n_intermediate, snr_values[i]));
  }
  return ratios;
}

std::vector<McRow> sweep_fig5(const Fig5Config& config) {
  std::vector<McRow> rows;
  for (std::size_t n = 0; n <= config.n_max; ++n) {
    const CascadeModel model = CascadeModel::symmetric(n, config.snr);
    const OptimizationResult opt = minimize_error(n, config.snr);
    const double t_opt = opt.rho_opt / model.measurement_rate();

    McConfig threshold;
    threshold.trials_per_state = config.trials_per_state;
    threshold.readout_time = t_opt;
    threshold.decision = Decision::kThreshold;
    threshold.threshold = model.i_minus() + opt.nu_opt * model.contrast();
    threshold.base_seed = mix_seed(config.base_seed + 2 * n);
    threshold.threads = config.threads;
    rows.push_back({n, config.snr, "threshold", threshold.base_seed, estimate_error(model, threshold)});
    if (config.progress) config.progress(rows.back());

    McConfig filter = threshold;
    filter.readout_time = config.filter_time;
    filter.decision = Decision::kFilter;
    filter.base_seed = mix_seed(config.base_seed + 2 * n + 1);
    rows.push_back({n, config.snr, "filter", filter.base_seed, estimate_error(model, filter)});
    if (config.progress) config.progress(rows.back());

    McRow analytic{n, config.snr, "analytic", 0, {}};
    const ErrorRates rates = error_rates_derivative({opt.rho_opt, opt.nu_opt, config.snr, n});
    analytic.result.rates = rates;
    analytic.result.readout_time = t_opt;
    rows.push_back(analytic);
  }
  return rows;
}

std::vector<Fig6Row> sweep_fig6(const Fig6Config& config) {
  const std::size_t n = config.n_intermediate;
  if (n == 0) throw std::invalid_argument("asymmetry sweep needs N >= 1");
  for (double r : config.ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("ratios must be positive");
  }
  McConfig mc = config.mc;
  mc.decision = Decision::kFilter;
  mc.dt = 0.0;

  struct Job {
    std::string mode;
    double ratio;
    CascadeModel model;
    std::size_t trials;
  };
  std::vector<Job> jobs;
  for (AsymmetryMode mode : config.modes) {
    for (double r : config.ratios) {
      std::vector<double> ratios(n + 1, 1.0);
      ratios[0] = r;
      jobs.push_back({to_string(mode), r, asymmetric_model(n, config.snr, ratios, mode),
                      mc.trials_per_state});
    }
  }
  if (config.include_references) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t trials = config.reference_trials;
    jobs.push_back({"reference-symmetric", 1.0, CascadeModel::symmetric(n, config.snr), trials});
    for (AsymmetryMode mode : config.modes) {
      const std::string name = "reference-" + to_string(mode);
      if (mode == AsymmetryMode::kContrast) {
        jobs.push_back({name, 0.0, fully_asymmetric_model(n, config.snr, n, mode), trials});
      }
      jobs.push_back({name, inf, fully_asymmetric_model(n, config.snr, 0, mode), trials});
    }
  }

  std::vector<Fig6Row> rows;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    McConfig c = mc;
    c.trials_per_state = jobs[i].trials;
    c.base_seed = mix_seed(config.mc.base_seed + i);
    rows.push_back({jobs[i].mode, jobs[i].ratio, c.base_seed, estimate_error(jobs[i].model, c)});
    if (config.progress) config.progress(rows.back());
  }
  return rows;
}

void write_fig6_csv(std::ostream& out, const std::vector<Fig6Row>& rows) {
  CsvDocument doc;
  doc.set_meta("kind", "fig6");
  doc.header = {"mode", "ratio", "eps", "stderr", "trials", "seed"};
  for (const Fig6Row& row : rows) {
    doc.rows.push_back({row.mode, format_double(row.ratio), format_double(row.result.rates.eps_avg),
                        format_double(row.result.rates.std_error),
                        std::to_string(row.result.trials_per_state), std::to_string(row.seed)});
  }
  write_csv(out, doc);
}

}  // namespace cascade
