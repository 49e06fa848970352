#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cascade/model.h"
#include "cascade/montecarlo.h"

namespace cascade {

struct OptimizationResult {
  double rho_opt = 0.0;
  double nu_opt = 0.5;
  double eps_opt = 0.5;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct OptimizerOptions {
  std::size_t grid_rho = 25;
  std::size_t grid_nu = 19;  // nu = 0.05, 0.10, ..., 0.95
  std::size_t max_evaluations = 4000;
  // Simplex size in (log rho, nu) at which Nelder-Mead stops.
  double simplex_tolerance = 1e-8;
};

// Average analytic error of the symmetric cascade at (rho, nu); 1 outside
// rho > 0, 0 < nu < 1 so that the simplex is pushed back inside.
double objective_error(std::size_t n_intermediate, double snr, double rho, double nu);

// Log-spaced grid over rho in [1e-2, 1e2 max(1, S/(N+1))] times a nu grid,
// then Nelder-Mead in (log rho, nu) from the best cell.
OptimizationResult minimize_error(std::size_t n_intermediate, double snr,
                                  const OptimizerOptions& options = {});

// Nelder-Mead only, from a given start.
OptimizationResult refine_error(std::size_t n_intermediate, double snr, double rho_start,
                                double nu_start, const OptimizerOptions& options = {});

struct Fig3Row {
  std::size_t n_intermediate = 0;
  double snr = 0.0;
  OptimizationResult result;
  std::string error;  // empty unless the row failed
};

struct Fig3Table {
  std::vector<Fig3Row> rows;
  // Human-readable monotonicity violations: in S for fixed N, and in N at
  // fixed S >= 10.
  std::vector<std::string> violations;
};

// 10^(k/4), k = 0..12.
std::vector<double> default_fig3_snr_grid();

Fig3Table sweep_fig3(const std::vector<double>& snr_values,
                     const std::vector<std::size_t>& n_values, int threads = 0);

// CSV N,S,rho_opt,nu_opt,eps.
void write_fig3_csv(std::ostream& out, const Fig3Table& table);

// eps*(S) / asymptotic_error(N, S) for each S.
std::vector<double> asymptotic_trend(std::size_t n_intermediate, const std::vector<double>& snr_values);

struct Fig5Config {
  double snr = 20.0;
  std::size_t n_max = 4;
  std::size_t trials_per_state = 50000;
  double filter_time = 5.0;
  std::uint64_t base_seed = 0;
  int threads = 0;
  std::function<void(const McRow&)> progress;  // called after each Monte Carlo row
};

// Per N: threshold Monte Carlo at the analytic optimum, optimal-filter Monte
// Carlo over filter_time, and the analytic optimum itself (trials 0).
std::vector<McRow> sweep_fig5(const Fig5Config& config);

struct Fig6Row {
  std::string mode;  // contrast, rates, or reference-{symmetric,contrast,rates}
  double ratio = 1.0;  // S^(0)/S^(1); 0 and inf for the fully asymmetric limits
  std::uint64_t seed = 0;
  McResult result;
};

struct Fig6Config {
  std::size_t n_intermediate = 1;
  double snr = 20.0;
  std::vector<double> ratios{0.1, 1.0 / 3.0, 1.0, 3.0, 10.0};
  std::vector<AsymmetryMode> modes{AsymmetryMode::kContrast, AsymmetryMode::kRates};
  McConfig mc;  // decision is forced to the filter
  std::size_t reference_trials = 100000;
  bool include_references = true;
  std::function<void(const Fig6Row&)> progress;  // called after each row
};

// Ratio r means partial SNRs proportional to (r, 1, ..., 1).
std::vector<Fig6Row> sweep_fig6(const Fig6Config& config);

// CSV mode,ratio,eps,stderr,trials,seed.
void write_fig6_csv(std::ostream& out, const std::vector<Fig6Row>& rows);

}  // namespace cascade
