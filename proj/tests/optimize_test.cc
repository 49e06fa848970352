#include "cascade/optimize.h"

#include <cmath>
#include <sstream>

#include "cascade/csv.h"
#include "gtest/gtest.h"

using namespace cascade;

TEST(Objective, penalizes_outside_domain) {
  EXPECT_EQ(objective_error(0, 20.0, -1.0, 0.5), 1.0);
  EXPECT_EQ(objective_error(0, 20.0, 1.0, 0.0), 1.0);
  EXPECT_EQ(objective_error(0, 20.0, 1.0, 1.0), 1.0);
  EXPECT_NEAR(objective_error(1, 20.0, 3.0, 0.4), error_rates_derivative({3.0, 0.4, 20.0, 1}).eps_avg, 1e-15);
}

TEST(MinimizeError, known_optima_at_snr_20) {
  const double expected[] = {0.065700, 0.025678, 0.013324, 0.008009, 0.005281};
  for (std::size_t n = 0; n <= 4; ++n) {
    const OptimizationResult r = minimize_error(n, 20.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.eps_opt, expected[n], 2e-6) << "N=" << n;
    EXPECT_NEAR(r.eps_opt, objective_error(n, 20.0, r.rho_opt, r.nu_opt), 1e-15);
  }
  const OptimizationResult r0 = minimize_error(0, 20.0);
  EXPECT_NEAR(r0.rho_opt, 4.48, 0.01);
  EXPECT_NEAR(r0.nu_opt, 0.447, 0.001);
}

TEST(MinimizeError, never_worse_than_chance_or_grid) {
  const OptimizerOptions opts;
  for (std::size_t n : {0u, 2u, 4u}) {
    for (double s : {0.5, 3.0, 50.0}) {
      const OptimizationResult r = minimize_error(n, s, opts);
      EXPECT_LE(r.eps_opt, 0.5);
      const double rho_hi = 1e2 * std::max(1.0, s / (n + 1.0));
      double grid_best = 1.0;
      for (std::size_t i = 0; i < opts.grid_rho; ++i) {
        const double rho = 1e-2 * std::pow(rho_hi / 1e-2, static_cast<double>(i) / (opts.grid_rho - 1));
        for (std::size_t j = 0; j < opts.grid_nu; ++j) {
          grid_best = std::min(grid_best, objective_error(n, s, rho, (j + 1.0) / (opts.grid_nu + 1.0)));
        }
      }
      EXPECT_LE(r.eps_opt, grid_best) << "N=" << n << " S=" << s;
    }
  }
}

TEST(MinimizeError, restarts_agree) {
  for (std::size_t n : {0u, 1u, 3u}) {
    const OptimizationResult best = minimize_error(n, 30.0);
    for (double factor : {0.5, 1.7, 3.0}) {
      const double nu = std::clamp(best.nu_opt * (0.6 + 0.2 * factor), 0.1, 0.9);
      const OptimizationResult r = refine_error(n, 30.0, best.rho_opt * factor, nu);
      EXPECT_NEAR(r.eps_opt, best.eps_opt, 1e-3 * best.eps_opt) << "N=" << n << " factor=" << factor;
    }
  }
}

TEST(MinimizeError, threshold_inside_unit_interval) {
  for (std::size_t n = 0; n <= 4; ++n) {
    for (double s : {5.0, 100.0, 1e4}) {
      const OptimizationResult r = minimize_error(n, s);
      EXPECT_GT(r.nu_opt, 0.0);
      EXPECT_LT(r.nu_opt, 1.0);
      EXPECT_GT(r.rho_opt, 0.0);
    }
  }
}

TEST(MinimizeError, leading_order_band_at_large_snr) {
  const double ratio = minimize_error(0, 1e4).eps_opt / asymptotic_error(0, 1e4);
  EXPECT_GT(ratio, 0.5);
  EXPECT_LT(ratio, 2.0);
}

TEST(MinimizeError, rejects_nonpositive_snr) {
  EXPECT_THROW(minimize_error(0, 0.0), std::invalid_argument);
}

TEST(AsymptoticTrend, approaches_leading_order) {
  for (std::size_t n : {0u, 1u}) {
    const auto ratios = asymptotic_trend(n, {1e2, 1e3, 1e4});
    ASSERT_EQ(ratios.size(), 3u);
    for (double r : ratios) EXPECT_GT(r, 0.0);
    EXPECT_LT(std::abs(ratios[1] - 1.0), std::abs(ratios[0] - 1.0));
    EXPECT_LT(std::abs(ratios[2] - 1.0), std::abs(ratios[1] - 1.0));
  }
  EXPECT_THROW(asymptotic_trend(0, {1e3, 1e2}), std::invalid_argument);
}

TEST(Fig3, small_sweep_is_ordered) {
  const Fig3Table table = sweep_fig3({10.0, 31.6, 100.0}, {0, 1, 2}, 2);
  ASSERT_EQ(table.rows.size(), 9u);
  EXPECT_TRUE(table.violations.empty());
  for (const auto& row : table.rows) EXPECT_TRUE(row.error.empty());
  std::stringstream buffer;
  write_fig3_csv(buffer, table);
  const CsvDocument doc = read_csv(buffer);
  EXPECT_EQ(doc.meta("kind"), "fig3");
  ASSERT_EQ(doc.rows.size(), 9u);
  EXPECT_EQ(doc.number(4, "eps"), table.rows[4].result.eps_opt);
  EXPECT_EQ(default_fig3_snr_grid().size(), 13u);
  EXPECT_DOUBLE_EQ(default_fig3_snr_grid().back(), 1000.0);
}

TEST(Fig5, small_sweep_rows) {
  Fig5Config cfg;
  cfg.n_max = 1;
  cfg.trials_per_state = 200;
  cfg.filter_time = 2.0;
  cfg.base_seed = 3;
  std::size_t callbacks = 0;
  cfg.progress = [&](const McRow&) { ++callbacks; };
  const auto rows = sweep_fig5(cfg);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(callbacks, 4u);
  EXPECT_EQ(rows[0].decision, "threshold");
  EXPECT_EQ(rows[1].decision, "filter");
  EXPECT_EQ(rows[2].decision, "analytic");
  EXPECT_EQ(rows[2].result.trials_per_state, 0u);
  EXPECT_NEAR(rows[2].result.rates.eps_avg, 0.065700, 2e-6);
  EXPECT_NEAR(rows[1].result.readout_time, 2.0, 1e-12);
  EXPECT_NE(rows[0].seed, rows[1].seed);
}

TEST(Fig6, small_sweep_rows) {
  Fig6Config cfg;
  cfg.ratios = {1.0, 3.0};
  cfg.mc.trials_per_state = 100;
  cfg.mc.readout_time = 2.0;
  cfg.reference_trials = 100;
  const auto rows = sweep_fig6(cfg);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].mode, "contrast");
  EXPECT_EQ(rows[2].mode, "rates");
  std::size_t references = 0;
  for (const auto& row : rows) {
    if (row.mode.rfind("reference-", 0) == 0) ++references;
    EXPECT_GT(row.result.trials_per_state, 0u);
  }
  EXPECT_EQ(references, 4u);
  std::stringstream buffer;
  write_fig6_csv(buffer, rows);
  const CsvDocument doc = read_csv(buffer);
  EXPECT_EQ(doc.meta("kind"), "fig6");
  EXPECT_EQ(doc.rows.size(), 8u);
  cfg.ratios = {-1.0};
  EXPECT_THROW(sweep_fig6(cfg), std::invalid_argument);
}
