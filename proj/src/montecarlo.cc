#include "cascade/montecarlo.h"

#include <omp.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "cascade/csv.h"
#include "cascade/simulate.h"

namespace cascade {

namespace {

struct Prepared {
  double dt = 0.0;
};

Prepared prepare(const CascadeModel& model, const McConfig& cfg) {
  if (cfg.trials_per_state == 0) throw std::invalid_argument("trials_per_state must be >= 1");
  if (!(cfg.readout_time > 0.0) || !std::isfinite(cfg.readout_time)) {
    throw std::invalid_argument("readout time must be positive");
  }
  if (cfg.decision == Decision::kThreshold && !std::isfinite(cfg.threshold)) {
    throw std::invalid_argument("threshold must be finite");
  }
  if (cfg.threads < 0) throw std::invalid_argument("threads must be >= 0");
  Prepared p;
  p.dt = cfg.dt > 0.0 ? cfg.dt : std::min(default_bin_width(model), cfg.readout_time);
  return p;
}

// True when the trial is misidentified.
bool run_trial(const CascadeModel& model, const McConfig& cfg, double dt, std::size_t trial,
               QubitState state) {
  const Trajectory traj =
      simulate_trajectory(model, state, cfg.readout_time, dt, trial_stream(cfg.base_seed, trial, state));
  QubitState decided;
  if (cfg.decision == Decision::kThreshold) {
    decided = decide_threshold(time_average(traj), cfg.threshold);
  } else {
    decided = decide(run_filter(model, traj, cfg.filter));
  }
  return decided != state;
}

McResult finish(std::size_t errors_plus, std::size_t errors_minus, const McConfig& cfg, double dt,
                std::chrono::steady_clock::time_point start) {
  McResult out;
  out.errors_plus = errors_plus;
  out.errors_minus = errors_minus;
  out.trials_per_state = cfg.trials_per_state;
  out.readout_time = cfg.readout_time;
  const auto bins = static_cast<double>(std::ceil(cfg.readout_time / dt - 1e-9));
  out.dt = cfg.readout_time / bins;
  const double n = static_cast<double>(cfg.trials_per_state);
  const double se = combined_stderr(binomial_stderr(errors_plus, cfg.trials_per_state),
                                    binomial_stderr(errors_minus, cfg.trials_per_state));
  out.rates = ErrorRates::from_conditional(static_cast<double>(errors_plus) / n,
                                           static_cast<double>(errors_minus) / n, se);
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string describe_failure(const std::exception& e, std::size_t trial, QubitState state) {
  std::ostringstream msg;
  msg << "trial " << trial << " (" << to_string(state) << "): " << e.what();
  return msg.str();
}

}  // namespace

std::string to_string(Decision decision) {
  return decision == Decision::kThreshold ? "threshold" : "filter";
}

Decision parse_decision(const std::string& text) {
  if (text == "threshold") return Decision::kThreshold;
  if (text == "filter") return Decision::kFilter;
  throw std::invalid_argument("unknown decision '" + text + "' (expected threshold or filter)");
}

RngStream trial_stream(std::uint64_t base_seed, std::size_t trial, QubitState state) {
  return RngStream{base_seed, 2 * static_cast<std::uint64_t>(trial) +
                                  (state == QubitState::kMinus ? 1u : 0u)};
}

McResult estimate_error(const CascadeModel& model, const McConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Prepared p = prepare(model, cfg);
  const auto total = static_cast<long long>(2 * cfg.trials_per_state);
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

  std::size_t errors_plus = 0;
  std::size_t errors_minus = 0;
  std::atomic<bool> failed{false};
  long long failed_at = std::numeric_limits<long long>::max();
  std::string failure;

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads) \
    reduction(+ : errors_plus, errors_minus)
  for (long long k = 0; k < total; ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const auto trial = static_cast<std::size_t>(k / 2);
    const QubitState state = (k % 2 == 0) ? QubitState::kPlus : QubitState::kMinus;
    try {
      if (run_trial(model, cfg, p.dt, trial, state)) {
        if (state == QubitState::kPlus) {
          ++errors_plus;
        } else {
          ++errors_minus;
        }
      }
    } catch (const std::exception& e) {
#pragma omp critical(cascade_mc_failure)
      {
        if (k < failed_at) {
          failed_at = k;
          failure = describe_failure(e, trial, state);
        }
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failed.load()) {
    const auto trial = static_cast<std::size_t>(failed_at / 2);
    throw TrialError(failure, trial, failed_at % 2 == 0 ? QubitState::kPlus : QubitState::kMinus);
  }
  return finish(errors_plus, errors_minus, cfg, p.dt, start);
}

McResult estimate_error_serial(const CascadeModel& model, const McConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Prepared p = prepare(model, cfg);
  std::size_t errors_plus = 0;
  std::size_t errors_minus = 0;
  for (std::size_t trial = 0; trial < cfg.trials_per_state; ++trial) {
    for (QubitState state : {QubitState::kPlus, QubitState::kMinus}) {
      bool wrong = false;
      try {
        wrong = run_trial(model, cfg, p.dt, trial, state);
      } catch (const std::exception& e) {
        throw TrialError(describe_failure(e, trial, state), trial, state);
      }
      if (wrong) ++(state == QubitState::kPlus ? errors_plus : errors_minus);
    }
  }
  return finish(errors_plus, errors_minus, cfg, p.dt, start);
}

double binomial_stderr(std::size_t errors, std::size_t trials) {
  if (trials == 0) throw std::domain_error("binomial_stderr needs trials >= 1");
  if (errors > trials) throw std::domain_error("more errors than trials");
  const double n = static_cast<double>(trials);
  if (errors == 0 || errors == trials) return 0.5 / (n + 1.0);
  const double p = static_cast<double>(errors) / n;
  return std::sqrt(p * (1.0 - p) / n);
}

double combined_stderr(double stderr_plus, double stderr_minus) {
  return 0.5 * std::hypot(stderr_plus, stderr_minus);
}

PlateauResult plateau_check(const CascadeModel& model, const McConfig& cfg,
                            const std::vector<double>& horizons) {
  if (horizons.size() < 2) throw std::invalid_argument("plateau_check needs at least two horizons");
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    if (!(horizons[i] > horizons[i - 1])) {
      throw std::invalid_argument("plateau horizons must be strictly increasing");
    }
  }
  PlateauResult out;
  for (double t : horizons) {
    McConfig c = cfg;
    c.readout_time = t;
    out.results.push_back(estimate_error(model, c));
  }
  const ErrorRates& longest = out.results.back().rates;
  out.chosen_time = horizons.back();
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    const ErrorRates& r = out.results[i].rates;
    const double sigma = std::hypot(r.std_error, longest.std_error);
    if (std::abs(r.eps_avg - longest.eps_avg) <= sigma) {
      out.chosen_time = horizons[i];
      break;
    }
  }
  return out;
}

void write_mc_csv(std::ostream& out, const std::vector<McRow>& rows) {
  CsvDocument doc;
  doc.set_meta("kind", "montecarlo");
  doc.header = {"N", "S", "decision", "trials", "eps_plus", "eps_minus",
                "eps", "stderr", "seed", "t", "dt"};
  for (const McRow& row : rows) {
    const McResult& r = row.result;
    doc.rows.push_back({std::to_string(row.n_intermediate), format_double(row.snr), row.decision,
                        std::to_string(r.trials_per_state), format_double(r.rates.eps_plus),
                        format_double(r.rates.eps_minus), format_double(r.rates.eps_avg),
                        format_double(r.rates.std_error), std::to_string(row.seed),
                        format_double(r.readout_time), format_double(r.dt)});
  }
  write_csv(out, doc);
}

}  // namespace cascade
