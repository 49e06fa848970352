#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cascade/filter.h"
#include "cascade/model.h"
#include "cascade/statistics.h"

namespace cascade {

enum class Decision { kThreshold, kFilter };

std::string to_string(Decision decision);
Decision parse_decision(const std::string& text);

struct McConfig {
  std::size_t trials_per_state = 1000;
  double readout_time = 5.0;
  double dt = 0.0;  // 0 selects default_bin_width(model)
  Decision decision = Decision::kFilter;
  double threshold = 0.5;  // signal units, threshold decision only
  std::uint64_t base_seed = 0;
  FilterOptions filter;
  int threads = 0;  // 0 uses the OpenMP default
};

struct McResult {
  ErrorRates rates;
  std::size_t errors_plus = 0;
  std::size_t errors_minus = 0;
  std::size_t trials_per_state = 0;
  double readout_time = 0.0;
  double dt = 0.0;  // bin width actually simulated
  double elapsed_seconds = 0.0;
};

// Raised when a trial fails; carries the failing trial's index and state.
class TrialError : public std::runtime_error {
 public:
  TrialError(const std::string& what, std::size_t trial, QubitState state)
      : std::runtime_error(what), trial_(trial), state_(state) {}
  std::size_t trial() const { return trial_; }
  QubitState state() const { return state_; }

 private:
  std::size_t trial_;
  QubitState state_;
};

// Stream used for trial `trial` started in `state`.
RngStream trial_stream(std::uint64_t base_seed, std::size_t trial, QubitState state);

// Trials sharded across OpenMP threads. Counts depend only on (model, cfg).
McResult estimate_error(const CascadeModel& model, const McConfig& cfg);

// Single-threaded reference with the same per-trial streams.
McResult estimate_error_serial(const CascadeModel& model, const McConfig& cfg);

// sqrt(p(1-p)/n). For 0 or n errors, where that is 0, returns the z = 1
// Wilson half-width 1/(2(n+1)) instead.
double binomial_stderr(std::size_t errors, std::size_t trials);

// Standard error of (eps_+ + eps_-)/2 from the two conditional ones.
double combined_stderr(double stderr_plus, double stderr_minus);

struct PlateauResult {
  double chosen_time = 0.0;
  std::vector<McResult> results;  // one per horizon, same order
};

// Smallest horizon whose estimate is within one combined sigma of the
// longest horizon's estimate. Horizons must be increasing, at least two.
PlateauResult plateau_check(const CascadeModel& model, const McConfig& cfg,
                            const std::vector<double>& horizons);

struct McRow {
  std::size_t n_intermediate = 0;
  double snr = 0.0;
  std::string decision;
  std::uint64_t seed = 0;
  McResult result;
};

// CSV N,S,decision,trials,eps_plus,eps_minus,eps,stderr,seed,t,dt.
void write_mc_csv(std::ostream& out, const std::vector<McRow>& rows);

}  // namespace cascade
