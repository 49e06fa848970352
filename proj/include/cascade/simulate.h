#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cascade/model.h"
#include "cascade/rng.h"

namespace cascade {

// One bin-averaged detector record.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> samples;
  QubitState initial_state = QubitState::kPlus;
  // Cumulative stage transition times; diagnostics only, may exceed duration().
  std::vector<double> jump_times;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  double duration() const { return dt * static_cast<double>(samples.size()); }
};

// Coarsest accepted bin width, 1/(10 max(r, fastest stage rate)).
double max_bin_width(const CascadeModel& model);
// 1/(20 max(r, fastest stage rate)).
double default_bin_width(const CascadeModel& model);

// Cumulative transition times through all N+1 stages, each increment
// exponential with its stage rate.
std::vector<double> sample_jump_times(const CascadeModel& model, PhiloxEngine& engine);
std::vector<double> sample_jump_times(const CascadeModel& model, const RngStream& stream);

// Simulates a record of length t. The bin width is shrunk to t/ceil(t/dt) so
// that the bins tile [0, t] exactly. Jump times are drawn continuously and
// each bin holds the time-weighted mean level plus Gaussian noise of variance
// 1/(R dt). Throws std::invalid_argument for dt coarser than max_bin_width.
Trajectory simulate_trajectory(const CascadeModel& model, QubitState initial, double t, double dt,
                               const RngStream& stream);

// Mean of the samples, i.e. (1/t) * integral of I(t') dt'.
double time_average(const Trajectory& trajectory);

// CSV with header k,t,I_k; t is the start time of bin k.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace cascade
