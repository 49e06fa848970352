#include "cascade/simulate.h"

#include <algorithm>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cascade/csv.h"

namespace cascade {

namespace {

double fastest_dynamics(const CascadeModel& model) {
  return std::max(model.measurement_rate(), model.fastest_stage_rate());
}

}  // namespace

double max_bin_width(const CascadeModel& model) { return 1.0 / (10.0 * fastest_dynamics(model)); }

double default_bin_width(const CascadeModel& model) {
  return 1.0 / (20.0 * fastest_dynamics(model));
}

std::vector<double> sample_jump_times(const CascadeModel& model, PhiloxEngine& engine) {
  std::vector<double> times;
  times.reserve(model.stage_rates().size());
  double elapsed = 0.0;
  for (double rate : model.stage_rates()) {
    boost::random::exponential_distribution<double> increment(rate);
    elapsed += increment(engine);
    times.push_back(elapsed);
  }
  return times;
}

std::vector<double> sample_jump_times(const CascadeModel& model, const RngStream& stream) {
  PhiloxEngine engine = stream.engine();
  return sample_jump_times(model, engine);
}

Trajectory simulate_trajectory(const CascadeModel& model, QubitState initial, double t, double dt,
                               const RngStream& stream) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("readout time must be positive");
  if (!(dt > 0.0) || dt > t) throw std::invalid_argument("bin width must lie in (0, t]");
  const double coarsest = max_bin_width(model);
  if (dt > coarsest * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "bin width " << dt << " too coarse; must be <= " << coarsest;
    throw std::invalid_argument(msg.str());
  }

  const auto bins = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  Trajectory traj;
  traj.dt = t / static_cast<double>(bins);
  traj.initial_state = initial;
  traj.seed = stream.seed;
  traj.index = stream.index;
  traj.samples.resize(bins);

  PhiloxEngine engine = stream.engine();
  if (initial == QubitState::kPlus) traj.jump_times = sample_jump_times(model, engine);

  const auto& levels = model.levels();
  std::size_t state = initial == QubitState::kPlus ? 0 : levels.size() - 1;
  std::size_t next_jump = 0;
  const double noise_sd = 1.0 / std::sqrt(model.noise_inv_psd() * traj.dt);
  boost::random::normal_distribution<double> noise(0.0, noise_sd);

  for (std::size_t k = 0; k < bins; ++k) {
    const double start = traj.dt * static_cast<double>(k);
    const double end = (k + 1 == bins) ? t : traj.dt * static_cast<double>(k + 1);
    double mean = levels[state];
    if (next_jump < traj.jump_times.size() && traj.jump_times[next_jump] < end) {
      double integral = 0.0;
      double cursor = start;
      while (next_jump < traj.jump_times.size() && traj.jump_times[next_jump] < end) {
        const double jump = std::max(traj.jump_times[next_jump], start);
        integral += levels[state] * (jump - cursor);
        cursor = jump;
        ++state;
        ++next_jump;
      }
      integral += levels[state] * (end - cursor);
      mean = integral / (end - start);
    }
    traj.samples[k] = mean + noise(engine);
  }
  return traj;
}

double time_average(const Trajectory& trajectory) {
  if (trajectory.samples.empty()) throw std::invalid_argument("empty trajectory");
  double sum = 0.0;
  for (double sample : trajectory.samples) sum += sample;
  return sum / static_cast<double>(trajectory.samples.size());
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  CsvDocument doc;
  doc.set_meta("kind", "trajectory");
  doc.set_meta("seed", std::to_string(trajectory.seed));
  doc.set_meta("index", std::to_string(trajectory.index));
  doc.set_meta("state", to_string(trajectory.initial_state));
  doc.set_meta("dt", format_double(trajectory.dt));
  std::string jumps;
  for (std::size_t i = 0; i < trajectory.jump_times.size(); ++i) {
    if (i > 0) jumps += ' ';
    jumps += format_double(trajectory.jump_times[i]);
  }
  doc.set_meta("jump_times", jumps);
  doc.header = {"k", "t", "I_k"};
  doc.rows.reserve(trajectory.samples.size());
  for (std::size_t k = 0; k < trajectory.samples.size(); ++k) {
    doc.rows.push_back({std::to_string(k), format_double(trajectory.dt * static_cast<double>(k)),
                        format_double(trajectory.samples[k])});
  }
  write_csv(out, doc);
}

Trajectory read_trajectory_csv(std::istream& in) {
  const CsvDocument doc = read_csv(in);
  Trajectory traj;
  if (!doc.has_meta("dt")) throw CsvError("trajectory file lacks '# dt=' metadata");
  traj.dt = parse_double(doc.meta("dt"));
  if (doc.has_meta("seed")) traj.seed = std::stoull(doc.meta("seed"));
  if (doc.has_meta("index")) traj.index = std::stoull(doc.meta("index"));
  const std::string state = doc.meta("state");
  if (state == "minus") {
    traj.initial_state = QubitState::kMinus;
  } else if (state.empty() || state == "plus") {
    traj.initial_state = QubitState::kPlus;
  } else {
    throw CsvError("unknown state '" + state + "'");
  }
  std::istringstream jumps(doc.meta("jump_times"));
  std::string token;
  while (jumps >> token) traj.jump_times.push_back(parse_double(token));
  traj.samples.reserve(doc.rows.size());
  for (std::size_t row = 0; row < doc.rows.size(); ++row) {
    traj.samples.push_back(doc.number(row, "I_k"));
  }
  return traj;
}

}  // namespace cascade
