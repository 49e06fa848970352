#include "cascade/filter.h"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cascade/csv.h"
#include "cascade/rng.h"

namespace cascade {

namespace {

constexpr std::uint64_t kBridgeSalt = 0x6272696467650001ull;

[[noreturn]] void fail_non_finite(const char* where, double value) {
  std::ostringstream msg;
  msg << "filter weights became non-finite in " << where << " (max weight " << value << ")";
  throw std::runtime_error(msg.str());
}

// Power-of-two rescaling: exact, and cheaper than dividing by the max.
void rescale(std::vector<double>& weights, double& log_offset, const char* where) {
  double largest = 0.0;
  for (double w : weights) largest = std::max(largest, std::abs(w));
  if (!(largest > 0.0) || !std::isfinite(largest)) fail_non_finite(where, largest);
  int exponent = 0;
  std::frexp(largest, &exponent);
  for (double& w : weights) w = std::ldexp(w, -exponent);
  log_offset += exponent * std::numbers::ln2;
}

double log_sum(const std::vector<double>& weights, double log_offset) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    std::ostringstream msg;
    msg << "likelihood weights sum to non-positive value " << total;
    throw std::runtime_error(msg.str());
  }
  return std::log(total) + log_offset;
}

// out = L in for the bidiagonal cascade generator.
void apply_generator(const std::vector<double>& rates, const std::vector<double>& in,
                     std::vector<double>& out) {
  const std::size_t n = in.size();
  out[0] = -rates[0] * in[0];
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = rates[i - 1] * in[i - 1] - rates[i] * in[i];
  out[n - 1] = rates[n - 2] * in[n - 2];
}

}  // namespace

LikelihoodFilter::LikelihoodFilter(const CascadeModel& model, double initial_scale)
    : rates_(model.stage_rates()),
      levels_(model.levels()),
      noise_inv_psd_(model.noise_inv_psd()) {
  if (!(initial_scale > 0.0) || !std::isfinite(initial_scale)) {
    throw std::invalid_argument("initial weight scale must be positive");
  }
  const std::size_t n = model.num_states();
  diagonal_.assign(n, 0.0);
  k1_.assign(n, 0.0);
  k2_.assign(n, 0.0);
  k3_.assign(n, 0.0);
  k4_.assign(n, 0.0);
  tmp_.assign(n, 0.0);
  plus_.weights.assign(n, 0.0);
  minus_.weights.assign(n, 0.0);
  plus_.weights.front() = initial_scale;
  minus_.weights.back() = initial_scale;
  renormalize(plus_);
  renormalize(minus_);
}

void LikelihoodFilter::renormalize(Hypothesis& h) { rescale(h.weights, h.log_offset, "rk4 step"); }

void LikelihoodFilter::rk4_step(Hypothesis& h, double step) {
  auto derivative = [&](const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t n = in.size();
    out[0] = diagonal_[0] * in[0];
    for (std::size_t i = 1; i < n; ++i) out[i] = diagonal_[i] * in[i] + rates_[i - 1] * in[i - 1];
  };
  const std::size_t n = h.weights.size();
  derivative(h.weights, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = h.weights[i] + 0.5 * step * k1_[i];
  derivative(tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = h.weights[i] + 0.5 * step * k2_[i];
  derivative(tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = h.weights[i] + step * k3_[i];
  derivative(tmp_, k4_);
  const double sixth = step / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    h.weights[i] += sixth * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }
}

void LikelihoodFilter::step(double signal, double dt, std::size_t substeps,
                            double max_step_exponent) {
  const std::size_t n = levels_.size();
  double stiffest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double leave = i + 1 < n ? rates_[i] : 0.0;
    diagonal_[i] = -leave + noise_inv_psd_ * (signal - 0.5 * levels_[i]) * levels_[i];
    stiffest = std::max(stiffest, std::abs(diagonal_[i]));
  }
  if (substeps == 0) {
    if (!(max_step_exponent > 0.0)) throw std::invalid_argument("max_step_exponent must be positive");
    const double needed = std::ceil(stiffest * dt / max_step_exponent);
    if (!std::isfinite(needed)) fail_non_finite("step size selection", stiffest);
    substeps = std::max<std::size_t>(1, static_cast<std::size_t>(needed));
  }
  const double h = dt / static_cast<double>(substeps);
  for (std::size_t s = 0; s < substeps; ++s) {
    rk4_step(plus_, h);
    rk4_step(minus_, h);
    renormalize(plus_);
    renormalize(minus_);
  }
}

double LikelihoodFilter::log_likelihood(QubitState hypothesis) const {
  const Hypothesis& h = hypothesis == QubitState::kPlus ? plus_ : minus_;
  return log_sum(h.weights, h.log_offset);
}

double LikelihoodFilter::log_likelihood_ratio() const {
  return log_likelihood(QubitState::kPlus) - log_likelihood(QubitState::kMinus);
}

std::vector<double> LikelihoodFilter::log_weights(QubitState hypothesis) const {
  const Hypothesis& h = hypothesis == QubitState::kPlus ? plus_ : minus_;
  std::vector<double> out(h.weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = h.weights[i] > 0.0 ? std::log(h.weights[i]) + h.log_offset
                                : -std::numeric_limits<double>::infinity();
  }
  return out;
}

double run_filter(const CascadeModel& model, const Trajectory& trajectory,
                  const FilterOptions& options) {
  if (trajectory.samples.empty()) return 0.0;
  LikelihoodFilter filter(model);
  for (double sample : trajectory.samples) {
    filter.step(sample, trajectory.dt, options.rk4_substeps, options.max_step_exponent);
  }
  return filter.log_likelihood_ratio();
}

std::vector<FilterTracePoint> run_filter_trace(const CascadeModel& model,
                                               const Trajectory& trajectory,
                                               const FilterOptions& options) {
  std::vector<FilterTracePoint> trace;
  trace.reserve(trajectory.samples.size());
  LikelihoodFilter filter(model);
  for (double sample : trajectory.samples) {
    filter.step(sample, trajectory.dt, options.rk4_substeps, options.max_step_exponent);
    const double plus = filter.log_likelihood(QubitState::kPlus);
    const double minus = filter.log_likelihood(QubitState::kMinus);
    trace.push_back({plus, minus, plus - minus});
  }
  return trace;
}

void write_filter_trace_csv(std::ostream& out, const std::vector<FilterTracePoint>& trace) {
  CsvDocument doc;
  doc.set_meta("kind", "filter_trace");
  doc.header = {"k", "logL_plus", "logL_minus", "logLambda"};
  for (std::size_t k = 0; k < trace.size(); ++k) {
    doc.rows.push_back({std::to_string(k), format_double(trace[k].log_likelihood_plus),
                        format_double(trace[k].log_likelihood_minus),
                        format_double(trace[k].log_likelihood_ratio)});
  }
  write_csv(out, doc);
}

double euler_ito_reference(const CascadeModel& model, const Trajectory& trajectory,
                           std::size_t substeps) {
  if (substeps == 0) throw std::invalid_argument("substeps must be >= 1");
  if (trajectory.samples.empty()) return 0.0;
  const auto& rates = model.stage_rates();
  const auto& levels = model.levels();
  const double noise_inv_psd = model.noise_inv_psd();
  const std::size_t n = levels.size();
  const double h = trajectory.dt / static_cast<double>(substeps);

  std::vector<double> plus(n, 0.0), minus(n, 0.0), drift(n, 0.0), bridge(substeps, 0.0);
  plus.front() = 1.0;
  minus.back() = 1.0;
  double offset_plus = 0.0;
  double offset_minus = 0.0;

  PhiloxEngine engine = RngStream{mix_seed(trajectory.seed ^ kBridgeSalt), trajectory.index}.engine();
  boost::random::normal_distribution<double> increment(0.0, std::sqrt(h / noise_inv_psd));

  auto euler = [&](std::vector<double>& weights, double observed) {
    apply_generator(rates, weights, drift);
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] += h * drift[i] + noise_inv_psd * levels[i] * weights[i] * observed;
    }
  };

  for (double sample : trajectory.samples) {
    double mean = 0.0;
    for (double& b : bridge) {
      b = increment(engine);
      mean += b;
    }
    mean /= static_cast<double>(substeps);
    for (std::size_t j = 0; j < substeps; ++j) {
      // With one substep the bridge collapses to the bin total.
      const double observed = sample * h + (bridge[j] - mean);
      euler(plus, observed);
      euler(minus, observed);
    }
    rescale(plus, offset_plus, "euler reference");
    rescale(minus, offset_minus, "euler reference");
  }
  return log_sum(plus, offset_plus) - log_sum(minus, offset_minus);
}

double formal_euler_filter(const CascadeModel& model, const Trajectory& trajectory) {
  if (trajectory.samples.empty()) return 0.0;
  const auto& rates = model.stage_rates();
  const auto& levels = model.levels();
  const double noise_inv_psd = model.noise_inv_psd();
  const std::size_t n = levels.size();
  std::vector<double> plus(n, 0.0), minus(n, 0.0), drift(n, 0.0);
  plus.front() = 1.0;
  minus.back() = 1.0;
  double offset_plus = 0.0;
  double offset_minus = 0.0;
  const double dt = trajectory.dt;
  auto euler = [&](std::vector<double>& weights, double signal) {
    apply_generator(rates, weights, drift);
    for (std::size_t i = 0; i < n; ++i) {
      const double gain = noise_inv_psd * (signal - 0.5 * levels[i]) * levels[i];
      weights[i] += dt * (drift[i] + gain * weights[i]);
    }
  };
  for (double sample : trajectory.samples) {
    euler(plus, sample);
    euler(minus, sample);
    rescale(plus, offset_plus, "formal euler");
    rescale(minus, offset_minus, "formal euler");
  }
  return log_sum(plus, offset_plus) - log_sum(minus, offset_minus);
}

QubitState decide(double log_likelihood_ratio) {
  if (std::isnan(log_likelihood_ratio)) throw std::invalid_argument("log likelihood ratio is NaN");
  return log_likelihood_ratio > 0.0 ? QubitState::kPlus : QubitState::kMinus;
}

QubitState decide_threshold(double mean_signal, double threshold) {
  if (std::isnan(mean_signal) || std::isnan(threshold)) {
    throw std::invalid_argument("threshold decision on NaN input");
  }
  return mean_signal > threshold ? QubitState::kPlus : QubitState::kMinus;
}

}  // namespace cascade
