#pragma once

// Independent likelihood-ratio oracle for bin-averaged records: integrates
// the Gaussian bin likelihood over the jump times by Gauss-Legendre
// quadrature on every bin. Handles cascades with N <= 1.

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cascade/model.h"
#include "cascade/simulate.h"

namespace cascade::oracle {

class BinLikelihood {
 public:
  BinLikelihood(const CascadeModel& model, const Trajectory& traj)
      : levels_(model.levels()),
        samples_(traj.samples),
        dt_(traj.dt),
        bins_(traj.samples.size()),
        weight_(0.5 * model.noise_inv_psd() * traj.dt) {
    prefix_.assign(levels_.size(), std::vector<double>(bins_ + 1, 0.0));
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      for (std::size_t k = 0; k < bins_; ++k) {
        const double d = samples_[k] - levels_[l];
        prefix_[l][k + 1] = prefix_[l][k] + d * d;
      }
    }
  }

  double duration() const { return dt_ * static_cast<double>(bins_); }
  std::size_t bins() const { return bins_; }
  double dt() const { return dt_; }

  // Log-likelihood (up to a common constant) of a signal that starts at
  // level `first` and steps to the next level at each of `times` (sorted,
  // all inside the record).
  double log_like(std::size_t first, const std::vector<double>& times) const {
    const std::size_t m = times.size();
    std::vector<std::size_t> jump_bin(m);
    for (std::size_t i = 0; i < m; ++i) jump_bin[i] = bin_of(times[i]);
    double sum = 0.0;
    for (std::size_t s = 0; s <= m; ++s) {
      const long lo = s == 0 ? 0 : static_cast<long>(jump_bin[s - 1]) + 1;
      const long hi = s == m ? static_cast<long>(bins_) - 1 : static_cast<long>(jump_bin[s]) - 1;
      if (lo <= hi) sum += prefix_[first + s][hi + 1] - prefix_[first + s][lo];
    }
    std::size_t prev = bins_;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = jump_bin[i];
      if (k == prev) continue;
      prev = k;
      const double start = dt_ * static_cast<double>(k);
      const double end = start + dt_;
      double integral = 0.0;
      double cursor = start;
      std::size_t level = first;
      for (std::size_t j = 0; j < m; ++j) {
        if (times[j] <= start) {
          level = first + j + 1;
          continue;
        }
        if (times[j] >= end) break;
        integral += levels_[level] * (times[j] - cursor);
        cursor = times[j];
        level = first + j + 1;
      }
      integral += levels_[level] * (end - cursor);
      const double d = samples_[k] - integral / dt_;
      sum += d * d;
    }
    return -weight_ * sum;
  }

 private:
  std::size_t bin_of(double t) const {
    const auto k = static_cast<std::size_t>(std::floor(t / dt_));
    return std::min(k, bins_ - 1);
  }

  std::vector<double> levels_;
  std::vector<double> samples_;
  double dt_;
  std::size_t bins_;
  double weight_;
  std::vector<std::vector<double>> prefix_;
};

using Gauss = boost::math::quadrature::gauss<double, 10>;

// log P(record|+) - log P(record|-) for a direct (N = 0) relaxation.
inline double oracle_log_ratio_n0(const CascadeModel& model, const Trajectory& traj) {
  if (model.n_intermediate() != 0) throw std::invalid_argument("oracle expects N = 0");
  const BinLikelihood like(model, traj);
  const double rate = model.stage_rates()[0];
  const double t_end = like.duration();
  const double minus = like.log_like(1, {});
  const double survive = like.log_like(0, {});
  const double shift = std::max(minus, survive);
  double total = std::exp(-rate * t_end + survive - shift);
  for (std::size_t k = 0; k < like.bins(); ++k) {
    const double a = like.dt() * static_cast<double>(k);
    total += Gauss::integrate(
        [&](double tau) { return rate * std::exp(-rate * tau + like.log_like(0, {tau}) - shift); },
        a, a + like.dt());
  }
  return std::log(total) + shift - minus;
}

// Same for a two-stage (N = 1) cascade with arbitrary levels and rates.
inline double oracle_log_ratio_n1(const CascadeModel& model, const Trajectory& traj) {
  if (model.n_intermediate() != 1) throw std::invalid_argument("oracle expects N = 1");
  const BinLikelihood like(model, traj);
  const double r0 = model.stage_rates()[0];
  const double r1 = model.stage_rates()[1];
  const double t_end = like.duration();
  const double dt = like.dt();
  const double minus = like.log_like(2, {});
  const double survive = like.log_like(0, {});
  const double shift = std::max(minus, survive);

  auto after_first = [&](double t0) {
    // Second jump inside the record, then the no-second-jump tail.
    double inner = std::exp(-r1 * (t_end - t0) + like.log_like(0, {t0}) - shift);
    auto f = [&](double t1) { return r1 * std::exp(-r1 * (t1 - t0) + like.log_like(0, {t0, t1}) - shift); };
    const auto first_bin = static_cast<std::size_t>(std::min(std::floor(t0 / dt), double(like.bins() - 1)));
    const double edge = dt * static_cast<double>(first_bin + 1);
    if (edge > t0) inner += Gauss::integrate(f, t0, edge);
    for (std::size_t k = first_bin + 1; k < like.bins(); ++k) {
      const double a = dt * static_cast<double>(k);
      inner += Gauss::integrate(f, a, a + dt);
    }
    return r0 * std::exp(-r0 * t0) * inner;
  };

  double total = std::exp(-r0 * t_end + survive - shift);
  for (std::size_t k = 0; k < like.bins(); ++k) {
    const double a = dt * static_cast<double>(k);
    total += Gauss::integrate(after_first, a, a + dt);
  }
  return std::log(total) + shift - minus;
}

}  // namespace cascade::oracle
