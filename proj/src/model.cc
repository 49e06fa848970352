#include "cascade/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cascade {

std::string to_string(QubitState state) { return state == QubitState::kPlus ? "plus" : "minus"; }

std::string to_string(AsymmetryMode mode) {
  return mode == AsymmetryMode::kContrast ? "contrast" : "rates";
}

AsymmetryMode parse_asymmetry_mode(const std::string& text) {
  if (text == "contrast") return AsymmetryMode::kContrast;
  if (text == "rates") return AsymmetryMode::kRates;
  throw std::invalid_argument("unknown asymmetry mode '" + text + "'");
}

CascadeModel::CascadeModel(std::size_t n_intermediate, double gamma,
                           std::vector<double> stage_rates, std::vector<double> levels,
                           double noise_inv_psd)
    : n_intermediate_(n_intermediate),
      gamma_(gamma),
      stage_rates_(std::move(stage_rates)),
      levels_(std::move(levels)),
      noise_inv_psd_(noise_inv_psd) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
    throw std::invalid_argument("gamma must be positive and finite");
  }
  if (stage_rates_.size() != n_intermediate_ + 1) {
    throw std::invalid_argument("expected N+1 stage rates");
  }
  if (levels_.size() != n_intermediate_ + 2) {
    throw std::invalid_argument("expected N+2 signal levels");
  }
  for (double rate : stage_rates_) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("stage rates must be positive and finite");
    }
  }
  for (double level : levels_) {
    if (!std::isfinite(level)) throw std::invalid_argument("signal levels must be finite");
  }
  if (!(noise_inv_psd_ > 0.0) || !std::isfinite(noise_inv_psd_)) {
    throw std::invalid_argument("inverse noise power must be positive and finite");
  }
  // I+ >= I-; equality is only allowed for dark-first cascades whose
  // intermediate states carry the contrast.
  if (levels_.front() < levels_.back()) {
    throw std::invalid_argument("convention I+ > I- violated");
  }
  if (!(max_contrast() > 0.0)) {
    throw std::invalid_argument("cascade has no readout contrast");
  }
}

CascadeModel CascadeModel::symmetric(std::size_t n_intermediate, double gamma, double i_plus,
                                     double i_minus, double noise_inv_psd) {
  if (!(i_plus > i_minus)) throw std::invalid_argument("symmetric cascade needs I+ > I-");
  const double stage_rate = static_cast<double>(n_intermediate + 1) * gamma;
  std::vector<double> levels(n_intermediate + 2, i_plus);
  levels.back() = i_minus;
  return CascadeModel(n_intermediate, gamma, std::vector<double>(n_intermediate + 1, stage_rate),
                      std::move(levels), noise_inv_psd);
}

CascadeModel CascadeModel::symmetric(std::size_t n_intermediate, double snr) {
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
  return symmetric(n_intermediate, 1.0, 1.0, 0.0, 4.0 * snr);
}

double CascadeModel::stage_contrast(std::size_t stage) const {
  if (stage > n_intermediate_) throw std::out_of_range("stage index out of range");
  return levels_[stage] - levels_.back();
}

double CascadeModel::max_contrast() const {
  double best = 0.0;
  for (double level : levels_) best = std::max(best, std::abs(level - levels_.back()));
  return best;
}

double CascadeModel::measurement_rate() const {
  const double half = 0.5 * max_contrast();
  return noise_inv_psd_ * half * half;
}

double CascadeModel::fastest_stage_rate() const {
  return *std::max_element(stage_rates_.begin(), stage_rates_.end());
}

double CascadeModel::partial_snr(std::size_t stage) const {
  const double contrast = stage_contrast(stage);
  return noise_inv_psd_ * contrast * contrast / (4.0 * stage_rates_[stage]);
}

std::vector<double> CascadeModel::partial_snrs() const {
  std::vector<double> out(n_intermediate_ + 1);
  for (std::size_t i = 0; i <= n_intermediate_; ++i) out[i] = partial_snr(i);
  return out;
}

double CascadeModel::snr() const {
  const auto parts = partial_snrs();
  return std::accumulate(parts.begin(), parts.end(), 0.0);
}

double CascadeModel::mean_jump_time() const {
  double total = 0.0;
  for (double rate : stage_rates_) total += 1.0 / rate;
  return total;
}

bool CascadeModel::has_equal_stage_rates() const {
  return std::all_of(stage_rates_.begin(), stage_rates_.end(),
                     [&](double rate) { return rate == stage_rates_.front(); });
}

SquareMatrix rate_matrix(const CascadeModel& model) {
  const std::size_t n = model.num_states();
  SquareMatrix generator(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double rate = model.stage_rates()[i];
    generator(i, i) = -rate;
    generator(i + 1, i) = rate;
  }
  return generator;
}

double partial_snr(const CascadeModel& model, std::size_t stage) {
  return model.partial_snr(stage);
}

namespace {

std::vector<double> partial_snr_targets(std::size_t n_intermediate, double snr,
                                        const std::vector<double>& ratios) {
  if (ratios.empty()) throw std::invalid_argument("empty ratio list");
  if (ratios.size() != n_intermediate + 1) {
    throw std::invalid_argument("expected one ratio per stage (N+1)");
  }
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
  double total = 0.0;
  for (double ratio : ratios) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
      throw std::invalid_argument("asymmetry ratios must be positive and finite");
    }
    total += ratio;
  }
  std::vector<double> targets(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) targets[i] = snr * ratios[i] / total;
  return targets;
}

}  // namespace

CascadeModel asymmetric_model(std::size_t n_intermediate, double snr,
                              const std::vector<double>& ratios, AsymmetryMode mode) {
  const auto targets = partial_snr_targets(n_intermediate, snr, ratios);
  const double stages = static_cast<double>(n_intermediate + 1);
  const double noise_inv_psd = 4.0 * snr;
  std::vector<double> rates(n_intermediate + 1);
  std::vector<double> levels(n_intermediate + 2, 0.0);
  for (std::size_t i = 0; i <= n_intermediate; ++i) {
    if (mode == AsymmetryMode::kContrast) {
      rates[i] = stages;
      levels[i] = std::sqrt(stages * targets[i] / snr);
    } else {
      rates[i] = snr / targets[i];
      levels[i] = 1.0;
    }
  }
  return CascadeModel(n_intermediate, 1.0, std::move(rates), std::move(levels), noise_inv_psd);
}

CascadeModel fully_asymmetric_model(std::size_t n_intermediate, double snr, std::size_t stage,
                                    AsymmetryMode mode) {
  if (stage > n_intermediate) throw std::out_of_range("stage index out of range");
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");
  if (mode == AsymmetryMode::kRates) return CascadeModel::symmetric(0, snr);
  const double stages = static_cast<double>(n_intermediate + 1);
  std::vector<double> levels(n_intermediate + 2, 0.0);
  levels[stage] = std::sqrt(stages);
  return CascadeModel(n_intermediate, 1.0, std::vector<double>(n_intermediate + 1, stages),
                      std::move(levels), 4.0 * snr);
}

double NormalizedModel::snr() const {
  const auto parts = partial_snrs();
  return std::accumulate(parts.begin(), parts.end(), 0.0);
}

std::vector<double> NormalizedModel::partial_snrs() const {
  std::vector<double> out(stage_rates.size());
  for (std::size_t i = 0; i < stage_rates.size(); ++i) {
    const double contrast = levels[i] - levels.back();
    out[i] = noise_inv_psd * contrast * contrast / (4.0 * stage_rates[i]);
  }
  return out;
}

NormalizedModel normalize(const CascadeModel& model) {
  NormalizedModel out;
  out.n_intermediate = model.n_intermediate();
  const double contrast = model.max_contrast();
  const double gamma = model.gamma();
  out.stage_rates.reserve(model.stage_rates().size());
  for (double rate : model.stage_rates()) out.stage_rates.push_back(rate / gamma);
  out.levels.reserve(model.levels().size());
  for (double level : model.levels()) out.levels.push_back((level - model.i_minus()) / contrast);
  out.noise_inv_psd = model.noise_inv_psd() * contrast * contrast / gamma;
  return out;
}

CascadeModel denormalize(const NormalizedModel& normalized) {
  return CascadeModel(normalized.n_intermediate, 1.0, normalized.stage_rates, normalized.levels,
                      normalized.noise_inv_psd);
}

}  // namespace cascade
