#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cascade {

enum class QubitState { kPlus, kMinus };

std::string to_string(QubitState state);

// How an asymmetric cascade distributes the total SNR over its stages.
enum class AsymmetryMode {
  kContrast,  // equal stage rates, per-stage contrasts vary
  kRates,     // equal per-stage contrasts, stage rates vary
};

std::string to_string(AsymmetryMode mode);
AsymmetryMode parse_asymmetry_mode(const std::string& text);

// Dense square matrix, row-major. Only used for small (N+2)x(N+2) generators.
class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t size) : size_(size), data_(size * size, 0.0) {}

  std::size_t size() const { return size_; }
  double& operator()(std::size_t row, std::size_t col) { return data_[row * size_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * size_ + col]; }

 private:
  std::size_t size_;
  std::vector<double> data_;
};

// Sequential relaxation |+> = 0 -> 1 -> ... -> N -> N+1 = |-> monitored by a
// detector with Gaussian white noise of inverse power spectral density R.
//
// Stage i (0 <= i <= N) is the transition out of state i, with rate
// stage_rates[i]. The stage contrast is measured against the final level,
// levels[i] - levels[N+1], so that the partial SNRs sum to the SNR accumulated
// over the whole signal lifetime. For the symmetric cascade this sum equals
// R dI^2 / (4 Gamma).
class CascadeModel {
 public:
  CascadeModel(std::size_t n_intermediate, double gamma, std::vector<double> stage_rates,
               std::vector<double> levels, double noise_inv_psd);

  // Symmetric cascade in physical units: every stage has rate (N+1) gamma and
  // every state except |-> sits at i_plus.
  static CascadeModel symmetric(std::size_t n_intermediate, double gamma, double i_plus,
                                double i_minus, double noise_inv_psd);

  // Symmetric cascade in internal units (Gamma = 1, I- = 0, dI = 1, R = 4S).
  static CascadeModel symmetric(std::size_t n_intermediate, double snr);

  std::size_t n_intermediate() const { return n_intermediate_; }
  std::size_t num_states() const { return n_intermediate_ + 2; }
  double gamma() const { return gamma_; }
  const std::vector<double>& stage_rates() const { return stage_rates_; }
  const std::vector<double>& levels() const { return levels_; }
  double noise_inv_psd() const { return noise_inv_psd_; }

  double i_plus() const { return levels_.front(); }
  double i_minus() const { return levels_.back(); }
  double contrast() const { return levels_.front() - levels_.back(); }
  // levels[i] - levels[N+1]; throws std::out_of_range for i > N.
  double stage_contrast(std::size_t stage) const;
  // Largest |levels[i] - levels[N+1]|; equals contrast() for monotone cascades.
  double max_contrast() const;

  // r = R (dI/2)^2 using max_contrast().
  double measurement_rate() const;
  double fastest_stage_rate() const;

  double partial_snr(std::size_t stage) const;
  std::vector<double> partial_snrs() const;
  // Sum of partial SNRs.
  double snr() const;
  // Sum of 1/stage_rates.
  double mean_jump_time() const;
  bool has_equal_stage_rates() const;

 private:
  std::size_t n_intermediate_;
  double gamma_;
  std::vector<double> stage_rates_;
  std::vector<double> levels_;
  double noise_inv_psd_;
};

// Generator of the cascade in state order; column i carries -rate_i on the
// diagonal and +rate_i just below it, the absorbing last column is zero.
SquareMatrix rate_matrix(const CascadeModel& model);

double partial_snr(const CascadeModel& model, std::size_t stage);

// Builds a cascade with partial SNRs proportional to `ratios` and summing to
// `snr`, in internal units (Gamma = 1, I- = 0, R = 4 snr).
//  - kContrast: stage rates (N+1), stage contrasts sqrt((N+1) S_i / S).
//  - kRates:    stage contrasts 1, stage rates S / S_i.
// Both reduce to CascadeModel::symmetric for equal ratios. The mean jump time
// stays 1 in both modes.
CascadeModel asymmetric_model(std::size_t n_intermediate, double snr,
                              const std::vector<double>& ratios, AsymmetryMode mode);

// Limit of asymmetric_model when stage `stage` carries the whole SNR.
// In contrast mode the other stages become dark (zero contrast). In rates mode
// the other stages become instantaneous and are dropped, leaving the N = 0
// cascade.
CascadeModel fully_asymmetric_model(std::size_t n_intermediate, double snr, std::size_t stage,
                                    AsymmetryMode mode);

// Dimensionless description: time in units of 1/Gamma, signals relative to I-
// in units of max_contrast().
struct NormalizedModel {
  std::size_t n_intermediate = 0;
  std::vector<double> stage_rates;  // Gamma_N^(i) / Gamma
  std::vector<double> levels;       // (I_i - I-) / dI
  double noise_inv_psd = 0.0;       // R dI^2 / Gamma

  double snr() const;
  std::vector<double> partial_snrs() const;
};

NormalizedModel normalize(const CascadeModel& model);

// Internal-unit model (Gamma = 1, I- = 0, dI = 1).
CascadeModel denormalize(const NormalizedModel& normalized);

}  // namespace cascade
