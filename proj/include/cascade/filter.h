#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "cascade/model.h"
#include "cascade/simulate.h"

namespace cascade {

struct FilterOptions {
  // Classical RK4 steps per trajectory bin. 0 picks the count per bin so that
  // every step has |diagonal entry| * h <= max_step_exponent.
  std::size_t rk4_substeps = 0;
  double max_step_exponent = 0.25;
};

// Unnormalized likelihood weights for both start hypotheses, propagated by
//   dl/dt = [L + (I(t) - I/2) I R] l
// with I = diag(levels). Weights are kept as mantissa vectors rescaled by
// exact powers of two after every step (max entry in [1/2, 1)) plus an
// accumulated log offset, so they stay finite for arbitrarily long records.
class LikelihoodFilter {
 public:
  // Starts from scale * e_0 (|+>) and scale * e_{N+1} (|->).
  explicit LikelihoodFilter(const CascadeModel& model, double initial_scale = 1.0);

  // Advances by one bin of width dt with the signal held at `signal`, using
  // `substeps` RK4 steps (0 = automatic, see FilterOptions).
  void step(double signal, double dt, std::size_t substeps = 1, double max_step_exponent = 0.25);

  double log_likelihood(QubitState hypothesis) const;
  double log_likelihood_ratio() const;
  std::vector<double> log_weights(QubitState hypothesis) const;

 private:
  struct Hypothesis {
    std::vector<double> weights;
    double log_offset = 0.0;
  };

  void rk4_step(Hypothesis& h, double step);
  static void renormalize(Hypothesis& h);

  std::vector<double> rates_;
  std::vector<double> levels_;
  double noise_inv_psd_;
  std::vector<double> diagonal_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
  Hypothesis plus_;
  Hypothesis minus_;
};

// log Lambda for a record, RK4 with the signal held at its bin value.
// An empty record gives 0.
double run_filter(const CascadeModel& model, const Trajectory& trajectory,
                  const FilterOptions& options = {});

struct FilterTracePoint {
  double log_likelihood_plus;
  double log_likelihood_minus;
  double log_likelihood_ratio;
};

std::vector<FilterTracePoint> run_filter_trace(const CascadeModel& model,
                                               const Trajectory& trajectory,
                                               const FilterOptions& options = {});

// CSV k,logL_plus,logL_minus,logLambda.
void write_filter_trace_csv(std::ostream& out, const std::vector<FilterTracePoint>& trace);

// Euler-Maruyama integration of the Ito form dl = [L dt + R I dY] l. Each bin
// is split into `substeps` pieces whose observation increments are a Brownian
// bridge pinned to the bin total I_k dt. The bridge noise is drawn from a
// stream derived from the trajectory's seed and index.
double euler_ito_reference(const CascadeModel& model, const Trajectory& trajectory,
                           std::size_t substeps);

// Plain Euler on the formal (Stratonovich-type) ODE. Its first-order increment
// differs from the Ito one; kept only to demonstrate that it must not be used.
double formal_euler_filter(const CascadeModel& model, const Trajectory& trajectory);

// Maximum-likelihood decision; ties go to |->. Throws on NaN.
QubitState decide(double log_likelihood_ratio);

// Ibar > threshold -> |+>, otherwise |->. Throws on NaN.
QubitState decide_threshold(double mean_signal, double threshold);

}  // namespace cascade
