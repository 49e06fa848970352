#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cascade {

// Total time to cross N+1 sequential stages of equal rate: Gamma(N+1, rate).
struct JumpTimeDistribution {
  std::size_t n_intermediate = 0;
  double rate = 1.0;  // per-stage rate Gamma_N

  double pdf(double tau) const;
  double cdf(double tau) const;
  double survival(double tau) const;
  double mean() const;
  double variance() const;
  double mode() const;
};

double jump_pdf(const JumpTimeDistribution& dist, double tau);

// Same density obtained from the exponential one through
//   P_N = (-1)^N g^(N+1) / N! d^N/dg^N [P_0 / g],
// with the derivative taken by Taylor-jet arithmetic.
double jump_pdf_via_derivative(std::size_t n_intermediate, double gamma, double tau);

// Time-averaged readout in dimensionless form. Units: Gamma = 1, r = S,
// per-stage rate N+1; rho = r t; nu = (I_th - I-)/dI; outcomes are reported as
// x = (Ibar - I-)/dI.
struct DimensionlessPoint {
  double rho = 0.0;
  double nu = 0.5;
  double snr = 1.0;
  std::size_t n_intermediate = 0;

  // gamma / r = (N+1)/S for the symmetric cascade.
  double gamma_over_r() const;
  // Standard deviation 1/(2 sqrt(rho)) of the averaged outcome.
  double outcome_sigma() const;
};

struct ErrorRates {
  double eps_plus = 0.5;
  double eps_minus = 0.5;
  double eps_avg = 0.5;
  double std_error = 0.0;  // 0 for analytic results

  static ErrorRates from_conditional(double eps_plus, double eps_minus, double std_error = 0.0);
};

double outcome_pdf_minus(const DimensionlessPoint& point, double x);

// P(x|+): relaxation at tau < t drags the mean to tau/t; the survivors keep
// mean 1. Integrated over tau by adaptive quadrature (absolute target 1e-10).
double outcome_pdf_plus(const DimensionlessPoint& point, double x);

// Same, with an explicit per-stage rate gamma/r instead of (N+1)/S.
double outcome_pdf_plus(std::size_t n_intermediate, double rho, double gamma_over_r, double x);

// Closed-form conditional error rates for direct relaxation (N = 0) at
// per-stage rate gamma/r. rho = 0 gives chance level.
ErrorRates error_rates_closed_n0(const DimensionlessPoint& point, double gamma_over_r);

// Error rates of the N-stage cascade as N-th gamma-derivatives of the N = 0
// closed form, evaluated with order-N Taylor jets at gamma/r = (N+1)/S.
ErrorRates error_rates_derivative(const DimensionlessPoint& point);

// Independent route: threshold integrals of the outcome densities by nested
// quadrature. Requires rho > 0.
ErrorRates error_rates_quadrature(const DimensionlessPoint& point);

// Leading-order error as S -> infinity:
//   1/(2 (N+1)!) { (N+1)/S ln[2^N N! (S/(N+1))^(N+1)] }^(N+1).
// Requires S/(N+1) > 1.
double asymptotic_error(std::size_t n_intermediate, double snr);

// Order-of-magnitude scale [(N+1)/S]^(N+1) / (N+1)!. Not calibrated: the true
// error carries an unknown prefactor and log corrections.
double heuristic_error_scale(std::size_t n_intermediate, double snr);

// One-sample Kolmogorov-Smirnov distance sup|F_n - F|. Sorts a copy.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic p-value Q(lambda) with the small-sample correction
// lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) d.
double kolmogorov_pvalue(double d, std::size_t n);

}  // namespace cascade
