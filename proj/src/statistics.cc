#include "cascade/statistics.h"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cascade/jet.h"
#include "cascade/quadrature.h"

namespace cascade {

namespace {

constexpr double kInvSqrtTwoPi = 0.3989422804014327;
constexpr double kPdfTolerance = 1e-10;
constexpr double kRateTolerance = 1e-9;
// Gaussian tails beyond this many sigma are below 1e-44 and are dropped.
constexpr double kTailSigmas = 14.0;

double gaussian(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return kInvSqrtTwoPi / sigma * std::exp(-0.5 * z * z);
}

void require_rho_positive(double rho) {
  if (!(rho > 0.0)) throw std::domain_error("outcome distribution undefined for rho <= 0");
}

// Closed-form eps_+ for direct relaxation as a jet in g = gamma/r.
//
// The product exp(E) [erf(A) - erf(B)] overflows/cancels when |A|, |B| are
// large. E - A^2 = -2 rho nu^2 and E - B^2 = -rho g - 2 rho (1-nu)^2, so with
// erfc(z) = exp(-z^2) erfcx(z) both same-sign branches are finite for every
// rho; in the mixed-sign branch E < 0 and the direct form is safe.
TaylorJet closed_form_eps_plus(const TaylorJet& g, double rho, double nu) {
  const std::size_t order = g.order();
  const double a = std::sqrt(2.0 * rho);
  const TaylorJet arg_a = a * (0.25 * g - nu);
  const TaylorJet arg_b = a * (0.25 * g + (1.0 - nu));
  const double log_weight_a = -2.0 * rho * nu * nu;
  TaylorJet log_weight_b = -rho * g;
  log_weight_b -= 2.0 * rho * (1.0 - nu) * (1.0 - nu);

  TaylorJet relaxation(order, 0.0);
  if (arg_a.value() >= 0.0) {
    relaxation = exp(log_weight_b) * erfcx(arg_b) - std::exp(log_weight_a) * erfcx(arg_a);
  } else if (arg_b.value() <= 0.0) {
    relaxation = std::exp(log_weight_a) * erfcx(-arg_a) - exp(log_weight_b) * erfcx(-arg_b);
  } else {
    TaylorJet exponent = rho * g * (0.125 * g - nu);
    relaxation = exp(exponent) * (erf(arg_a) - erf(arg_b));
  }
  TaylorJet eps = 0.5 * relaxation;
  eps += 0.5 * std::erfc(-nu * a);
  return eps;
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

double eps_minus_closed(double rho, double nu) { return 0.5 * std::erfc(nu * std::sqrt(2.0 * rho)); }

}  // namespace

double JumpTimeDistribution::pdf(double tau) const { return jump_pdf(*this, tau); }

double JumpTimeDistribution::cdf(double tau) const {
  if (tau <= 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(n_intermediate + 1), rate * tau);
}

double JumpTimeDistribution::survival(double tau) const {
  if (tau <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(n_intermediate + 1), rate * tau);
}

double JumpTimeDistribution::mean() const { return static_cast<double>(n_intermediate + 1) / rate; }

double JumpTimeDistribution::variance() const {
  return static_cast<double>(n_intermediate + 1) / (rate * rate);
}

double JumpTimeDistribution::mode() const { return static_cast<double>(n_intermediate) / rate; }

double jump_pdf(const JumpTimeDistribution& dist, double tau) {
  if (tau < 0.0) throw std::domain_error("jump time must be non-negative");
  if (!(dist.rate > 0.0)) throw std::domain_error("jump rate must be positive");
  const double n = static_cast<double>(dist.n_intermediate);
  if (tau == 0.0) return dist.n_intermediate == 0 ? dist.rate : 0.0;
  const double log_pdf =
      (n + 1.0) * std::log(dist.rate) + n * std::log(tau) - dist.rate * tau - std::lgamma(n + 1.0);
  return std::exp(log_pdf);
}

double jump_pdf_via_derivative(std::size_t n_intermediate, double gamma, double tau) {
  if (tau < 0.0) throw std::domain_error("jump time must be non-negative");
  if (!(gamma > 0.0)) throw std::domain_error("jump rate must be positive");
  // P_0/g = exp(-g tau). Forming g exp(-g tau) and dividing the jet by g
  // again cancels catastrophically for g tau << N.
  const TaylorJet rate = TaylorJet::variable(n_intermediate, gamma);
  const TaylorJet scaled = exp(-tau * rate);
  const double n = static_cast<double>(n_intermediate);
  const double sign = (n_intermediate % 2 == 0) ? 1.0 : -1.0;
  // c_N = (d^N/dg^N)/N!, so the 1/N! is already folded in.
  return sign * std::pow(gamma, n + 1.0) * scaled[n_intermediate];
}

double DimensionlessPoint::gamma_over_r() const {
  return static_cast<double>(n_intermediate + 1) / snr;
}

double DimensionlessPoint::outcome_sigma() const { return 0.5 / std::sqrt(rho); }

ErrorRates ErrorRates::from_conditional(double eps_plus, double eps_minus, double std_error) {
  ErrorRates out;
  out.eps_plus = eps_plus;
  out.eps_minus = eps_minus;
  out.eps_avg = 0.5 * (eps_plus + eps_minus);
  out.std_error = std_error;
  return out;
}

double outcome_pdf_minus(const DimensionlessPoint& point, double x) {
  require_rho_positive(point.rho);
  return gaussian(x, 0.0, point.outcome_sigma());
}

double outcome_pdf_plus(const DimensionlessPoint& point, double x) {
  return outcome_pdf_plus(point.n_intermediate, point.rho, point.gamma_over_r(), x);
}

double outcome_pdf_plus(std::size_t n_intermediate, double rho, double gamma_over_r, double x) {
  require_rho_positive(rho);
  if (gamma_over_r < 0.0) throw std::domain_error("negative relaxation rate");
  const double sigma = 0.5 / std::sqrt(rho);
  // u = tau/t is Gamma(N+1, kappa) distributed with kappa = gamma t.
  const double kappa = gamma_over_r * rho;
  const double n = static_cast<double>(n_intermediate);
  const JumpTimeDistribution scaled{n_intermediate, kappa};

  double jumped = 0.0;
  if (kappa > 0.0) {
    const double log_norm = (n + 1.0) * std::log(kappa) - std::lgamma(n + 1.0);
    auto integrand = [&](double u) {
      if (u <= 0.0) return n_intermediate == 0 ? kappa * gaussian(x, 0.0, sigma) : 0.0;
      const double log_density = log_norm + n * std::log(u) - kappa * u;
      return std::exp(log_density) * gaussian(x, u, sigma);
    };
    const std::vector<double> breaks{x - 8.0 * sigma, x, x + 8.0 * sigma, scaled.mode()};
    jumped = integrate(integrand, 0.0, 1.0, kPdfTolerance, breaks).value;
  }
  const double survivors = kappa > 0.0 ? scaled.survival(1.0) : 1.0;
  return jumped + survivors * gaussian(x, 1.0, sigma);
}

ErrorRates error_rates_closed_n0(const DimensionlessPoint& point, double gamma_over_r) {
  if (point.rho < 0.0) throw std::domain_error("rho must be non-negative");
  if (point.rho == 0.0) return ErrorRates::from_conditional(0.5, 0.5);
  const TaylorJet g(0, gamma_over_r);
  const double eps_plus = closed_form_eps_plus(g, point.rho, point.nu).value();
  return ErrorRates::from_conditional(clamp_probability(eps_plus),
                                      eps_minus_closed(point.rho, point.nu));
}

ErrorRates error_rates_derivative(const DimensionlessPoint& point) {
  if (point.rho < 0.0) throw std::domain_error("rho must be non-negative");
  if (!(point.snr > 0.0)) throw std::domain_error("snr must be positive");
  if (point.rho == 0.0) return ErrorRates::from_conditional(0.5, 0.5);
  const std::size_t order = point.n_intermediate;
  const double g0 = point.gamma_over_r();
  const TaylorJet g = TaylorJet::variable(order, g0);
  const TaylorJet scaled = closed_form_eps_plus(g, point.rho, point.nu) / g;
  const double sign = (order % 2 == 0) ? 1.0 : -1.0;
  const double eps_plus = sign * std::pow(g0, static_cast<double>(order) + 1.0) * scaled[order];
  return ErrorRates::from_conditional(clamp_probability(eps_plus),
                                      eps_minus_closed(point.rho, point.nu));
}

ErrorRates error_rates_quadrature(const DimensionlessPoint& point) {
  require_rho_positive(point.rho);
  if (!(point.snr > 0.0)) throw std::domain_error("snr must be positive");
  const double sigma = point.outcome_sigma();
  const double lower = -kTailSigmas * sigma;
  const double upper_plus = 1.0 + kTailSigmas * sigma;
  const double upper_minus = kTailSigmas * sigma;

  double eps_plus = 0.0;
  if (point.nu > lower) {
    const double top = std::min(point.nu, upper_plus);
    auto pdf = [&](double x) { return outcome_pdf_plus(point, x); };
    eps_plus = integrate(pdf, lower, top, kRateTolerance, {0.0, 0.5, 1.0}).value;
  }

  double eps_minus = 0.0;
  if (point.nu < upper_minus) {
    const double bottom = std::max(point.nu, lower);
    auto pdf = [&](double x) { return outcome_pdf_minus(point, x); };
    eps_minus = integrate(pdf, bottom, upper_minus, kRateTolerance, {0.0}).value;
  }
  return ErrorRates::from_conditional(clamp_probability(eps_plus), clamp_probability(eps_minus));
}

double asymptotic_error(std::size_t n_intermediate, double snr) {
  const double stages = static_cast<double>(n_intermediate + 1);
  if (!(snr / stages > 1.0)) throw std::domain_error("asymptotic formula needs S/(N+1) > 1");
  const double n = static_cast<double>(n_intermediate);
  const double log_arg = n * std::log(2.0) + std::lgamma(n + 1.0) + stages * std::log(snr / stages);
  const double inner = stages / snr * log_arg;
  return std::pow(inner, stages) / (2.0 * std::tgamma(stages + 1.0));
}

double heuristic_error_scale(std::size_t n_intermediate, double snr) {
  if (!(snr > 0.0)) throw std::domain_error("snr must be positive");
  const double stages = static_cast<double>(n_intermediate + 1);
  return std::pow(stages / snr, stages) / std::tgamma(stages + 1.0);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_pvalue(double d, std::size_t n) {
  if (n == 0) throw std::invalid_argument("KS p-value needs n >= 1");
  const double root = std::sqrt(static_cast<double>(n));
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace cascade
