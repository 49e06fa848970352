#include "cascade/jet.h"

#include <cmath>
#include <stdexcept>

namespace cascade {

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955126;  // 2/sqrt(pi)
constexpr double kInvSqrtPi = 0.5641895835477563;

void check_orders(const TaylorJet& a, const TaylorJet& b) {
  if (a.order() != b.order()) throw std::invalid_argument("jet order mismatch");
}

// y' = w u'  =>  k y_k = sum_{j=1..k} j u_j w_{k-j}
void integrate_chain(const TaylorJet& u, const TaylorJet& w, TaylorJet& y) {
  for (std::size_t k = 1; k <= y.order(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * u[j] * w[k - j];
    y[k] = acc / static_cast<double>(k);
  }
}

}  // namespace

TaylorJet::TaylorJet(std::size_t order, double value) : coeffs_(order + 1, 0.0) {
  coeffs_[0] = value;
}

TaylorJet TaylorJet::variable(std::size_t order, double x0) {
  TaylorJet jet(order, x0);
  if (order >= 1) jet.coeffs_[1] = 1.0;
  return jet;
}

double TaylorJet::derivative(std::size_t k) const {
  return coeffs_.at(k) * std::tgamma(static_cast<double>(k) + 1.0);
}

TaylorJet& TaylorJet::operator+=(const TaylorJet& other) {
  check_orders(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

TaylorJet& TaylorJet::operator-=(const TaylorJet& other) {
  check_orders(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

TaylorJet& TaylorJet::operator+=(double scalar) {
  coeffs_[0] += scalar;
  return *this;
}

TaylorJet& TaylorJet::operator-=(double scalar) {
  coeffs_[0] -= scalar;
  return *this;
}

TaylorJet& TaylorJet::operator*=(double scalar) {
  for (double& c : coeffs_) c *= scalar;
  return *this;
}

TaylorJet TaylorJet::operator-() const {
  TaylorJet out = *this;
  out *= -1.0;
  return out;
}

TaylorJet operator+(TaylorJet lhs, const TaylorJet& rhs) { return lhs += rhs; }
TaylorJet operator-(TaylorJet lhs, const TaylorJet& rhs) { return lhs -= rhs; }
TaylorJet operator+(TaylorJet lhs, double rhs) { return lhs += rhs; }
TaylorJet operator+(double lhs, TaylorJet rhs) { return rhs += lhs; }
TaylorJet operator-(TaylorJet lhs, double rhs) { return lhs -= rhs; }
TaylorJet operator-(double lhs, const TaylorJet& rhs) { return (-rhs) += lhs; }
TaylorJet operator*(TaylorJet lhs, double rhs) { return lhs *= rhs; }
TaylorJet operator*(double lhs, TaylorJet rhs) { return rhs *= lhs; }

TaylorJet operator*(const TaylorJet& lhs, const TaylorJet& rhs) {
  check_orders(lhs, rhs);
  TaylorJet out(lhs.order(), 0.0);
  for (std::size_t k = 0; k <= lhs.order(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) acc += lhs[j] * rhs[k - j];
    out[k] = acc;
  }
  return out;
}

TaylorJet operator/(const TaylorJet& lhs, const TaylorJet& rhs) {
  check_orders(lhs, rhs);
  if (rhs.value() == 0.0) throw std::domain_error("jet division by zero");
  TaylorJet out(lhs.order(), 0.0);
  for (std::size_t k = 0; k <= lhs.order(); ++k) {
    double acc = lhs[k];
    for (std::size_t j = 1; j <= k; ++j) acc -= rhs[j] * out[k - j];
    out[k] = acc / rhs.value();
  }
  return out;
}

TaylorJet exp(const TaylorJet& u) {
  TaylorJet y(u.order(), std::exp(u.value()));
  // y' = y u'
  for (std::size_t k = 1; k <= y.order(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * u[j] * y[k - j];
    y[k] = acc / static_cast<double>(k);
  }
  return y;
}

TaylorJet erfc(const TaylorJet& u) {
  // erfc' = -(2/sqrt(pi)) exp(-u^2)
  TaylorJet kernel = exp(-(u * u));
  kernel *= -kTwoOverSqrtPi;
  TaylorJet y(u.order(), std::erfc(u.value()));
  integrate_chain(u, kernel, y);
  return y;
}

TaylorJet erf(const TaylorJet& u) {
  TaylorJet y = -erfc(u);
  y[0] = std::erf(u.value());
  return y;
}

TaylorJet erfcx(const TaylorJet& u) {
  // y' = (2 u y - 2/sqrt(pi)) u'; coefficient k of y only needs y_0..y_{k-1}.
  TaylorJet y(u.order(), erfcx(u.value()));
  const std::size_t order = u.order();
  std::vector<double> slope(order + 1, 0.0);
  for (std::size_t k = 1; k <= order; ++k) {
    const std::size_t m = k - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i <= m; ++i) acc += u[i] * y[m - i];
    slope[m] = 2.0 * acc - (m == 0 ? kTwoOverSqrtPi : 0.0);
    double sum = 0.0;
    for (std::size_t j = 1; j <= k; ++j) sum += static_cast<double>(j) * u[j] * slope[k - j];
    y[k] = sum / static_cast<double>(k);
  }
  return y;
}

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    // Grows like 2 exp(x^2); overflows to +inf for x < -26.6.
    const double hi = x * x;
    const double lo = std::fma(x, x, -hi);
    return 2.0 * std::exp(hi) * (1.0 + lo) - erfcx(-x);
  }
  if (x < 12.0) {
    const double hi = x * x;
    const double lo = std::fma(x, x, -hi);
    return std::exp(hi) * (1.0 + lo) * std::erfc(x);
  }
  // Asymptotic series 1/(x sqrt(pi)) sum (-1)^k (2k-1)!! / (2x^2)^k; the terms
  // keep shrinking well past double precision for x >= 12.
  const double inv_two_x2 = 0.5 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -static_cast<double>(2 * k - 1) * inv_two_x2;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return kInvSqrtPi * sum / x;
}

}  // namespace cascade
