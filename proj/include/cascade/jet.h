#pragma once

#include <cstddef>
#include <vector>

namespace cascade {

// Truncated Taylor series in one variable: coefficient k holds f^(k)(x0)/k!.
// All jets taking part in one expression must share the same order.
class TaylorJet {
 public:
  TaylorJet(std::size_t order, double value);

  // The independent variable x = x0 + h.
  static TaylorJet variable(std::size_t order, double x0);

  std::size_t order() const { return coeffs_.size() - 1; }
  double value() const { return coeffs_.front(); }
  double operator[](std::size_t k) const { return coeffs_[k]; }
  double& operator[](std::size_t k) { return coeffs_[k]; }
  // k-th derivative at x0.
  double derivative(std::size_t k) const;

  TaylorJet& operator+=(const TaylorJet& other);
  TaylorJet& operator-=(const TaylorJet& other);
  TaylorJet& operator+=(double scalar);
  TaylorJet& operator-=(double scalar);
  TaylorJet& operator*=(double scalar);
  TaylorJet operator-() const;

 private:
  std::vector<double> coeffs_;
};

TaylorJet operator+(TaylorJet lhs, const TaylorJet& rhs);
TaylorJet operator-(TaylorJet lhs, const TaylorJet& rhs);
TaylorJet operator+(TaylorJet lhs, double rhs);
TaylorJet operator+(double lhs, TaylorJet rhs);
TaylorJet operator-(TaylorJet lhs, double rhs);
TaylorJet operator-(double lhs, const TaylorJet& rhs);
TaylorJet operator*(TaylorJet lhs, double rhs);
TaylorJet operator*(double lhs, TaylorJet rhs);
TaylorJet operator*(const TaylorJet& lhs, const TaylorJet& rhs);
TaylorJet operator/(const TaylorJet& lhs, const TaylorJet& rhs);

TaylorJet exp(const TaylorJet& u);
TaylorJet erf(const TaylorJet& u);
TaylorJet erfc(const TaylorJet& u);
// exp(u^2) erfc(u)
TaylorJet erfcx(const TaylorJet& u);

// exp(x^2) erfc(x) for scalars, accurate for large positive x.
double erfcx(double x);

}  // namespace cascade
