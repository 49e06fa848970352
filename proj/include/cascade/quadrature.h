#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}
  double achieved() const { return achieved_; }
  double requested() const { return requested_; }

 private:
  double achieved_;
  double requested_;
};

// Globally adaptive 21-point Gauss-Kronrod integration of f over [a, b], split
// at every breakpoint strictly inside the interval. Throws QuadratureError
// when the summed error estimate exceeds abs_tol.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, const std::vector<double>& breakpoints = {});

}  // namespace cascade
