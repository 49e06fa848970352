#include "cascade/quadrature.h"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <sstream>

namespace cascade {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

constexpr std::size_t kMaxSegments = 4000;
// Refine until the summed estimate is this fraction of the requested tolerance.
constexpr double kSafety = 1e-2;

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

// One 21-point Gauss-Kronrod panel. Boost reports |K - G| for the rule mapped
// to [-1, 1]; scale it back to the panel width.
Segment panel(const std::function<double(double)>& f, double a, double b) {
  double error = 0.0;
  const double value = Rule::integrate(f, a, b, 0, 0.0, &error);
  return {a, b, value, error * 0.5 * (b - a)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, const std::vector<double>& breakpoints) {
  if (!(a <= b)) throw std::invalid_argument("integration bounds out of order");
  std::vector<double> edges{a};
  for (double p : breakpoints) {
    if (p > a && p < b) edges.push_back(p);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // Global adaptive bisection: always split the panel with the largest error.
  std::priority_queue<Segment> queue;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Segment s = panel(f, edges[i], edges[i + 1]);
    value += s.value;
    error += s.error;
    queue.push(s);
  }
  const double min_width = 1e-14 * std::max(1.0, std::abs(b - a));
  std::vector<Segment> frozen;
  while (!queue.empty() && error > kSafety * abs_tol && queue.size() + frozen.size() < kMaxSegments) {
    const Segment worst = queue.top();
    queue.pop();
    if (worst.b - worst.a < min_width) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = panel(f, worst.a, mid);
    const Segment right = panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (; !queue.empty(); queue.pop()) {
    value += queue.top().value;
    error += queue.top().error;
  }
  for (const Segment& s : frozen) {
    value += s.value;
    error += s.error;
  }
  if (!std::isfinite(value) || error > abs_tol) {
    std::ostringstream msg;
    msg << "quadrature tolerance not met on [" << a << ", " << b << "]: achieved " << error
        << ", requested " << abs_tol;
    throw QuadratureError(msg.str(), error, abs_tol);
  }
  return {value, error};
}

}  // namespace cascade
