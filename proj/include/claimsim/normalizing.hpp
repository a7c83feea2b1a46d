#pragma once

#include <functional>
#include <span>
#include <vector>

namespace claimsim {

using TailFunction = std::function<double(double)>;

/// Solves n * tail(a) = 1 by log-space bisection to relative precision 1e-10.
///
/// `lower` is the left end of the search bracket and must satisfy
/// n * tail(lower) >= 1 (typically the bottom of the support). The right end
/// is x_lo (10 n)^(2 / alpha_guess) with alpha_guess read off a two-point
/// slope of the tail, widened if needed. Throws NoSolution when the tail does
/// not decrease to zero on the probed range.
double normalizing_a(const TailFunction& tail, double n, double lower = 1.0);

/// Right-continuous empirical survival function x -> #{i : y_i > x} / N.
class EmpiricalTail {
 public:
  explicit EmpiricalTail(std::vector<double> sample);

  double operator()(double x) const;
  double quantile(double p) const;
  std::span<const double> sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

}  // namespace claimsim
