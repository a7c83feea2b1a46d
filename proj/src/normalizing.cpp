#include "claimsim/normalizing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "claimsim/error.hpp"

namespace claimsim {

double normalizing_a(const TailFunction& tail, double n, double lower) {
  require(n >= 1, ErrorKind::ParameterDomain, "normalizing_a: n must be >= 1");
  require(lower > 0 && std::isfinite(lower), ErrorKind::ParameterDomain,
          "normalizing_a: lower bracket must be positive");

  double lo = lower;
  if (n * tail(lo) < 1)
    fail(ErrorKind::NoSolution,
         "normalizing_a: n * tail(lower) < 1, solution lies below the bracket");

  // Two-point slope estimate; walk right while the tail is flat.
  double alpha_guess = 0;
  for (double x = lo; x < lo * 0x1p60; x *= 2) {
    const double t0 = tail(x), t1 = tail(2 * x);
    if (t1 <= 0) {
      alpha_guess = 1;  // tail vanishes here; any finite bracket works
      break;
    }
    if (t1 < t0) {
      alpha_guess = std::log(t0 / t1) / std::log(2.0);
      break;
    }
  }
  if (!(alpha_guess > 0))
    fail(ErrorKind::NoSolution, "normalizing_a: tail does not decrease on the probed range");

  double hi = lo * std::pow(10 * n, 2 / alpha_guess);
  for (int i = 0; n * tail(hi) >= 1; ++i) {
    if (i == 64 || !std::isfinite(hi))
      fail(ErrorKind::NoSolution, "normalizing_a: tail does not decrease to 0");
    hi *= 10 * n;
  }

  while (hi / lo - 1 > 1e-11) {
    const double mid = std::sqrt(lo * hi);
    if (n * tail(mid) >= 1) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

EmpiricalTail::EmpiricalTail(std::vector<double> sample) : sorted_(std::move(sample)) {
  require(!sorted_.empty(), ErrorKind::ParameterDomain, "EmpiricalTail: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalTail::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
}

double EmpiricalTail::quantile(double p) const {
  const auto n = sorted_.size();
  auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  idx = std::clamp<std::size_t>(idx, 1, n);
  return sorted_[idx - 1];
}

}  // namespace claimsim
