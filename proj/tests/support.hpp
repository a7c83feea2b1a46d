#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "claimsim/rng.hpp"
#include "claimsim/stats.hpp"

namespace testing {

struct Estimate {
  double mean;
  double se;
};

inline Estimate estimate(const std::vector<double>& x) {
  return {claimsim::mean(x), claimsim::standard_error(x)};
}

/// |estimate - target| <= k standard errors.
inline bool within_se(const Estimate& e, double target, double k = 3.0) {
  return std::abs(e.mean - target) <= k * e.se;
}

inline std::vector<double> draws(std::size_t n, std::uint64_t seed,
                                 const std::function<double(claimsim::RngStream&)>& f) {
  claimsim::RngStream rng(seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) v = f(rng);
  return out;
}

}  // namespace testing
