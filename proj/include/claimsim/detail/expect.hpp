#pragma once

#include <cmath>
#include <type_traits>

#include <boost/math/quadrature/gauss.hpp>

#include "claimsim/laws.hpp"

namespace claimsim {

template <class F>
double expect(const ScalarLaw& law, F&& g) {
  if (const auto* c = std::get_if<law::Constant>(&law)) return g(c->value);
  if (is_discrete(law)) {
    // Walk the support with the pmf recursion until the remaining mass is
    // negligible.
    double sum = 0, mass = 0;
    if (const auto* p = std::get_if<law::Poisson>(&law)) {
      double pk = std::exp(-p->mean);
      for (double k = 0; k < 1e7; k += 1) {
        sum += pk * g(k);
        mass += pk;
        if (k > p->mean && 1 - mass < 1e-16) break;
        pk *= p->mean / (k + 1);
      }
      return sum;
    }
    if (const auto* q = std::get_if<law::Geometric>(&law)) {
      double pk = q->p;
      for (double k = 0; k < 1e7; k += 1) {
        sum += pk * g(k);
        mass += pk;
        if (1 - mass < 1e-16) break;
        pk *= 1 - q->p;
      }
      return sum;
    }
    const auto& b = std::get<law::Borel>(law);
    for (std::uint64_t k = 1; k < 10'000'000; ++k) {
      const double pk = borel_pmf(b.kappa, k);
      sum += pk * g(static_cast<double>(k));
      mass += pk;
      if (1 - mass < 1e-15) break;
    }
    return sum;
  }
  // Dyadic panels [1 - 2^-k, 1 - 2^-(k+1)] in the quantile variable.
  using boost::math::quadrature::gauss;
  auto h = [&](double u) { return g(quantile(law, u)); };
  double total = 0, lo = 0;
  for (int k = 0; k < 52; ++k) {
    const double hi = 1 - std::ldexp(1.0, -(k + 1));
    total += gauss<double, 128>::integrate(h, lo, hi);
    lo = hi;
  }
  return total;
}

}  // namespace claimsim
