#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "claimsim/rng.hpp"

namespace claimsim {

namespace law {
struct Constant {
  double value;
};
struct Exponential {
  double rate;
};
/// P(X > x) = (x / scale)^(-alpha) for x >= scale.
struct Pareto {
  double alpha;
  double scale;
};
struct LogNormal {
  double mu;
  double sigma;
};
struct Poisson {
  double mean;
};
/// Number of failures before the first success, support {0, 1, ...}.
struct Geometric {
  double p;
};
/// Total progeny of a Galton-Watson tree with Poisson(kappa) offspring.
struct Borel {
  double kappa;
};
}  // namespace law

using ScalarLaw = std::variant<law::Constant, law::Exponential, law::Pareto,
                               law::LogNormal, law::Poisson, law::Geometric,
                               law::Borel>;

/// Throws ErrorKind::ParameterDomain when the parameters are out of range.
void validate(const ScalarLaw& law);

double sample(const ScalarLaw& law, RngStream& rng);

/// Integer-valued draw: discrete laws sample exactly, continuous laws are
/// floored. Used wherever a law plays the role of a cluster size.
std::uint64_t sample_count(const ScalarLaw& law, RngStream& rng);

std::uint64_t sample_poisson(double mean, RngStream& rng);
double sample_normal(RngStream& rng);

/// Breadth-first branching until extinction; counts the root.
std::uint64_t sample_borel(double kappa, RngStream& rng,
                           std::uint64_t node_cap = 10'000'000);

/// Exact Borel pmf p_k = e^{-kappa k} (kappa k)^{k-1} / k!, k >= 1.
double borel_pmf(double kappa, std::uint64_t k);

bool is_discrete(const ScalarLaw& law);

/// E[X^order] for order 1 or 2; +inf when the moment diverges.
double moment(const ScalarLaw& law, int order);

/// Moments of sample_count(law): exact for discrete laws, via
/// E[K^r] = sum_k (k^r - (k-1)^r) P(X >= k) for floored continuous laws.
double count_moment(const ScalarLaw& law, int order);

/// True when E[X^order] < inf for real order > 0.
bool moment_exists(const ScalarLaw& law, double order);

/// P(X > x).
double survival(const ScalarLaw& law, double x);

/// Inverse cdf for continuous laws (u in (0,1)).
double quantile(const ScalarLaw& law, double u);

/// Regular-variation index of the tail, or nullopt for light tails.
std::optional<double> tail_index(const ScalarLaw& law);

/// Same family with its mean moved to `mean`; used by mark links.
ScalarLaw with_mean(const ScalarLaw& law, double mean);

/// Smallest point of the support.
double support_min(const ScalarLaw& law);

std::string to_string(const ScalarLaw& law);

}  // namespace claimsim
