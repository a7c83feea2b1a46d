#pragma once

#include "claimsim/rng.hpp"

namespace claimsim {

/// alpha-stable law in the S1 (Samorodnitsky-Taqqu) parameterization, with
/// one exception: for alpha < 1 and beta = 1 the unit scale is the positive
/// stable law with Laplace transform E exp(-lambda G) = exp(-Gamma(1-alpha)
/// lambda^alpha), i.e. the limit of S_n / a_n for nonnegative summands with
/// n P(Y > a_n) -> 1.
struct StableSpec {
  double alpha;
  double beta = 1.0;
  double scale = 1.0;
  double location = 0.0;
};

void validate(const StableSpec& spec);

/// Chambers-Mallows-Stuck transform.
double sample_stable(const StableSpec& spec, RngStream& rng);

/// S1 scale of the unit positive-stable law above:
/// (Gamma(1-alpha) cos(pi alpha / 2))^(1/alpha).
double positive_stable_s1_scale(double alpha);

/// Laplace transform of the unit positive-stable law.
double positive_stable_laplace(double alpha, double lambda);

}  // namespace claimsim
