#include "claimsim/stable.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "claimsim/error.hpp"

namespace claimsim {

void validate(const StableSpec& spec) {
  require(spec.alpha > 0 && spec.alpha <= 2, ErrorKind::ParameterDomain,
          "stable: alpha must lie in (0, 2], got " + std::to_string(spec.alpha));
  require(spec.beta >= -1 && spec.beta <= 1, ErrorKind::ParameterDomain,
          "stable: beta must lie in [-1, 1]");
  require(spec.scale > 0 && std::isfinite(spec.scale), ErrorKind::ParameterDomain,
          "stable: scale must be > 0");
  require(std::isfinite(spec.location), ErrorKind::ParameterDomain,
          "stable: location must be finite");
  require(!(spec.alpha == 1 && spec.beta != 0), ErrorKind::UnsupportedParameterization,
          "stable: alpha = 1 with beta != 0 is not supported");
}

double positive_stable_s1_scale(double alpha) {
  return std::pow(std::tgamma(1 - alpha) * std::cos(std::numbers::pi * alpha / 2),
                  1 / alpha);
}

double positive_stable_laplace(double alpha, double lambda) {
  return std::exp(-std::tgamma(1 - alpha) * std::pow(lambda, alpha));
}

double sample_stable(const StableSpec& spec, RngStream& rng) {
  validate(spec);
  const double alpha = spec.alpha;
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = -std::log(rng.uniform_open());

  double z;
  if (alpha == 1) {
    z = std::tan(v);
  } else {
    const double t = spec.beta * std::tan(std::numbers::pi * alpha / 2);
    const double b = std::atan(t) / alpha;
    const double s = std::pow(1 + t * t, 1 / (2 * alpha));
    const double av = alpha * (v + b);
    z = s * std::sin(av) / std::pow(std::cos(v), 1 / alpha) *
        std::pow(std::cos(v - av) / w, (1 - alpha) / alpha);
  }

  double scale = spec.scale;
  if (alpha < 1 && spec.beta == 1) scale *= positive_stable_s1_scale(alpha);
  return scale * z + spec.location;
}

}  // namespace claimsim
