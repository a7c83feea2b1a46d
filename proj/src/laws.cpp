#include "claimsim/laws.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "claimsim/error.hpp"

namespace claimsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::uint64_t poisson_inversion(double mean, RngStream& rng) {
  const double limit = std::exp(-mean);
  double prod = rng.uniform_open();
  std::uint64_t k = 0;
  while (prod > limit) {
    prod *= rng.uniform_open();
    ++k;
  }
  return k;
}

// Transformed rejection with squeeze (Hoermann 1993), valid for mean >= 10.
std::uint64_t poisson_ptrs(double mean, RngStream& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_open();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

// sum_{k>=1} (k^r - (k-1)^r) g(k) for a nonincreasing g; explicit summation
// followed by an integral estimate of the remainder.
double weighted_tail_sum(int order, auto&& g, double start_hint) {
  const double first = std::max(1.0, std::ceil(start_hint));
  const double stop = first + 2.0e5;
  double sum = 0.0;
  double k = 1.0;
  for (; k <= stop; k += 1.0) {
    const double term = (order == 1 ? 1.0 : 2.0 * k - 1.0) * g(k);
    sum += term;
    if (k > first && term < 1e-18 * sum) return sum;
  }
  // Remainder by the midpoint rule on geometric panels out to where g
  // vanishes to double precision.
  double x = k - 0.5;
  for (int i = 0; i < 4000; ++i) {
    const double h = x * 0.01;
    const double mid = x + 0.5 * h;
    const double term = (order == 1 ? 1.0 : 2.0 * mid) * g(mid) * h;
    sum += term;
    x += h;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

void validate(const ScalarLaw& law) {
  auto bad = [](const std::string& msg) { fail(ErrorKind::ParameterDomain, msg); };
  std::visit(
      overloaded{
          [&](const law::Constant& l) {
            if (!std::isfinite(l.value)) bad("constant law: value must be finite");
          },
          [&](const law::Exponential& l) {
            if (!(l.rate > 0) || !std::isfinite(l.rate))
              bad("exponential law: rate must be > 0, got " + fmt(l.rate));
          },
          [&](const law::Pareto& l) {
            if (!(l.alpha > 0) || !std::isfinite(l.alpha))
              bad("pareto law: alpha must be > 0, got " + fmt(l.alpha));
            if (!(l.scale > 0) || !std::isfinite(l.scale))
              bad("pareto law: scale must be > 0, got " + fmt(l.scale));
          },
          [&](const law::LogNormal& l) {
            if (!std::isfinite(l.mu) || !(l.sigma > 0) || !std::isfinite(l.sigma))
              bad("lognormal law: need finite mu and sigma > 0");
          },
          [&](const law::Poisson& l) {
            if (!(l.mean >= 0) || !std::isfinite(l.mean))
              bad("poisson law: mean must be >= 0, got " + fmt(l.mean));
          },
          [&](const law::Geometric& l) {
            if (!(l.p > 0 && l.p <= 1))
              bad("geometric law: p must lie in (0, 1], got " + fmt(l.p));
          },
          [&](const law::Borel& l) {
            if (!(l.kappa >= 0 && l.kappa < 1))
              bad("borel law: kappa must lie in [0, 1), got " + fmt(l.kappa));
          },
      },
      law);
}

double sample_normal(RngStream& rng) {
  const double r = std::sqrt(-2.0 * std::log(rng.uniform_open()));
  return r * std::cos(2.0 * std::numbers::pi * rng.uniform());
}

std::uint64_t sample_poisson(double mean, RngStream& rng) {
  if (mean <= 0) return 0;
  return mean < 10 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

std::uint64_t sample_borel(double kappa, RngStream& rng, std::uint64_t node_cap) {
  if (kappa >= 1)
    fail(ErrorKind::Supercritical,
         "borel: kappa = " + fmt(kappa) + " >= 1, the branching tree may be infinite");
  require(kappa >= 0, ErrorKind::ParameterDomain, "borel: kappa must be >= 0");
  std::uint64_t total = 1;
  std::uint64_t pending = 1;
  while (pending > 0) {
    --pending;
    const std::uint64_t children = sample_poisson(kappa, rng);
    total += children;
    pending += children;
    if (total > node_cap)
      fail(ErrorKind::RunawayCluster,
           "borel: tree exceeded the node cap of " + std::to_string(node_cap));
  }
  return total;
}

double borel_pmf(double kappa, std::uint64_t k) {
  if (k == 0) return 0.0;
  if (kappa == 0) return k == 1 ? 1.0 : 0.0;
  const double kk = static_cast<double>(k);
  return std::exp(-kappa * kk + (kk - 1) * std::log(kappa * kk) - std::lgamma(kk + 1));
}

double sample(const ScalarLaw& law, RngStream& rng) {
  return std::visit(
      overloaded{
          [](const law::Constant& l) { return l.value; },
          [&](const law::Exponential& l) { return -std::log(rng.uniform_open()) / l.rate; },
          [&](const law::Pareto& l) {
            return l.scale * std::pow(rng.uniform_open(), -1.0 / l.alpha);
          },
          [&](const law::LogNormal& l) {
            return std::exp(l.mu + l.sigma * sample_normal(rng));
          },
          [&](const law::Poisson& l) {
            return static_cast<double>(sample_poisson(l.mean, rng));
          },
          [&](const law::Geometric& l) {
            if (l.p >= 1) return 0.0;
            return std::floor(std::log(rng.uniform_open()) / std::log1p(-l.p));
          },
          [&](const law::Borel& l) {
            return static_cast<double>(sample_borel(l.kappa, rng));
          },
      },
      law);
}

std::uint64_t sample_count(const ScalarLaw& law, RngStream& rng) {
  const double x = sample(law, rng);
  if (!(x >= 0)) return 0;
  if (x >= 1.8e19) fail(ErrorKind::RunawayCluster, "count draw overflows 64 bits");
  return static_cast<std::uint64_t>(std::floor(x));
}

bool is_discrete(const ScalarLaw& law) {
  return std::holds_alternative<law::Poisson>(law) ||
         std::holds_alternative<law::Geometric>(law) ||
         std::holds_alternative<law::Borel>(law);
}

double moment(const ScalarLaw& law, int order) {
  require(order == 1 || order == 2, ErrorKind::ParameterDomain,
          "moment: only orders 1 and 2 are supported");
  const double k = order;
  return std::visit(
      overloaded{
          [&](const law::Constant& l) { return std::pow(l.value, k); },
          [&](const law::Exponential& l) {
            return (order == 1 ? 1.0 : 2.0) / std::pow(l.rate, k);
          },
          [&](const law::Pareto& l) {
            if (l.alpha <= k) return kInf;
            return l.alpha * std::pow(l.scale, k) / (l.alpha - k);
          },
          [&](const law::LogNormal& l) {
            return std::exp(k * l.mu + 0.5 * k * k * l.sigma * l.sigma);
          },
          [&](const law::Poisson& l) {
            return order == 1 ? l.mean : l.mean + l.mean * l.mean;
          },
          [&](const law::Geometric& l) {
            const double q = 1 - l.p;
            return order == 1 ? q / l.p : (q + q * q) / (l.p * l.p);
          },
          [&](const law::Borel& l) {
            const double m = 1 / (1 - l.kappa);
            return order == 1 ? m : l.kappa * m * m * m + m * m;
          },
      },
      law);
}

double count_moment(const ScalarLaw& law, int order) {
  require(order == 1 || order == 2, ErrorKind::ParameterDomain,
          "count_moment: only orders 1 and 2 are supported");
  if (is_discrete(law)) return moment(law, order);
  return std::visit(
      overloaded{
          [&](const law::Constant& l) {
            return std::pow(std::floor(std::max(l.value, 0.0)), order);
          },
          [&](const law::Exponential& l) {
            const double q = std::exp(-l.rate);
            const double m1 = q / (1 - q);
            return order == 1 ? m1 : 2 * q / ((1 - q) * (1 - q)) - m1;
          },
          [&](const law::Pareto& l) {
            if (l.alpha <= order) return kInf;
            auto g = [&](double x) { return x <= l.scale ? 1.0 : std::pow(x / l.scale, -l.alpha); };
            return weighted_tail_sum(order, g, l.scale);
          },
          [&](const law::LogNormal& l) {
            auto g = [&](double x) { return survival(l, x); };
            return weighted_tail_sum(order, g, std::exp(l.mu));
          },
          [&](const auto&) { return kInf; },
      },
      law);
}

bool moment_exists(const ScalarLaw& law, double order) {
  if (const auto idx = tail_index(law)) return order < *idx;
  return true;
}

double survival(const ScalarLaw& law, double x) {
  return std::visit(
      overloaded{
          [&](const law::Constant& l) { return x < l.value ? 1.0 : 0.0; },
          [&](const law::Exponential& l) { return x <= 0 ? 1.0 : std::exp(-l.rate * x); },
          [&](const law::Pareto& l) {
            return x <= l.scale ? 1.0 : std::pow(x / l.scale, -l.alpha);
          },
          [&](const law::LogNormal& l) {
            if (x <= 0) return 1.0;
            return 0.5 * std::erfc((std::log(x) - l.mu) / (l.sigma * std::numbers::sqrt2));
          },
          [&](const law::Poisson& l) {
            if (x < 0) return 1.0;
            const auto n = static_cast<std::uint64_t>(std::floor(x));
            double term = std::exp(-l.mean), cdf = term;
            for (std::uint64_t k = 1; k <= n; ++k) {
              term *= l.mean / static_cast<double>(k);
              cdf += term;
            }
            return std::max(0.0, 1.0 - cdf);
          },
          [&](const law::Geometric& l) {
            if (x < 0) return 1.0;
            return std::pow(1 - l.p, std::floor(x) + 1);
          },
          [&](const law::Borel& l) {
            if (x < 1) return 1.0;
            const auto n = static_cast<std::uint64_t>(std::floor(x));
            double cdf = 0;
            for (std::uint64_t k = 1; k <= n; ++k) cdf += borel_pmf(l.kappa, k);
            return std::max(0.0, 1.0 - cdf);
          },
      },
      law);
}

double quantile(const ScalarLaw& law, double u) {
  return std::visit(
      overloaded{
          [&](const law::Constant& l) { return l.value; },
          [&](const law::Exponential& l) { return -std::log1p(-u) / l.rate; },
          [&](const law::Pareto& l) { return l.scale * std::pow(1 - u, -1.0 / l.alpha); },
          [&](const law::LogNormal& l) {
            const double z = -std::numbers::sqrt2 * boost::math::erfc_inv(2 * u);
            return std::exp(l.mu + l.sigma * z);
          },
          [&](const auto&) -> double {
            fail(ErrorKind::UnsupportedParameterization,
                 "quantile: only defined for continuous laws");
          },
      },
      law);
}

std::optional<double> tail_index(const ScalarLaw& law) {
  if (const auto* p = std::get_if<law::Pareto>(&law)) return p->alpha;
  return std::nullopt;
}

ScalarLaw with_mean(const ScalarLaw& law, double mean) {
  require(mean >= 0 && std::isfinite(mean), ErrorKind::ParameterDomain,
          "mark link produced a negative or non-finite mean " + fmt(mean));
  return std::visit(
      overloaded{
          [&](const law::Constant&) -> ScalarLaw { return law::Constant{mean}; },
          [&](const law::Exponential&) -> ScalarLaw {
            if (mean == 0) return law::Constant{0.0};
            return law::Exponential{1 / mean};
          },
          [&](const law::Pareto& l) -> ScalarLaw {
            require(l.alpha > 1, ErrorKind::UnsupportedParameterization,
                    "mark link on a pareto law needs alpha > 1 (finite mean)");
            if (mean == 0) return law::Constant{0.0};
            return law::Pareto{l.alpha, mean * (l.alpha - 1) / l.alpha};
          },
          [&](const law::LogNormal& l) -> ScalarLaw {
            if (mean == 0) return law::Constant{0.0};
            return law::LogNormal{std::log(mean) - 0.5 * l.sigma * l.sigma, l.sigma};
          },
          [&](const law::Poisson&) -> ScalarLaw { return law::Poisson{mean}; },
          [&](const law::Geometric&) -> ScalarLaw { return law::Geometric{1 / (1 + mean)}; },
          [&](const law::Borel&) -> ScalarLaw {
            require(mean >= 1, ErrorKind::ParameterDomain, "borel law needs mean >= 1");
            return law::Borel{1 - 1 / mean};
          },
      },
      law);
}

double support_min(const ScalarLaw& law) {
  return std::visit(overloaded{
                        [](const law::Constant& l) { return l.value; },
                        [](const law::Pareto& l) { return l.scale; },
                        [](const law::Borel&) { return 1.0; },
                        [](const auto&) { return 0.0; },
                    },
                    law);
}

std::string to_string(const ScalarLaw& law) {
  return std::visit(
      overloaded{
          [](const law::Constant& l) { return "constant(" + fmt(l.value) + ")"; },
          [](const law::Exponential& l) { return "exponential(" + fmt(l.rate) + ")"; },
          [](const law::Pareto& l) {
            return "pareto(" + fmt(l.alpha) + ", " + fmt(l.scale) + ")";
          },
          [](const law::LogNormal& l) {
            return "lognormal(" + fmt(l.mu) + ", " + fmt(l.sigma) + ")";
          },
          [](const law::Poisson& l) { return "poisson(" + fmt(l.mean) + ")"; },
          [](const law::Geometric& l) { return "geometric(" + fmt(l.p) + ")"; },
          [](const law::Borel& l) { return "borel(" + fmt(l.kappa) + ")"; },
      },
      law);
}

}  // namespace claimsim
