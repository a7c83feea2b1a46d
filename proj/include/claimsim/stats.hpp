#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace claimsim {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
double lag1_autocorrelation(std::span<const double> x);
/// Lower empirical quantile of an unsorted sample.
double sample_quantile(std::span<const double> x, double p);
double median(std::span<const double> x);

double normal_cdf(double z);

/// sup_x |F_n(x) - F(x)|.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
/// sup_x |F_n(x) - G_m(x)|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// P(K > x) for the Kolmogorov limit law.
double kolmogorov_survival(double x);
/// Upper quantile c with P(K > c) = level.
double kolmogorov_quantile(double level);
double ks_critical(std::size_t n, double level = 0.01);
double ks_two_sample_critical(std::size_t n, std::size_t m, double level = 0.01);

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  std::size_t bins = 0;
};

/// Pearson goodness of fit of integer observations to a pmf on {0, 1, ...};
/// neighbouring cells are pooled until each expects at least min_expected.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observations,
                               const std::function<double(std::uint64_t)>& pmf,
                               double min_expected = 5.0);
ChiSquareResult poisson_gof(std::span<const std::uint64_t> observations, double mean);

struct LaplaceEstimate {
  double value = 0;
  double standard_error = 0;
};
LaplaceEstimate empirical_laplace(std::span<const double> x, double lambda);

struct TailFit {
  double slope = 0;
  /// Geometric mean of empirical / predicted survival over the window.
  double level_ratio = 0;
  double x_low = 0;
  double x_high = 0;
  std::size_t points = 0;
};

/// Log-log regression of the empirical survival between two upper quantiles.
TailFit tail_fit(std::span<const double> sample, const std::function<double(double)>& predicted,
                 double q_low = 0.99, double q_high = 0.9999, std::size_t grid = 40);

}  // namespace claimsim
