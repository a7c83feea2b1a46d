#include "claimsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "claimsim/error.hpp"
#include "claimsim/numeric.hpp"

namespace claimsim {

double mean(std::span<const double> x) {
  require(!x.empty(), ErrorKind::ParameterDomain, "mean of an empty sample");
  CompensatedSum s;
  for (double v : x) s += v;
  return s.value() / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  require(x.size() >= 2, ErrorKind::ParameterDomain, "variance needs two observations");
  const double m = mean(x);
  CompensatedSum s;
  for (double v : x) s += (v - m) * (v - m);
  return s.value() / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double lag1_autocorrelation(std::span<const double> x) {
  require(x.size() >= 3, ErrorKind::ParameterDomain, "autocorrelation needs three observations");
  const double m = mean(x);
  CompensatedSum num, den;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - m) * (x[i] - m);
    if (i + 1 < x.size()) num += (x[i] - m) * (x[i + 1] - m);
  }
  return num.value() / den.value();
}

double sample_quantile(std::span<const double> x, double p) {
  require(!x.empty(), ErrorKind::ParameterDomain, "quantile of an empty sample");
  std::vector<double> v(x.begin(), x.end());
  auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  idx = std::clamp<std::size_t>(idx, 1, v.size()) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
  return v[idx];
}

double median(std::span<const double> x) { return sample_quantile(x, 0.5); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), ErrorKind::ParameterDomain, "KS statistic of an empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorKind::ParameterDomain, "KS of an empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double kolmogorov_survival(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.2) return 1.0;
  double s = 0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

double kolmogorov_quantile(double level) {
  require(level > 0 && level < 1, ErrorKind::ParameterDomain, "level must lie in (0, 1)");
  double lo = 0.2, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_survival(mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double ks_critical(std::size_t n, double level) {
  return kolmogorov_quantile(level) / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double level) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return kolmogorov_quantile(level) * std::sqrt((nn + mm) / (nn * mm));
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observations,
                               const std::function<double(std::uint64_t)>& pmf,
                               double min_expected) {
  require(!observations.empty(), ErrorKind::ParameterDomain, "chi-square of an empty sample");
  const double n = static_cast<double>(observations.size());
  const std::uint64_t top = *std::max_element(observations.begin(), observations.end());
  std::vector<double> counts(top + 1, 0.0);
  for (auto k : observations) counts[k] += 1;

  // Cells over {0..top}; the last cell absorbs the upper tail.
  std::vector<double> prob(top + 1);
  double covered = 0;
  for (std::uint64_t k = 0; k <= top; ++k) {
    prob[k] = pmf(k);
    covered += prob[k];
  }
  prob[top] += std::max(0.0, 1.0 - covered);

  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double obs = 0, expct = 0;
  for (std::uint64_t k = 0; k <= top; ++k) {
    obs += counts[k];
    expct += prob[k] * n;
    if (expct >= min_expected) {
      cells.emplace_back(obs, expct);
      obs = expct = 0;
    }
  }
  if (expct > 0 || obs > 0) {
    if (cells.empty()) {
      cells.emplace_back(obs, expct);
    } else {
      cells.back().first += obs;
      cells.back().second += expct;
    }
  }

  ChiSquareResult r;
  r.bins = cells.size();
  for (const auto& [o, e] : cells) r.statistic += (o - e) * (o - e) / e;
  r.dof = static_cast<int>(cells.size()) - 1;
  if (r.dof >= 1) {
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  }
  return r;
}

ChiSquareResult poisson_gof(std::span<const std::uint64_t> observations, double mean) {
  require(mean > 0, ErrorKind::ParameterDomain, "poisson_gof: mean must be > 0");
  boost::math::poisson_distribution<double> dist(mean);
  return chi_square_gof(observations, [&](std::uint64_t k) {
    return boost::math::pdf(dist, static_cast<double>(k));
  });
}

LaplaceEstimate empirical_laplace(std::span<const double> x, double lambda) {
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(-lambda * x[i]);
  return {mean(e), standard_error(e)};
}

TailFit tail_fit(std::span<const double> sample, const std::function<double(double)>& predicted,
                 double q_low, double q_high, std::size_t grid) {
  require(sample.size() >= 100, ErrorKind::ParameterDomain, "tail fit needs at least 100 points");
  require(grid >= 2, ErrorKind::ParameterDomain, "tail fit needs at least two grid points");
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  auto q = [&](double p) {
    auto idx = static_cast<std::size_t>(std::ceil(p * n));
    return v[std::clamp<std::size_t>(idx, 1, v.size()) - 1];
  };
  auto emp = [&](double x) {
    return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), x)) / n;
  };

  TailFit f;
  f.x_low = q(q_low);
  f.x_high = q(q_high);
  require(f.x_high > f.x_low && f.x_low > 0, ErrorKind::Precondition,
          "tail fit window is degenerate");
  const double l0 = std::log(f.x_low), l1 = std::log(f.x_high);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, log_ratio = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double lx = l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double x = std::exp(lx);
    const double e = emp(x);
    const double p = predicted(x);
    if (!(e > 0) || !(p > 0)) continue;
    const double ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    log_ratio += std::log(e / p);
    ++m;
  }
  require(m >= 2, ErrorKind::Precondition, "tail fit window has no usable points");
  const double mm = static_cast<double>(m);
  f.slope = (mm * sxy - sx * sy) / (mm * sxx - sx * sx);
  f.level_ratio = std::exp(log_ratio / mm);
  f.points = m;
  return f;
}

}  // namespace claimsim
