#include <doctest.h>

#include <cmath>

#include "claimsim/error.hpp"
#include "claimsim/thinning.hpp"
#include "support.hpp"

using namespace claimsim;
using testing::estimate;
using testing::within_se;

namespace {

ModelSpec hawkes_spec(double kappa, DelayShape g = shape::Exponential{1}) {
  ModelSpec s;
  Hawkes h;
  h.fertility.kappa = fertility::Constant{kappa};
  h.fertility.shape = g;
  s.mechanism = h;
  return s;
}

}  // namespace

TEST_SUITE("thinning") {

TEST_CASE("intensity examples") {
  IntensityState st(1.0, shape::Exponential{1});
  CHECK(conditional_intensity(st, 0.5) == 1.0);
  st.add_event(1.0, 0.5);
  CHECK(conditional_intensity(st, 2.0) == doctest::Approx(1 + 0.5 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(conditional_intensity(st, 2.0) == doctest::Approx(1.1839).epsilon(1e-4));
  st.add_event(1.5, 0.5);
  CHECK(conditional_intensity(st, 2.0) ==
        doctest::Approx(1 + 0.5 * std::exp(-1.0) + 0.5 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(conditional_intensity(st, 2.0) == doctest::Approx(1.4872).epsilon(1e-4));
  CHECK(conditional_intensity(st, 1.5) == doctest::Approx(1 + 0.5 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(st.intensity_right(1.5) == doctest::Approx(1 + 0.5 * std::exp(-0.5) + 0.5).epsilon(1e-12));
}

TEST_CASE("ordering") {
  IntensityState st(1.0, shape::Exponential{1});
  st.add_event(2.0, 0.5);
  CHECK_THROWS_AS(conditional_intensity(st, 1.0), Error);
  CHECK_THROWS_AS(st.add_event(1.0, 0.5), Error);
}

TEST_CASE("cached exponential sum matches brute force") {
  RngStream rng(1, 0);
  for (int h = 0; h < 1000; ++h) {
    IntensityState st(0.7, shape::Exponential{0.5 + rng.uniform() * 3});
    double t = 0;
    const int n = 1 + int(rng.uniform() * 60);
    for (int i = 0; i < n; ++i) {
      t += sample(law::Exponential{2}, rng);
      st.add_event(t, rng.uniform());
    }
    const double q = t + rng.uniform();
    CHECK(conditional_intensity(st, q) == doctest::Approx(st.brute_force(q)).epsilon(1e-9));
  }
}

TEST_CASE("zero fertility gives a poisson process") {
  std::vector<double> n;
  for (std::uint64_t r = 0; r < 10'000; ++r) {
    RngStream rng(2, r);
    n.push_back(double(event_count(simulate_by_thinning(hawkes_spec(0), 100, rng), 100)));
  }
  CHECK(within_se(estimate(n), 100.0));
}

TEST_CASE("thinning and cluster construction agree on counts") {
  for (DelayShape g : {DelayShape{shape::Exponential{1}}, DelayShape{shape::Lomax{2.0, 1}}}) {
    const auto s = hawkes_spec(0.5, g);
    const double t = 200;
    const std::uint64_t runs = std::holds_alternative<shape::Exponential>(g) ? 10'000 : 2000;
    std::vector<double> a, b;
    for (std::uint64_t r = 0; r < runs; ++r) {
      RngStream r1(3, r), r2(4, r);
      a.push_back(double(event_count(simulate_by_thinning(s, t, r1), t)));
      b.push_back(double(summarize_path(s, t, r2).N));
    }
    CHECK(ks_two_sample(a, b) <= ks_two_sample_critical(a.size(), b.size(), 0.01));
  }
}

TEST_CASE("thinning and cluster construction agree on claim totals") {
  auto s = hawkes_spec(0.5);
  s.marks = MarkLaw{{law::Pareto{2.5, 1}}};
  const double t = 200;
  std::vector<double> a, b;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    RngStream r1(5, r), r2(6, r);
    a.push_back(total_claim(simulate_by_thinning(s, t, r1), t) / t);
    b.push_back(summarize_path(s, t, r2).S / t);
  }
  CHECK(std::abs(mean(a) - mean(b)) <= 3 * std::hypot(standard_error(a), standard_error(b)));
}

TEST_CASE("rescaled interarrivals are unit exponential") {
  for (DelayShape g : {DelayShape{shape::Exponential{1}}, DelayShape{shape::Lomax{1.5, 0.5}}}) {
    const auto s = hawkes_spec(0.6, g);
    RngStream rng(7, 0);
    IntensityState st(1.0, g);
    const double t = std::holds_alternative<shape::Exponential>(g) ? 40'000 : 4000;
    simulate_by_thinning(s, t, rng, &st);
    const auto e = rescaled_interarrivals(st);
    REQUIRE(e.size() > 5000);
    const double ks = ks_statistic(e, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); });
    CHECK(ks <= ks_critical(e.size(), 0.01));
  }
}

TEST_CASE("mark-dependent fertility") {
  ModelSpec s;
  s.marks = MarkLaw{{law::Exponential{1}}};
  Hawkes h;
  h.fertility.kappa = fertility::Proportional{0, 0.5};
  s.mechanism = h;
  std::vector<double> a, b;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    RngStream r1(8, r), r2(9, r);
    a.push_back(double(event_count(simulate_by_thinning(s, 100, r1), 100)));
    b.push_back(double(summarize_path(s, 100, r2).N));
  }
  CHECK(ks_two_sample(a, b) <= ks_two_sample_critical(a.size(), b.size(), 0.01));
}

TEST_CASE("preconditions") {
  ModelSpec s;
  s.mechanism = MixedBinomial{law::Poisson{1}, law::Exponential{1}, {}, {}};
  RngStream rng(1, 0);
  try {
    simulate_by_thinning(s, 10, rng);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

}
