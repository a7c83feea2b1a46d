#include <doctest.h>

#include <cmath>
#include <sstream>

#include "claimsim/error.hpp"
#include "claimsim/process.hpp"
#include "support.hpp"

using namespace claimsim;
using testing::estimate;
using testing::within_se;

namespace {

ModelSpec hawkes_spec(double kappa, ClaimMap f = claim::Projection{0}) {
  ModelSpec s;
  Hawkes h;
  h.fertility.kappa = fertility::Constant{kappa};
  s.mechanism = h;
  s.claim = f;
  return s;
}

ModelSpec poisson_spec() {
  ModelSpec s;
  s.mechanism = MixedBinomial{law::Constant{0}, law::Exponential{1}, {}, {}};
  s.claim = claim::Constant{1};
  return s;
}

}  // namespace

TEST_SUITE("process") {

TEST_CASE("plain poisson event counts") {
  std::vector<double> n;
  for (std::uint64_t r = 0; r < 10'000; ++r) {
    RngStream rng(1, r);
    n.push_back(double(event_count(simulate_path(poisson_spec(), 100, rng), 100)));
  }
  CHECK(within_se(estimate(n), 100.0));
}

TEST_CASE("hawkes event rate approaches nu / (1 - kappa)") {
  std::vector<double> n;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    RngStream rng(2, r);
    n.push_back(double(event_count(simulate_path(hawkes_spec(0.5, claim::Constant{1}), 500, rng), 500)) /
                500);
  }
  CHECK(std::abs(mean(n) / 2.0 - 1) < 0.02);
}

TEST_CASE("zero immigration gives an empty path") {
  auto s = hawkes_spec(0.5);
  s.nu = 0;
  RngStream rng(3, 0);
  const auto p = simulate_path(s, 100, rng);
  CHECK(p.events.empty());
  CHECK(total_claim(p, 100) == 0);
  CHECK(residue(p, 50) == 0);
}

TEST_CASE("totals on hand-built paths") {
  ProcessPath empty{0, 10, {}, {}};
  CHECK(total_claim(empty, 5) == 0);
  ProcessPath one{0, 2, {{1.0, 5.0, 0, 0}}, {{1.0, 5.0, 0}, {3.0, 1.0, 0}}};
  CHECK(total_claim(one, 2) == 5);
  CHECK(tau(one, 2) == 2);
  CHECK_THROWS_AS(total_claim(one, 3), Error);
  CHECK_THROWS_AS(residue(one, -1), Error);
}

TEST_CASE("counting claims give the event count") {
  RngStream rng(4, 0);
  const auto p = simulate_path(hawkes_spec(0.6, claim::Constant{1}), 200, rng);
  for (double t : {0.0, 10.0, 99.5, 200.0}) CHECK(total_claim(p, t) == double(event_count(p, t)));
}

TEST_CASE("zero offsets leave no residue") {
  ModelSpec s;
  s.mechanism = MixedBinomial{law::Poisson{2}, law::Constant{0}, {}, {}};
  RngStream rng(5, 0);
  const auto p = simulate_path(s, 100, rng);
  for (double t : {1.0, 50.0, 100.0}) CHECK(residue(p, t) == 0);
}

TEST_CASE("decomposition identity") {
  for (std::uint64_t r = 0; r < 200; ++r) {
    RngStream rng(6, r);
    ModelSpec s = r % 3 == 0 ? hawkes_spec(0.4 + 0.001 * double(r)) : ModelSpec{};
    if (r % 3 == 1) s.mechanism = MixedBinomial{law::Poisson{1.5}, law::Pareto{1.2, 1}, {}, {}};
    if (r % 3 == 2) s.mechanism = Renewal{law::Geometric{0.5}, law::LogNormal{0, 1}, {}, {}};
    s.nu = 0.5 + 0.01 * double(r);
    const double t = 5 + double(r % 17);
    const auto p = simulate_path(s, t, rng);
    const double S = total_claim(p, t);
    const double rhs = clusters_before_tau(p, t) - residue(p, t);
    CHECK(std::abs(S - rhs) <= 1e-9 * std::max(1.0, std::abs(S)));
  }
}

TEST_CASE("residue grows faster than sqrt(t) in the heavy renewal case") {
  ModelSpec s;
  s.marks = MarkLaw{{law::Constant{1}}};
  s.mechanism = Renewal{law::Constant{1}, law::Pareto{0.4, 1}, {}, {}};
  std::vector<double> scaled;
  for (double t : {1e3, 1e4}) {
    std::vector<double> e;
    for (std::uint64_t r = 0; r < 500; ++r) {
      RngStream rng(7, r);
      e.push_back(summarize_path(s, t, rng).eps);
    }
    scaled.push_back(mean(e) / std::sqrt(t));
  }
  CHECK(scaled[1] > scaled[0]);
}

TEST_CASE("stationary path rate") {
  const auto s = hawkes_spec(0.5, claim::Constant{1});
  std::vector<double> x;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    RngStream rng(8, r);
    x.push_back(total_claim(simulate_stationary_path(s, 200, 200, rng), 200) / 200);
  }
  CHECK(std::abs(mean(x) / 2.0 - 1) < 0.01);
}

TEST_CASE("zero burnin matches the plain path") {
  const auto s = hawkes_spec(0.5);
  RngStream a(9, 0), b(9, 0);
  const auto p = simulate_path(s, 50, a);
  const auto q = simulate_stationary_path(s, 50, 0, b);
  CHECK(total_claim(p, 50) == total_claim(q, 50));
  CHECK(p.events.size() == q.events.size());
}

TEST_CASE("old immigrants contribute less as t grows") {
  ModelSpec s;
  s.mechanism = MixedBinomial{law::Poisson{1}, law::Exponential{0.01}, {}, {}};
  std::vector<double> m;
  for (double t : {50.0, 200.0, 800.0}) {
    std::vector<double> e;
    for (std::uint64_t r = 0; r < 1000; ++r) {
      RngStream rng(10, r);
      e.push_back(summarize_path(s, t, rng, 5000).eps_tilde);
    }
    m.push_back(mean(e));
  }
  CHECK(m[0] > m[1]);
  CHECK(m[1] > m[2]);
}

TEST_CASE("tau minus one is poisson") {
  const auto s = hawkes_spec(0.3);
  std::vector<std::uint64_t> k;
  for (std::uint64_t r = 0; r < 100'000; ++r) {
    RngStream rng(11, r);
    k.push_back(summarize_path(s, 10, rng).tau - 1);
  }
  CHECK(poisson_gof(k, 10.0).p_value > 0.01);
}

TEST_CASE("cluster totals along a path are uncorrelated") {
  RngStream rng(12, 0);
  const auto p = simulate_path(hawkes_spec(0.5), 100'000, rng);
  std::vector<double> d;
  for (const auto& im : p.immigrants) d.push_back(im.D);
  REQUIRE(d.size() > 90'000);
  CHECK(std::abs(lag1_autocorrelation(d)) <= 3 / std::sqrt(double(d.size())));
}

TEST_CASE("total claim is nondecreasing") {
  RngStream rng(13, 0);
  const auto p = simulate_path(hawkes_spec(0.5), 300, rng);
  double prev = 0;
  for (double t = 0; t <= 300; t += 0.37) {
    const double s = total_claim(p, t);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("unreported immigrant claims") {
  auto full = hawkes_spec(0.5);
  auto ibnr = full;
  ibnr.include_immigrant_claims = false;
  for (std::uint64_t r = 0; r < 50; ++r) {
    RngStream a(14, r), b(14, r);
    const auto p = simulate_path(full, 100, a);
    const auto q = simulate_path(ibnr, 100, b);
    for (double t : {10.0, 55.5, 100.0}) {
      double immigrant = 0;
      for (const auto& e : p.events)
        if (e.generation == 0 && e.time <= t) immigrant += e.claim;
      const double expected = total_claim(p, t) - immigrant;
      CHECK(std::abs(total_claim(q, t) - expected) <= 1e-9 * std::max(1.0, expected));
    }
  }
}

TEST_CASE("summaries agree with materialized paths") {
  ModelSpec s;
  s.mechanism = Renewal{law::Poisson{2}, law::Pareto{0.7, 1}, {}, {}};
  for (std::uint64_t r = 0; r < 50; ++r) {
    RngStream a(15, r), b(15, r);
    const auto p = simulate_stationary_path(s, 40, 30, a);
    const auto m = summarize_path(s, 40, b, 30);
    CHECK(m.S == doctest::Approx(total_claim(p, 40)).epsilon(1e-12));
    CHECK(m.eps == doctest::Approx(residue(p, 40)).epsilon(1e-12));
    CHECK(m.tau == tau(p, 40));
    CHECK(m.N == event_count(p, 40));
    CHECK(m.eps_star == doctest::Approx(eps_star(p, 40)).epsilon(1e-12));
    CHECK(m.eps_tilde == doctest::Approx(eps_tilde(p, 40)).epsilon(1e-12));
  }
}

TEST_CASE("truncation bias vanishes for light delays and long burnin") {
  RngStream rng(16, 0);
  const auto s = hawkes_spec(0.5);
  CHECK(truncation_bias_estimate(s, 100, 200, 10'000, rng) < 1e-6);
  ModelSpec heavy;
  heavy.mechanism = MixedBinomial{law::Poisson{1}, law::Pareto{0.5, 1}, {}, {}};
  CHECK(truncation_bias_estimate(heavy, 100, 200, 10'000, rng) > 0);
}

TEST_CASE("csv dump") {
  ProcessPath p{0, 2, {{1.0, 5.0, 0, 0}, {1.5, 0.25, kNoCluster, kNoGeneration}}, {}};
  std::ostringstream os;
  write_path_csv(p, os);
  CHECK(os.str() == "time,claim,cluster_index,generation\r\n1,5,0,0\r\n1.5,0.25,,\r\n");
}

}
