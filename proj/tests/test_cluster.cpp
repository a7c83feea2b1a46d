#include <doctest.h>

#include <cmath>

#include "claimsim/cluster.hpp"
#include "claimsim/error.hpp"
#include "support.hpp"

using namespace claimsim;
using testing::estimate;
using testing::within_se;

namespace {

Hawkes hawkes(double kappa, DelayShape g = shape::Exponential{1}) {
  Hawkes h;
  h.fertility.shape = g;
  h.fertility.kappa = fertility::Constant{kappa};
  return h;
}

struct Totals {
  std::vector<double> D, D2, size;
};

Totals run(const ClusterMechanism& mech, const MarkLaw& q, const ClaimMap& f, std::size_t n,
           std::uint64_t seed) {
  RngStream rng(seed, 0);
  Totals t;
  Cluster c;
  std::vector<double> mark(q.dim());
  for (std::size_t i = 0; i < n; ++i) {
    sample_mark(q, rng, mark);
    simulate_cluster_into(c, mech, q, f, mark, rng);
    t.D.push_back(c.D);
    t.D2.push_back(c.D * c.D);
    t.size.push_back(double(c.K() + 1));
  }
  return t;
}

}  // namespace

TEST_SUITE("cluster") {

TEST_CASE("no offspring") {
  MarkLaw q{{law::Exponential{1}}};
  RngStream rng(1, 0);
  const std::vector<double> a{2.5};
  const auto c = simulate_cluster(hawkes(0.0), q, claim::Projection{0}, a, rng);
  CHECK(c.K() == 0);
  CHECK(c.D == 2.5);
  CHECK(cluster_total(c, claim::Projection{0}) == 2.5);
}

TEST_CASE("hawkes cluster sizes have mean 1 / (1 - kappa)") {
  MarkLaw q{{law::Exponential{1}}};
  for (DelayShape g : {DelayShape{shape::Exponential{1}}, DelayShape{shape::Lomax{1.5, 1}}}) {
    const auto t = run(hawkes(0.5, g), q, claim::Projection{0}, 100'000, 2);
    CHECK(within_se(estimate(t.size), 2.0));
  }
}

TEST_CASE("mixed binomial counting claims") {
  MarkLaw q{{law::Exponential{1}}};
  MixedBinomial mb{law::Poisson{1}, law::Exponential{1}, {}, {}};
  const auto t = run(mb, q, claim::Constant{1}, 100'000, 3);
  CHECK(within_se(estimate(t.D), 2.0));
  for (std::size_t i = 0; i < 1000; ++i) CHECK(t.D[i] == t.size[i]);
}

TEST_CASE("compound second moment") {
  MarkLaw q{{law::Exponential{1}}};
  MixedBinomial mb{law::Poisson{1}, law::Exponential{1}, {}, {}};
  const auto t = run(mb, q, claim::Projection{0}, 1'000'000, 4);
  CHECK(within_se(estimate(t.D2), 7.0));
}

TEST_CASE("stored total matches recomputation") {
  MarkLaw q{{law::LogNormal{0, 1}, law::Exponential{2}}};
  ClaimMap f = claim::Affine{1, 2.0, 0.5};
  RngStream rng(5, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto a = sample_mark(q, rng);
    Hawkes h;
    h.fertility.kappa = fertility::Proportional{1, 0.9};
    const auto c = simulate_cluster(h, q, f, a, rng);
    CHECK(cluster_total(c, f) == doctest::Approx(c.D).epsilon(1e-12));
    CHECK(c.D >= c.ancestor_claim);
  }
}

TEST_CASE("generations and offsets") {
  MarkLaw q{{law::Exponential{1}}};
  RngStream rng(6, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto a = sample_mark(q, rng);
    const auto c = simulate_cluster(hawkes(0.7), q, claim::Projection{0}, a, rng);
    for (const auto& e : c.events) {
      if (e.parent == kAncestor) {
        CHECK(e.generation == 1);
      } else {
        REQUIRE(e.parent < c.K());
        CHECK(e.generation == c.events[e.parent].generation + 1);
        CHECK(e.offset >= c.events[e.parent].offset);
      }
    }
  }
}

TEST_CASE("renewal offsets are cumulative") {
  MarkLaw q{{law::Exponential{1}}};
  Renewal r{law::Poisson{3}, law::Exponential{1}, {}, {}};
  RngStream rng(7, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto a = sample_mark(q, rng);
    const auto c = simulate_cluster(r, q, claim::Projection{0}, a, rng);
    for (std::size_t j = 0; j < c.K(); ++j) {
      CHECK(c.events[j].generation == 1);
      if (j > 0) CHECK(c.events[j].offset >= c.events[j - 1].offset);
    }
  }
}

TEST_CASE("cascade matches the one-step fixed point") {
  MarkLaw q{{law::Exponential{1}}};
  Hawkes h;
  h.fertility.kappa = fertility::Proportional{0, 0.5};
  const std::size_t n = 100'000;
  const auto full = run(h, q, claim::Projection{0}, n, 8);
  const auto pool = run(h, q, claim::Projection{0}, n, 9);
  RngStream rng(10, 0);
  std::vector<double> boot, boot2;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = sample(law::Exponential{1}, rng);
    const auto L = sample_poisson(0.5 * a, rng);
    double d = a;
    for (std::uint64_t j = 0; j < L; ++j) d += pool.D[next++ % n];
    boot.push_back(d);
    boot2.push_back(d * d);
  }
  auto agree = [](const std::vector<double>& x, const std::vector<double>& y) {
    const double se = std::hypot(standard_error(x), standard_error(y));
    return std::abs(mean(x) - mean(y)) <= 3 * se;
  };
  CHECK(agree(full.D, boot));
  CHECK(agree(full.D2, boot2));
}

TEST_CASE("mixed binomial and renewal share the claim law") {
  MarkLaw q{{law::Exponential{1}}};
  const auto a = run(MixedBinomial{law::Geometric{0.4}, law::Exponential{1}, {}, {}}, q,
                     claim::Projection{0}, 200'000, 11);
  const auto b = run(Renewal{law::Geometric{0.4}, law::Exponential{1}, {}, {}}, q,
                     claim::Projection{0}, 200'000, 12);
  CHECK(std::abs(mean(a.D) - mean(b.D)) <= 3 * std::hypot(standard_error(a.D), standard_error(b.D)));
  CHECK(std::abs(mean(a.D2) - mean(b.D2)) <=
        3 * std::hypot(standard_error(a.D2), standard_error(b.D2)));
}

TEST_CASE("count link sets the conditional mean") {
  MarkLaw q{{law::Exponential{0.5}}};
  MixedBinomial mb{law::Poisson{1}, law::Exponential{1}, MarkLink{0, 1.5}, {}};
  RngStream rng(13, 0);
  std::vector<double> k;
  for (int i = 0; i < 200'000; ++i) {
    const auto a = sample_mark(q, rng);
    k.push_back(double(simulate_cluster(mb, q, claim::Projection{0}, a, rng).K()));
  }
  CHECK(within_se(estimate(k), 1.5 * 2.0));
}

TEST_CASE("borel comparison") {
  MarkLaw q{{law::Exponential{1}}};
  RngStream rng(14, 0);
  const auto zero = cluster_size_distribution(hawkes(0.0), q, 1000, rng);
  CHECK(zero.pmf.at(1) == 1.0);
  CHECK(zero.tv_distance == doctest::Approx(0.0));

  const std::uint64_t n = 1'000'000;
  const auto r = cluster_size_distribution(hawkes(0.5), q, n, rng);
  CHECK(r.tv_distance < 0.005);
  const double p1 = r.pmf.at(1);
  CHECK(std::abs(p1 - std::exp(-0.5)) <= 3 * std::sqrt(p1 * (1 - p1) / double(n)));

  Hawkes prop;
  prop.fertility.kappa = fertility::Proportional{0, 0.5};
  CHECK_THROWS_AS(cluster_size_distribution(prop, q, 10, rng), Error);
  CHECK_THROWS_AS(cluster_size_distribution(MixedBinomial{law::Poisson{1}, law::Exponential{1}, {}, {}},
                                            q, 10, rng),
                  Error);
}

TEST_CASE("near-critical cascades stay under the cap") {
  MarkLaw q{{law::Exponential{1}}};
  const auto t = run(hawkes(0.95), q, claim::Projection{0}, 100'000, 15);
  CHECK(within_se(estimate(t.size), 20.0, 4.0));
}

TEST_CASE("node cap turns runaway cascades into errors") {
  MarkLaw q{{law::Exponential{1}}};
  RngStream rng(16, 0);
  bool thrown = false;
  for (int i = 0; i < 1000 && !thrown; ++i) {
    try {
      const auto a = sample_mark(q, rng);
      simulate_cluster(hawkes(0.9), q, claim::Projection{0}, a, rng, 5);
    } catch (const Error& e) {
      thrown = true;
      CHECK(e.kind() == ErrorKind::RunawayCluster);
      CHECK(std::string(e.what()).find("node cap") != std::string::npos);
    }
  }
  CHECK(thrown);
}

TEST_CASE("validation") {
  MarkLaw q{{law::Exponential{1}}};
  try {
    validate(hawkes(1.2), q);
    FAIL("expected supercritical");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Supercritical);
  }
  CHECK_THROWS_AS(validate(claim::Projection{3}, q), Error);
  CHECK_THROWS_AS(validate(MixedBinomial{law::Pareto{0.8, 1}, law::Exponential{1}, {}, {}}, q),
                  Error);
}

}
