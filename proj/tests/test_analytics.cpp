#include <doctest.h>

#include <cmath>

#include "claimsim/analytics.hpp"
#include "claimsim/error.hpp"
#include "support.hpp"

using namespace claimsim;
using testing::estimate;
using testing::within_se;

namespace {

ModelSpec mixed(ScalarLaw k, ScalarLaw w = law::Exponential{1}, ScalarLaw x = law::Exponential{1}) {
  ModelSpec s;
  s.marks = MarkLaw{{x}};
  s.mechanism = MixedBinomial{k, w, {}, {}};
  return s;
}

ModelSpec hawkes(double kappa, ScalarLaw x = law::Exponential{1},
                 DelayShape g = shape::Exponential{1}) {
  ModelSpec s;
  s.marks = MarkLaw{{x}};
  Hawkes h;
  h.fertility.kappa = fertility::Constant{kappa};
  h.fertility.shape = g;
  s.mechanism = h;
  return s;
}

struct Sample {
  std::vector<double> D, D2;
};

Sample clusters(const ModelSpec& s, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Sample out;
  Cluster c;
  std::vector<double> a(s.marks.dim());
  for (std::size_t i = 0; i < n; ++i) {
    sample_mark(s.marks, rng, a);
    simulate_cluster_into(c, s.mechanism, s.marks, s.claim, a, rng);
    const double d = s.include_immigrant_claims ? c.D : c.D - c.ancestor_claim;
    out.D.push_back(d);
    out.D2.push_back(d * d);
  }
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

double bisect(const std::function<double(double)>& g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("analytics") {

TEST_CASE("no progeny") {
  const auto m = compound_moments(mixed(law::Constant{0}));
  CHECK(m.mu_D == doctest::Approx(1.0));
  CHECK(m.ED2 == doctest::Approx(2.0));
}

TEST_CASE("poisson counts with exponential claims") {
  const auto s = mixed(law::Poisson{1});
  const auto m = compound_moments(s);
  CHECK(m.mu_D == doctest::Approx(2.0));
  CHECK(m.ED2 == doctest::Approx(7.0));
  CHECK(m.ED2 >= m.mu_D * m.mu_D);
  const auto mc = clusters(s, 400'000, 1);
  CHECK(within_se(estimate(mc.D), m.mu_D));
  CHECK(within_se(estimate(mc.D2), m.ED2));
}

TEST_CASE("missing second moment") {
  CHECK(kind_of([] { compound_moments(mixed(law::Poisson{1}, law::Exponential{1}, law::Pareto{1.5, 1})); }) ==
        ErrorKind::MomentDoesNotExist);
  CHECK(cluster_mean(mixed(law::Poisson{1}, law::Exponential{1}, law::Pareto{1.5, 1})) ==
        doctest::Approx(6.0));
}

TEST_CASE("hawkes second moment") {
  const auto m = hawkes_second_moment(hawkes(0.5));
  CHECK(m.mu_D == doctest::Approx(2.0));
  CHECK(m.ED2 == doctest::Approx(10.0));
  REQUIRE(m.variance_D_independent);
  CHECK(*m.variance_D_independent == doctest::Approx(m.variance_D));

  auto unit = hawkes(0.3);
  unit.claim = claim::Constant{1};
  const auto u = hawkes_second_moment(unit);
  CHECK(u.ED2 == doctest::Approx(1 / std::pow(0.7, 3)));
  REQUIRE(u.ED2_constant_claims);
  CHECK(*u.ED2_constant_claims == doctest::Approx(u.ED2));

  const auto z = hawkes_second_moment(hawkes(0.0));
  CHECK(z.ED2 == doctest::Approx(2.0));
}

TEST_CASE("hawkes with mark-dependent fertility") {
  ModelSpec s;
  s.marks = MarkLaw{{law::Exponential{1}}};
  Hawkes h;
  h.fertility.kappa = fertility::Proportional{0, 0.3};
  s.mechanism = h;
  const auto m = hawkes_second_moment(s);
  CHECK(m.kappa == doctest::Approx(0.3));
  CHECK(m.E_kappaA2 == doctest::Approx(0.18));
  CHECK(m.E_XkappaA == doctest::Approx(0.6));
  CHECK_FALSE(m.variance_D_independent);
  const auto mc = clusters(s, 400'000, 2);
  CHECK(within_se(estimate(mc.D), m.mu_D));
  CHECK(within_se(estimate(mc.D2), m.ED2));
}

TEST_CASE("unreported immigrant claims") {
  auto s = hawkes(0.5);
  s.include_immigrant_claims = false;
  const auto m = compound_moments(s);
  CHECK(m.mu_D == doctest::Approx(1.0));
  const auto mc = clusters(s, 400'000, 3);
  CHECK(within_se(estimate(mc.D), m.mu_D));
  CHECK(within_se(estimate(mc.D2), m.ED2));

  auto b = mixed(law::Poisson{2});
  b.include_immigrant_claims = false;
  const auto mb = compound_moments(b);
  CHECK(mb.mu_D == doctest::Approx(2.0));
  CHECK(mb.ED2 == doctest::Approx(2 * 2 + 4 * 1));
}

TEST_CASE("subcriticality") {
  auto s = hawkes(0.5);
  std::get<Hawkes>(s.mechanism).fertility.kappa = fertility::Constant{1.2};
  CHECK(kind_of([&] { hawkes_second_moment(s); }) == ErrorKind::Supercritical);
}

TEST_CASE("laplace fixed point") {
  auto s = hawkes(0.5);
  CHECK(laplace_fixed_point(s, 0.0) == 1.0);

  auto c = hawkes(0.5);
  c.claim = claim::Constant{1};
  const double oracle =
      bisect([](double p) { return std::exp(-0.1) * std::exp(0.5 * (p - 1)) - p; }, 0, 1);
  CHECK(std::abs(laplace_fixed_point(c, 0.1) - oracle) < 1e-11);

  const double h = 1e-6;
  const double slope = (laplace_fixed_point(s, h) - 1) / h;
  CHECK(std::abs(slope / -2.0 - 1) < 1e-4);

  double prev = 1;
  for (double x : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double v = laplace_fixed_point(s, x);
    CHECK(v > 0);
    CHECK(v <= prev);
    prev = v;
  }
  const auto it = laplace_iterates(s, 0.7);
  REQUIRE(it.size() > 2);
  CHECK(it.front() == 1.0);
  for (std::size_t i = 1; i < it.size(); ++i) CHECK(it[i] <= it[i - 1]);
}

TEST_CASE("laplace fixed point matches simulation") {
  ModelSpec s;
  s.marks = MarkLaw{{law::Exponential{1}, law::Constant{0.5}}};
  Hawkes h;
  h.fertility.kappa = fertility::Proportional{0, 0.4};
  s.mechanism = h;
  const auto mc = clusters(s, 200'000, 4);
  for (double x : {0.2, 1.0}) {
    std::vector<double> e;
    for (double d : mc.D) e.push_back(std::exp(-x * d));
    CHECK(within_se(estimate(e), laplace_fixed_point(s, x)));
  }
  const double slope = (laplace_fixed_point(s, 1e-6) - 1) / 1e-6;
  CHECK(std::abs(slope / -cluster_mean(s) - 1) < 1e-4);
}

TEST_CASE("tail predictions") {
  const auto rv1 = tail_prediction(mixed(law::Poisson{2}, law::Exponential{1}, law::Pareto{1.5, 1}));
  CHECK(rv1.regime == TailRegime::RV1);
  CHECK(rv1.alpha == 1.5);
  CHECK(rv1.claim_constant == doctest::Approx(3.0));
  CHECK(rv1.survival(1e3) == doctest::Approx(3 * std::pow(1e3, -1.5)));

  const auto rv2 = tail_prediction(mixed(law::Pareto{1.5, 1}));
  CHECK(rv2.regime == TailRegime::RV2);
  CHECK(rv2.alpha == 1.5);
  CHECK(rv2.survival(100.5) == doctest::Approx(std::pow(101.0, -1.5)));

  const auto rv3 = tail_prediction(mixed(law::Pareto{1.5, 1}, law::Exponential{1}, law::Pareto{1.5, 1}));
  CHECK(rv3.regime == TailRegime::RV3);

  const auto hk = tail_prediction(hawkes(0.5, law::Pareto{0.7, 1}));
  CHECK(hk.alpha == 0.7);
  CHECK(hk.claim_constant == doctest::Approx(2.0));

  auto constant = mixed(law::Poisson{1});
  constant.claim = claim::Constant{2};
  CHECK(kind_of([&] { tail_prediction(constant); }) == ErrorKind::UnsupportedRegime);
}

TEST_CASE("residue conditions") {
  CHECK(residue_condition_check(mixed(law::Poisson{1}), ResidueRegime::Clt).holds());

  ModelSpec ce;
  ce.marks = MarkLaw{{law::Constant{1}}};
  ce.mechanism = Renewal{law::Constant{1}, law::Pareto{0.4, 1}, {}, {}};
  CHECK(residue_condition_check(ce, ResidueRegime::Clt).verdict == Verdict::Fails);

  for (double kappa : {0.1, 0.5, 0.9})
    CHECK(residue_condition_check(hawkes(kappa), ResidueRegime::Clt).holds());
  CHECK(residue_condition_check(hawkes(0.5, law::Exponential{1}, shape::Lomax{0.3, 1}),
                                ResidueRegime::Clt)
            .verdict == Verdict::Fails);
  CHECK(residue_condition_check(hawkes(0.5, law::Exponential{1}, shape::Lomax{0.8, 1}),
                                ResidueRegime::Clt)
            .holds());

  const auto heavy = mixed(law::Poisson{1}, law::Pareto{0.3, 1}, law::Pareto{1.5, 1});
  CHECK(residue_condition_check(heavy, ResidueRegime::Stable12).verdict == Verdict::Fails);
  const auto ok = mixed(law::Poisson{1}, law::Pareto{1.2, 1}, law::Pareto{1.5, 1});
  CHECK(residue_condition_check(ok, ResidueRegime::Stable12).holds());
}

TEST_CASE("residue mean") {
  const auto s = mixed(law::Poisson{1}, law::Pareto{0.8, 1});
  const double t = 50;
  const auto rm = residue_mean(s, t);
  REQUIRE(rm);
  CHECK(rm->exact);
  std::vector<double> e;
  for (std::uint64_t r = 0; r < 20'000; ++r) {
    RngStream rng(5, r);
    e.push_back(summarize_path(s, t, rng).eps);
  }
  CHECK(within_se(estimate(e), rm->value));

  const auto hb = residue_mean(hawkes(0.5), t);
  REQUIRE(hb);
  CHECK_FALSE(hb->exact);
}

TEST_CASE("integrated survival") {
  CHECK(integrated_survival(law::Exponential{2}, 3) == doctest::Approx(-std::expm1(-6.0) / 2));
  CHECK(integrated_survival(law::Constant{2}, 5) == doctest::Approx(2));
  CHECK(integrated_survival(law::Constant{2}, 1) == doctest::Approx(1));
  const double t = 1e4;
  CHECK(integrated_survival(law::Pareto{0.4, 1}, t) ==
        doctest::Approx(1 + (std::pow(t, 0.6) - 1) / 0.6));
  CHECK(integrated_survival(law::LogNormal{0, 1}, 4) ==
        doctest::Approx(expect(law::LogNormal{0, 1}, [](double w) { return std::min(w, 4.0); }))
            .epsilon(1e-8));
}

TEST_CASE("json field names") {
  const auto j = to_json(compound_moments(mixed(law::Poisson{1})));
  for (const char* k : {"mu_X", "EX2", "EK", "EK2", "kappa", "E_kappaA2", "E_XkappaA", "mu_D", "ED2",
                        "variance_D"})
    CHECK(j.contains(k));
  const auto t = to_json(tail_prediction(hawkes(0.5, law::Pareto{0.7, 1})));
  CHECK(t["regime"] == "RV1");
  CHECK(t.contains("alpha"));
}

}
