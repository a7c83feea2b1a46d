#include <doctest.h>

#include <cmath>
#include <sstream>

#include "claimsim/analytics.hpp"
#include "claimsim/error.hpp"
#include "claimsim/harness.hpp"
#include "support.hpp"

using namespace claimsim;

namespace {

ExperimentConfig base(Regime regime) {
  ExperimentConfig c;
  c.regime = regime;
  c.replications = 400;
  c.horizons = {100, 400};
  c.master_seed = 77;
  return c;
}

ModelSpec mixed(ScalarLaw k, ScalarLaw w, ScalarLaw x) {
  ModelSpec s;
  s.marks = MarkLaw{{x}};
  s.mechanism = MixedBinomial{k, w, {}, {}};
  return s;
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

void check_consistent(const GoFReport& r) {
  for (const auto& c : r.checks) {
    CHECK(evaluate(c) == c.pass);
    if (c.name.find("ks") != std::string::npos && c.name.find("change") == std::string::npos)
      CHECK(c.statistic >= 0);
  }
  for (const auto& h : r.horizons)
    for (const auto& [k, v] : h.values)
      if (k.find("ks") != std::string::npos || k.find("deviation") != std::string::npos)
        CHECK(v >= 0);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("poisson sanity case of the clt") {
  auto c = base(Regime::Clt);
  c.spec = mixed(law::Constant{0}, law::Exponential{1}, law::Constant{1});
  c.horizons = {2000};
  c.replications = 10'000;
  const auto r = run_clt(c);
  CHECK(r.label == "theorem-applies");
  CHECK(r.passed());
  CHECK(r.horizons.back().values.at("ks_distance") < 0.03);
  check_consistent(r);
}

TEST_CASE("reports are deterministic and thread invariant") {
  auto c = base(Regime::Clt);
  Hawkes h;
  h.fertility.kappa = fertility::Constant{0.5};
  c.spec.mechanism = h;
  c.keep_raw = true;
  const auto a = to_json(run_experiment(c)).dump();
  const auto b = to_json(run_experiment(c)).dump();
  c.threads = 4;
  const auto r = run_experiment(c);
  CHECK(a == b);
  CHECK(a == to_json(r).dump());
  std::ostringstream csv;
  write_raw_csv(r, csv);
  CHECK(csv.str().rfind("replication,horizon,S_t,eps_t,tau_t,standardized\r\n", 0) == 0);
  CHECK(r.raw.size() == 800);
  c.master_seed = 78;
  CHECK(to_json(run_experiment(c)).dump() != a);
}

TEST_CASE("stationary clt reports truncation diagnostics") {
  auto c = base(Regime::Clt);
  Hawkes h;
  h.fertility.kappa = fertility::Constant{0.5};
  c.spec.mechanism = h;
  c.stationary = true;
  c.burnin = 100;
  const auto r = run_clt(c);
  CHECK(r.horizons[0].values.count("truncation_bias") == 1);
  CHECK(r.horizons[0].values.count("eps_star_mean") == 1);
}

TEST_CASE("stable12 outside hypotheses") {
  auto c = base(Regime::Stable12);
  c.spec = mixed(law::Poisson{1}, law::Pareto{0.3, 1}, law::Pareto{1.5, 1});
  const auto r = run_stable_12(c);
  CHECK(r.label == "outside-hypotheses");
  CHECK_FALSE(r.binding());
  check_consistent(r);
}

TEST_CASE("stable12 on a renewal model") {
  auto c = base(Regime::Stable12);
  c.spec = mixed(law::Geometric{0.5}, law::Exponential{1}, law::Pareto{1.5, 1});
  c.spec.mechanism = Renewal{law::Geometric{0.5}, law::Exponential{1}, {}, {}};
  c.replications = 2000;
  c.horizons = {1000};
  const auto r = run_stable_12(c);
  CHECK(r.label == "theorem-applies");
  CHECK(r.passed());
}

TEST_CASE("stable01 needs regular variation") {
  auto c = base(Regime::Stable01);
  c.spec = mixed(law::Poisson{1}, law::Exponential{1}, law::Exponential{1});
  c.spec.claim = claim::Constant{2};
  CHECK(kind_of([&] { run_stable_01(c); }) == ErrorKind::UnsupportedRegime);
}

TEST_CASE("stable01 laplace deviations") {
  auto c = base(Regime::Stable01);
  c.spec = mixed(law::Poisson{1}, law::Exponential{1}, law::Pareto{0.7, 1});
  c.replications = 2000;
  c.horizons = {1000};
  const auto r = run_stable_01(c);
  CHECK(r.label == "theorem-applies");
  CHECK(r.horizons[0].values.at("max_laplace_deviation") < 0.05);
  check_consistent(r);
}

TEST_CASE("subordinator preconditions and degenerate renewal") {
  auto c = base(Regime::Subordinator);
  c.subordinator.w = law::Pareto{0.8, 1};
  CHECK(kind_of([&] { run_subordinator(c); }) == ErrorKind::Precondition);
  c.subordinator.w = law::Exponential{1};
  c.subordinator.y = law::Pareto{1.5, 1};
  CHECK(kind_of([&] { run_subordinator(c); }) == ErrorKind::UnsupportedRegime);

  const ScalarLaw y = law::Pareto{0.5, 1};
  for (std::uint64_t r = 0; r < 50; ++r) {
    RngStream a(1, r), b(1, r);
    const auto v = subordinated_sums(y, law::Constant{1}, {250.5, 1000.0}, a);
    const auto d = direct_sums(y, {250, 1000}, b);
    CHECK(v == d);
  }
}

TEST_CASE("subordinator run") {
  auto c = base(Regime::Subordinator);
  c.horizons = {2000};
  c.replications = 2000;
  const auto r = run_subordinator(c);
  CHECK(r.horizons[0].values.at("monotonicity_violations") == 0);
  check_consistent(r);
}

TEST_CASE("counterexample preconditions") {
  auto c = base(Regime::Counterexample);
  c.spec.marks = MarkLaw{{law::Constant{1}}};
  c.spec.mechanism = Renewal{law::Constant{1}, law::Pareto{0.6, 1}, {}, {}};
  CHECK(kind_of([&] { run_counterexample(c); }) == ErrorKind::Config);
  c.spec.mechanism = Renewal{law::Constant{2}, law::Pareto{0.4, 1}, {}, {}};
  CHECK(kind_of([&] { run_counterexample(c); }) == ErrorKind::Config);
  c.spec.mechanism = Renewal{law::Constant{1}, law::Pareto{0.4, 1}, {}, {}};
  c.spec.marks = MarkLaw{{law::Exponential{1}}};
  CHECK(kind_of([&] { run_counterexample(c); }) == ErrorKind::Config);
}

TEST_CASE("counterexample growth") {
  auto c = base(Regime::Counterexample);
  c.spec.marks = MarkLaw{{law::Constant{1}}};
  c.spec.mechanism = Renewal{law::Constant{1}, law::Pareto{0.4, 1}, {}, {}};
  c.horizons = {1e3, 1e4};
  c.replications = 1000;
  const auto r = run_counterexample(c);
  CHECK(r.label == "counterexample");
  CHECK(r.horizons[1].values.at("eps_mean_over_sqrt_t") > r.horizons[0].values.at("eps_mean_over_sqrt_t"));
  const double exact = r.horizons[1].values.at("integrated_survival");
  CHECK(std::abs(r.horizons[1].values.at("eps_mean") - exact) <= 3 * r.horizons[1].values.at("eps_se"));
}

TEST_CASE("residue scaling") {
  auto c = base(Regime::ResidueScaling);
  c.spec = mixed(law::Constant{0}, law::Exponential{1}, law::Exponential{1});
  auto r = run_residue_scaling(c);
  for (const auto& h : r.horizons) CHECK(h.mean == 0);
  CHECK(r.passed());

  Hawkes h;
  h.fertility.kappa = fertility::Constant{0.5};
  c.spec = ModelSpec{};
  c.spec.mechanism = h;
  c.horizons = {50, 200, 800};
  r = run_residue_scaling(c);
  CHECK(r.passed());
  for (const auto& hs : r.horizons) CHECK(hs.values.count("analytic_bound") == 1);

  c.spec = mixed(law::Poisson{1}, law::Pareto{1.2, 1}, law::Pareto{1.5, 1});
  c.horizons = {100, 10'000};
  c.replications = 1000;
  r = run_residue_scaling(c);
  CHECK(r.label == "theorem-applies");
  CHECK(r.horizons[1].values.at("normalized_mean") < r.horizons[0].values.at("normalized_mean"));
  CHECK(r.passed());
}

TEST_CASE("oracle coherence on a light-tailed model") {
  auto c = base(Regime::Clt);
  c.spec = mixed(law::Poisson{1}, law::Exponential{1}, law::Exponential{1});
  c.horizons = {1000};
  c.replications = 2000;
  const auto clt = run_clt(c);
  const auto m = compound_moments(c.spec);
  std::vector<double> oracle;
  Cluster buf;
  std::vector<double> a(1);
  for (std::uint64_t r = 0; r < 2000; ++r) {
    RngStream rng(5, r);
    const auto n = sample_poisson(1000, rng);
    double s = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      sample_mark(c.spec.marks, rng, a);
      simulate_cluster_into(buf, c.spec.mechanism, c.spec.marks, c.spec.claim, a, rng);
      s += buf.D;
    }
    oracle.push_back((s - 1000 * m.mu_D) / std::sqrt(1000 * m.ED2));
  }
  const bool oracle_rejects = ks_statistic(oracle, normal_cdf) > ks_critical(oracle.size());
  const bool clt_rejects = clt.horizons[0].values.at("rejected") == 1.0;
  CHECK_FALSE((oracle_rejects && clt_rejects));
}

TEST_CASE("config validation") {
  auto c = base(Regime::Clt);
  c.replications = 50;
  CHECK(kind_of([&] { validate(c); }) == ErrorKind::Config);
  c = base(Regime::Clt);
  c.horizons = {500, 100};
  CHECK(kind_of([&] { validate(c); }) == ErrorKind::Config);
  c = base(Regime::Clt);
  c.stationary = true;
  CHECK(kind_of([&] { validate(c); }) == ErrorKind::Config);
  CHECK(parse_regime("Stable12") == Regime::Stable12);
  CHECK(parse_regime("CLT") == Regime::Clt);
  CHECK(kind_of([] { parse_regime("gaussian"); }) == ErrorKind::Config);
}

}
