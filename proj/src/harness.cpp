#include "claimsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "claimsim/analytics.hpp"
#include "claimsim/error.hpp"
#include "claimsim/normalizing.hpp"
#include "claimsim/numeric.hpp"
#include "claimsim/parallel.hpp"
#include "claimsim/stable.hpp"
#include "claimsim/stats.hpp"
#include "csv.hpp"
#include "util.hpp"

namespace claimsim {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::string label_of(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "theorem-applies";
    case Verdict::Fails: return "outside-hypotheses";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

void add_check(GoFReport& rep, std::string name, double horizon, double statistic,
               const std::string& relation, double threshold, bool informational = false) {
  Check c{std::move(name), horizon, statistic, threshold, relation, false, informational};
  c.pass = evaluate(c);
  rep.checks.push_back(std::move(c));
}

HorizonStats describe(double t, std::span<const double> z) {
  HorizonStats h;
  h.t = t;
  h.replications = z.size();
  h.mean = mean(z);
  h.variance = z.size() > 1 ? variance(z) : 0.0;
  h.standard_error = z.size() > 1 ? standard_error(z) : 0.0;
  return h;
}

std::vector<PathSummary> simulate_summaries(const ExperimentConfig& c, std::size_t h) {
  std::vector<PathSummary> out(c.replications);
  const double t = c.horizons[h];
  const double burnin = c.stationary ? c.burnin : 0.0;
  parallel_for(c.replications, c.threads, [&](std::size_t r) {
    RngStream rng(c.master_seed, stream_id(purpose::kPaths, h, r));
    out[r] = summarize_path(c.spec, t, rng, burnin);
  });
  return out;
}

void keep_raw(GoFReport& rep, const ExperimentConfig& c, double t,
              const std::vector<PathSummary>& paths, std::span<const double> z) {
  if (!c.keep_raw) return;
  for (std::size_t r = 0; r < paths.size(); ++r)
    rep.raw.push_back({r, t, paths[r].S, paths[r].eps, paths[r].tau, z[r]});
}

double cluster_total_draw(const ModelSpec& spec, RngStream& rng, Cluster& buf,
                          std::vector<double>& mark) {
  sample_mark(spec.marks, rng, mark);
  simulate_cluster_into(buf, spec.mechanism, spec.marks, spec.claim, mark, rng, spec.node_cap);
  return spec.include_immigrant_claims ? buf.D : buf.D - buf.ancestor_claim;
}

/// Sum of n i.i.d. cluster totals.
double cluster_sum(const ModelSpec& spec, std::uint64_t n, RngStream& rng) {
  Cluster buf;
  std::vector<double> mark(spec.marks.coordinates.size());
  CompensatedSum s;
  for (std::uint64_t i = 0; i < n; ++i) s += cluster_total_draw(spec, rng, buf, mark);
  return s.value();
}

// Smallest positive bracket for normalizing_a.
constexpr double kTinyLower = 1e-9;

struct TailSource {
  TailFunction tail;
  double alpha = 0;
  bool empirical = false;
  json analytics;
};

TailSource tail_source(const ExperimentConfig& c, GoFReport& rep) {
  TailSource src;
  try {
    const auto tp = tail_prediction(c.spec);
    src.tail = [tp](double x) { return tp.survival(x); };
    src.alpha = tp.alpha;
    src.analytics = to_json(tp);
    return src;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnsupportedParameterization) throw;
    rep.notes.push_back(std::string("analytic tail unavailable: ") + e.what());
  }
  std::vector<double> d(c.empirical_tail_samples);
  const std::size_t chunk = 10000;
  const std::size_t chunks = (d.size() + chunk - 1) / chunk;
  parallel_for(chunks, c.threads, [&](std::size_t k) {
    RngStream rng(c.master_seed, stream_id(purpose::kEmpiricalTail, 0, k));
    Cluster buf;
    std::vector<double> mark(c.spec.marks.coordinates.size());
    for (std::size_t i = k * chunk; i < std::min(d.size(), (k + 1) * chunk); ++i)
      d[i] = cluster_total_draw(c.spec, rng, buf, mark);
  });
  auto emp = std::make_shared<EmpiricalTail>(std::move(d));
  src.tail = [emp](double x) { return (*emp)(x); };
  src.empirical = true;
  rep.notes.push_back("normalizing constants from the empirical tail of " +
                      std::to_string(c.empirical_tail_samples) + " simulated cluster totals");
  return src;
}

double tail_lower(const TailFunction& tail, double n) {
  double lo = kTinyLower;
  while (n * tail(lo) < 1 && lo > 1e-300) lo *= 1e-3;
  return lo;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Clt: return "clt";
    case Regime::Stable12: return "stable12";
    case Regime::Stable01: return "stable01";
    case Regime::Subordinator: return "subordinator";
    case Regime::Counterexample: return "counterexample";
    case Regime::ResidueScaling: return "residue_scaling";
  }
  return "?";
}

Regime parse_regime(const std::string& name) {
  const std::string n = lower(name);
  for (Regime r : {Regime::Clt, Regime::Stable12, Regime::Stable01, Regime::Subordinator,
                   Regime::Counterexample, Regime::ResidueScaling})
    if (n == to_string(r)) return r;
  if (n == "residuescaling" || n == "residue-scaling") return Regime::ResidueScaling;
  fail(ErrorKind::Config, "unknown regime '" + name +
                              "' (expected clt, stable12, stable01, subordinator, "
                              "counterexample or residue_scaling)");
}

void validate(const ExperimentConfig& c) {
  validate(c.spec);
  require(c.replications >= 100, ErrorKind::Config, "replications must be >= 100");
  require(!c.horizons.empty(), ErrorKind::Config, "horizons must not be empty");
  for (std::size_t i = 0; i < c.horizons.size(); ++i) {
    require(std::isfinite(c.horizons[i]) && c.horizons[i] > 0, ErrorKind::Config,
            "horizons must be positive");
    if (i > 0)
      require(c.horizons[i] > c.horizons[i - 1], ErrorKind::Config,
              "horizons must be increasing");
  }
  require(c.horizons.size() <= 0xFFFF, ErrorKind::Config, "too many horizons");
  require(c.replications < (std::uint64_t{1} << 40), ErrorKind::Config,
          "replications must be < 2^40");
  if (c.stationary)
    require(c.burnin > 0 && std::isfinite(c.burnin), ErrorKind::Config,
            "stationary runs need a positive burnin");
  require(!c.lambda_grid.empty(), ErrorKind::Config, "lambda grid must not be empty");
  for (double l : c.lambda_grid)
    require(l > 0 && std::isfinite(l), ErrorKind::Config, "lambda grid must be positive");
  const auto& sub = c.subordinator;
  require(!sub.s_grid.empty(), ErrorKind::Config, "s grid must not be empty");
  for (std::size_t i = 0; i < sub.s_grid.size(); ++i) {
    require(sub.s_grid[i] > 0 && sub.s_grid[i] <= 1, ErrorKind::Config,
            "s grid values must lie in (0, 1]");
    if (i > 0)
      require(sub.s_grid[i] > sub.s_grid[i - 1], ErrorKind::Config,
              "s grid must be increasing");
  }
  require(sub.s_grid.back() == 1.0, ErrorKind::Config, "s grid must end at 1");
  require(std::find(sub.s_grid.begin(), sub.s_grid.end(), sub.ratio_s) != sub.s_grid.end(),
          ErrorKind::Config, "ratio_s must be one of the s grid values");
  const auto& tol = c.tol;
  for (double v : {tol.ks, tol.laplace, tol.quantile_ratio, tol.uncorrected_ks, tol.growth_ratio})
    require(v > 0 && std::isfinite(v), ErrorKind::Config, "tolerances must be positive");
  require(tol.significance > 0 && tol.significance < 1, ErrorKind::Config,
          "significance must lie in (0, 1)");
  require(c.pilot_clusters >= 1, ErrorKind::Config, "pilot_clusters must be >= 1");
  require(c.empirical_tail_samples >= 1000, ErrorKind::Config,
          "empirical_tail_samples must be >= 1000");
}

bool evaluate(const Check& c) {
  if (std::isnan(c.statistic)) return false;
  if (c.relation == "<") return c.statistic < c.threshold;
  if (c.relation == "<=") return c.statistic <= c.threshold;
  if (c.relation == ">") return c.statistic > c.threshold;
  if (c.relation == ">=") return c.statistic >= c.threshold;
  return false;
}

bool GoFReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.informational || c.pass; });
}

json to_json(const GoFReport& rep, bool with_timing) {
  json j;
  j["regime"] = to_string(rep.regime);
  j["label"] = rep.label;
  j["passed"] = rep.passed();
  j["notes"] = rep.notes;
  j["analytics"] = rep.analytics;
  json hs = json::array();
  for (const auto& h : rep.horizons) {
    json o;
    o["t"] = h.t;
    o["replications"] = h.replications;
    o["mean"] = num(h.mean);
    o["variance"] = num(h.variance);
    o["standard_error"] = num(h.standard_error);
    json v = json::object();
    for (const auto& [k, x] : h.values) v[k] = num(x);
    o["values"] = v;
    hs.push_back(o);
  }
  j["horizons"] = hs;
  json cs = json::array();
  for (const auto& c : rep.checks) {
    json o;
    o["name"] = c.name;
    o["horizon"] = c.horizon;
    o["statistic"] = num(c.statistic);
    o["relation"] = c.relation;
    o["threshold"] = num(c.threshold);
    o["pass"] = c.pass;
    o["informational"] = c.informational;
    cs.push_back(o);
  }
  j["checks"] = cs;
  if (with_timing) j["wall_clock_seconds"] = rep.wall_clock_seconds;
  return j;
}

void write_raw_csv(const GoFReport& rep, std::ostream& os) {
  detail::CsvWriter w(os);
  w.row({"replication", "horizon", "S_t", "eps_t", "tau_t", "standardized"});
  for (const auto& r : rep.raw) {
    const auto a = std::to_string(r.replication), b = detail::fmt(r.horizon),
               c = detail::fmt(r.S), d = detail::fmt(r.eps), e = std::to_string(r.tau),
               f = detail::fmt(r.standardized);
    w.row({a, b, c, d, e, f});
  }
}

GoFReport run_experiment(const ExperimentConfig& c) {
  switch (c.regime) {
    case Regime::Clt: return run_clt(c);
    case Regime::Stable12: return run_stable_12(c);
    case Regime::Stable01: return run_stable_01(c);
    case Regime::Subordinator: return run_subordinator(c);
    case Regime::Counterexample: return run_counterexample(c);
    case Regime::ResidueScaling: return run_residue_scaling(c);
  }
  fail(ErrorKind::Config, "unknown regime");
}

GoFReport run_clt(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  GoFReport rep;
  rep.regime = Regime::Clt;
  const auto moments = compound_moments(c.spec);
  const auto cond = residue_condition_check(c.spec, ResidueRegime::Clt);
  rep.label = label_of(cond.verdict);
  rep.notes.push_back(cond.condition + ": " + cond.detail);
  rep.analytics["moments"] = to_json(moments);
  rep.analytics["residue_condition"] = to_json(cond);

  const double nu = c.spec.nu;
  for (std::size_t h = 0; h < c.horizons.size(); ++h) {
    const double t = c.horizons[h];
    const auto paths = simulate_summaries(c, h);
    const double centre = t * nu * moments.mu_D;
    const double scale = std::sqrt(t * nu * moments.ED2);
    std::vector<double> z(paths.size());
    for (std::size_t r = 0; r < z.size(); ++r) z[r] = (paths[r].S - centre) / scale;

    auto hs = describe(t, z);
    const double ks = ks_statistic(z, normal_cdf);
    const double crit = ks_critical(z.size(), c.tol.significance);
    hs.values["ks_distance"] = ks;
    hs.values["ks_critical"] = crit;
    hs.values["rejected"] = ks > crit ? 1.0 : 0.0;
    std::vector<double> eps(paths.size());
    for (std::size_t r = 0; r < eps.size(); ++r) eps[r] = paths[r].eps;
    hs.values["eps_mean"] = mean(eps);
    if (c.stationary) {
      std::vector<double> a(paths.size()), b(paths.size());
      for (std::size_t r = 0; r < a.size(); ++r) {
        a[r] = paths[r].eps_star;
        b[r] = paths[r].eps_tilde;
      }
      hs.values["eps_star_mean"] = mean(a);
      hs.values["eps_tilde_mean"] = mean(b);
      RngStream rng(c.master_seed, stream_id(purpose::kPilot, h, 0));
      hs.values["truncation_bias"] =
          truncation_bias_estimate(c.spec, t, c.burnin, c.pilot_clusters, rng);
    }
    rep.horizons.push_back(hs);
    const bool last = h + 1 == c.horizons.size();
    add_check(rep, "ks_vs_normal_1pct", t, ks, "<=", crit, true);
    add_check(rep, "ks_vs_normal", t, ks, "<", c.tol.ks, !last);
    keep_raw(rep, c, t, paths, z);
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

GoFReport run_stable_12(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  GoFReport rep;
  rep.regime = Regime::Stable12;
  const auto src = tail_source(c, rep);
  if (!src.empirical)
    require(src.alpha > 1 && src.alpha < 2, ErrorKind::UnsupportedRegime,
            "cluster totals have tail index " + detail::fmt(src.alpha) + ", not in (1, 2)");
  const double mu_D = cluster_mean(c.spec);
  const auto cond = residue_condition_check(c.spec, ResidueRegime::Stable12);
  rep.label = label_of(cond.verdict);
  rep.notes.push_back(cond.condition + ": " + cond.detail);
  if (!src.empirical) rep.analytics["tail"] = src.analytics;
  rep.analytics["mu_D"] = mu_D;
  rep.analytics["residue_condition"] = to_json(cond);
  const std::uint64_t m = c.oracle_replications ? c.oracle_replications : c.replications;

  const double nu = c.spec.nu;
  for (std::size_t h = 0; h < c.horizons.size(); ++h) {
    const double t = c.horizons[h];
    const double n = nu * t;
    require(n >= 1, ErrorKind::Config, "nu * t must be >= 1");
    const double a = normalizing_a(src.tail, n, tail_lower(src.tail, n));
    const auto paths = simulate_summaries(c, h);
    std::vector<double> z(paths.size());
    for (std::size_t r = 0; r < z.size(); ++r) z[r] = (paths[r].S - n * mu_D) / a;

    // Poisson(nu t) many i.i.d. cluster totals.
    std::vector<double> oracle(m);
    parallel_for(m, c.threads, [&](std::size_t r) {
      RngStream rng(c.master_seed, stream_id(purpose::kOracle, h, r));
      const auto count = sample_poisson(n, rng);
      oracle[r] = (cluster_sum(c.spec, count, rng) - n * mu_D) / a;
    });
    // floor(nu t) i.i.d. cluster totals.
    const auto n_fixed = static_cast<std::uint64_t>(std::floor(n));
    const double a_fixed =
        normalizing_a(src.tail, static_cast<double>(n_fixed), tail_lower(src.tail, n_fixed));
    std::vector<double> fixed(m);
    parallel_for(m, c.threads, [&](std::size_t r) {
      RngStream rng(c.master_seed, stream_id(purpose::kFixedOracle, h, r));
      fixed[r] = (cluster_sum(c.spec, n_fixed, rng) - static_cast<double>(n_fixed) * mu_D) /
                 a_fixed;
    });

    auto hs = describe(t, z);
    const double ks = ks_two_sample(z, oracle);
    const double ks_fixed = ks_two_sample(z, fixed);
    const double crit = ks_two_sample_critical(z.size(), m, c.tol.significance);
    hs.values["a"] = a;
    hs.values["a_fixed_n"] = a_fixed;
    hs.values["ks_two_sample"] = ks;
    hs.values["ks_two_sample_fixed_n"] = ks_fixed;
    hs.values["ks_critical"] = crit;
    hs.values["rejected"] = ks > crit ? 1.0 : 0.0;
    hs.values["oracle_median"] = median(oracle);
    hs.values["median"] = median(z);
    rep.horizons.push_back(hs);
    const bool last = h + 1 == c.horizons.size();
    add_check(rep, "ks_vs_poisson_oracle", t, ks, "<=", crit, !last);
    add_check(rep, "ks_vs_fixed_n_oracle", t, ks_fixed, "<=", crit, true);
    keep_raw(rep, c, t, paths, z);
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

GoFReport run_stable_01(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  GoFReport rep;
  rep.regime = Regime::Stable01;
  const auto tp = tail_prediction(c.spec);
  require(tp.alpha > 0 && tp.alpha < 1, ErrorKind::UnsupportedRegime,
          "cluster totals have tail index " + detail::fmt(tp.alpha) + ", not in (0, 1)");
  const auto cond = residue_condition_check(c.spec, ResidueRegime::Stable01);
  rep.label = label_of(cond.verdict);
  rep.notes.push_back(cond.condition + ": " + cond.detail);
  rep.analytics["tail"] = to_json(tp);
  rep.analytics["residue_condition"] = to_json(cond);

  // Normalize by the claim tail and weight the limit by the tail constant when
  // the count does not contribute; otherwise normalize by the full tail.
  const bool by_claim = tp.count_constant == 0;
  const double constant = by_claim ? tp.claim_constant : 1.0;
  TailFunction tail = by_claim ? TailFunction([&](double x) { return claim_survival(c.spec, x); })
                               : TailFunction([&](double x) { return tp.survival(x); });
  rep.analytics["normalization"] = by_claim ? "claim tail" : "cluster-total tail";
  rep.analytics["limit_constant"] = constant;

  for (std::size_t h = 0; h < c.horizons.size(); ++h) {
    const double t = c.horizons[h];
    const double n = c.spec.nu * t;
    require(n >= 1, ErrorKind::Config, "nu * t must be >= 1");
    const double a = normalizing_a(tail, n, tail_lower(tail, n));
    const auto paths = simulate_summaries(c, h);
    std::vector<double> z(paths.size());
    for (std::size_t r = 0; r < z.size(); ++r) z[r] = paths[r].S / a;

    auto hs = describe(t, z);
    hs.values["a"] = a;
    double worst = 0;
    for (double lambda : c.lambda_grid) {
      const auto est = empirical_laplace(z, lambda);
      const double target = std::exp(-constant * std::tgamma(1 - tp.alpha) *
                                     std::pow(lambda, tp.alpha));
      const double dev = std::abs(est.value - target);
      const std::string key = "lambda_" + detail::fmt(lambda);
      hs.values[key + "_empirical"] = est.value;
      hs.values[key + "_se"] = est.standard_error;
      hs.values[key + "_limit"] = target;
      worst = std::max(worst, dev);
    }
    hs.values["max_laplace_deviation"] = worst;
    rep.horizons.push_back(hs);
    add_check(rep, "max_laplace_deviation", t, worst, "<", c.tol.laplace,
              h + 1 != c.horizons.size());
    keep_raw(rep, c, t, paths, z);
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

std::vector<double> subordinated_sums(const ScalarLaw& y, const ScalarLaw& w,
                                      const std::vector<double>& u, RngStream& rng) {
  std::vector<double> out(u.size());
  CompensatedSum v;
  double epoch = 0;
  std::size_t next = 0;
  while (next < u.size()) {
    epoch += sample(w, rng);
    const double jump = sample(y, rng);
    while (next < u.size() && epoch > u[next]) out[next++] = v.value();
    v += jump;
  }
  return out;
}

std::vector<double> direct_sums(const ScalarLaw& y, const std::vector<std::uint64_t>& n,
                                RngStream& rng) {
  std::vector<double> out(n.size());
  CompensatedSum v;
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (; k < n[i]; ++k) v += sample(y, rng);
    out[i] = v.value();
  }
  return out;
}

GoFReport run_subordinator(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  const auto& sub = c.subordinator;
  validate(sub.y);
  validate(sub.w);
  const auto alpha = tail_index(sub.y);
  require(alpha && *alpha > 0 && *alpha < 1, ErrorKind::UnsupportedRegime,
          "jump law " + to_string(sub.y) + " is not regularly varying with index in (0, 1)");
  require(moment_exists(sub.w, 1), ErrorKind::Precondition,
          "moment condition E W < inf fails for " + to_string(sub.w));
  require(support_min(sub.w) >= 0 && support_min(sub.y) >= 0, ErrorKind::Precondition,
          "jumps and waiting times must be nonnegative");
  const double ew = moment(sub.w, 1);
  require(ew > 0, ErrorKind::Precondition, "E W must be positive");
  const double nu = 1 / ew;

  GoFReport rep;
  rep.regime = Regime::Subordinator;
  rep.label = "theorem-applies";
  rep.analytics["alpha"] = *alpha;
  rep.analytics["renewal_rate"] = nu;
  rep.analytics["jump_law"] = to_string(sub.y);
  rep.analytics["waiting_law"] = to_string(sub.w);

  const TailFunction tail = [&](double x) { return survival(sub.y, x); };
  const std::size_t ns = sub.s_grid.size();
  for (std::size_t h = 0; h < c.horizons.size(); ++h) {
    const double t = c.horizons[h];
    require(nu * t >= 1, ErrorKind::Config, "t / E W must be >= 1");
    const double a = normalizing_a(tail, nu * t, tail_lower(tail, nu * t));
    std::vector<double> u(ns);
    std::vector<std::uint64_t> counts(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      u[i] = t * sub.s_grid[i];
      counts[i] = static_cast<std::uint64_t>(std::floor(nu * t * sub.s_grid[i]));
    }
    const std::size_t R = c.replications;
    std::vector<std::vector<double>> vs(ns, std::vector<double>(R)), ds = vs;
    parallel_for(R, c.threads, [&](std::size_t r) {
      RngStream r1(c.master_seed, stream_id(purpose::kSubordinated, h, r));
      RngStream r2(c.master_seed, stream_id(purpose::kDirect, h, r));
      const auto v = subordinated_sums(sub.y, sub.w, u, r1);
      const auto d = direct_sums(sub.y, counts, r2);
      for (std::size_t i = 0; i < ns; ++i) {
        vs[i][r] = v[i] / a;
        ds[i][r] = d[i] / a;
      }
    });

    std::uint64_t violations = 0;
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t i = 1; i < ns; ++i)
        if (vs[i][r] < vs[i - 1][r]) ++violations;

    auto hs = describe(t, vs.back());
    hs.values["a"] = a;
    hs.values["monotonicity_violations"] = static_cast<double>(violations);
    const double crit = ks_two_sample_critical(R, R, c.tol.significance);
    hs.values["ks_critical"] = crit;
    const double ref = median(vs.back());
    for (std::size_t i = 0; i < ns; ++i) {
      const double s = sub.s_grid[i];
      const std::string key = "s_" + detail::fmt(s);
      const double ks = ks_two_sample(vs[i], ds[i]);
      hs.values[key + "_ks_two_sample"] = ks;
      add_check(rep, "marginal_ks_s=" + detail::fmt(s), t, ks, "<=", crit);
      const double ratio = median(vs[i]) / ref;
      const double expected = std::pow(s, 1 / *alpha);
      hs.values[key + "_median_ratio"] = ratio;
      hs.values[key + "_median_ratio_limit"] = expected;
      if (s != 1.0)
        add_check(rep, "quantile_ratio_s=" + detail::fmt(s), t,
                  std::abs(ratio / expected - 1), "<", c.tol.quantile_ratio, s != sub.ratio_s);
    }
    add_check(rep, "monotone_paths", t, static_cast<double>(violations), "<=", 0);
    rep.horizons.push_back(hs);
    if (c.keep_raw)
      for (std::size_t r = 0; r < R; ++r)
        rep.raw.push_back({r, t, vs.back()[r] * a, 0.0, 0, vs.back()[r]});
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

GoFReport run_counterexample(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  const auto* ren = std::get_if<Renewal>(&c.spec.mechanism);
  require(ren != nullptr, ErrorKind::Config, "the counterexample regime needs a renewal model");
  require(!ren->count_link && !ren->wait_link, ErrorKind::Config,
          "the counterexample regime needs unlinked count and waiting laws");
  const auto* k = std::get_if<law::Constant>(&ren->count);
  require(k && std::floor(k->value) == 1, ErrorKind::Config,
          "the counterexample regime needs K = 1");
  require(claim_moment(c.spec, 1) == 1 && claim_moment(c.spec, 2) == 1, ErrorKind::Config,
          "the counterexample regime needs X = 1");
  require(c.spec.include_immigrant_claims, ErrorKind::Config,
          "the counterexample regime needs immigrant claims");
  const auto* w = std::get_if<law::Pareto>(&ren->wait);
  require(w && w->alpha < 0.5, ErrorKind::Config,
          "the counterexample regime needs W ~ Pareto with alpha < 1/2");

  GoFReport rep;
  rep.regime = Regime::Counterexample;
  rep.label = "counterexample";
  const auto moments = compound_moments(c.spec);
  const auto cond = residue_condition_check(c.spec, ResidueRegime::Clt);
  rep.notes.push_back(cond.condition + ": " + cond.detail);
  rep.analytics["moments"] = to_json(moments);
  rep.analytics["residue_condition"] = to_json(cond);

  const double nu = c.spec.nu, aw = w->alpha, xm = w->scale;
  // E[W 1{W < t}] for the Pareto law.
  auto truncated_mean = [&](double t) {
    if (t <= xm) return 0.0;
    return aw * std::pow(xm, aw) * (std::pow(t, 1 - aw) - std::pow(xm, 1 - aw)) / (1 - aw);
  };

  std::vector<double> scaled_means;
  std::vector<double> means;
  for (std::size_t h = 0; h < c.horizons.size(); ++h) {
    const double t = c.horizons[h];
    const auto paths = simulate_summaries(c, h);
    const std::size_t R = paths.size();
    std::vector<double> eps(R);
    std::vector<std::uint64_t> counts(R);
    for (std::size_t r = 0; r < R; ++r) {
      eps[r] = paths[r].eps;
      counts[r] = static_cast<std::uint64_t>(std::llround(paths[r].eps));
    }
    const double stated = nu * truncated_mean(t);
    const double exact = nu * integrated_survival(ren->wait, t);
    const double scale = std::sqrt(t * nu * moments.ED2);
    const double centre = t * nu * moments.mu_D;
    std::vector<double> zc(R), zu(R), ze(R);
    for (std::size_t r = 0; r < R; ++r) {
      zu[r] = (paths[r].S - centre) / scale;
      zc[r] = (paths[r].S - centre + stated) / scale;
      ze[r] = (paths[r].S - centre + exact) / scale;
    }

    auto hs = describe(t, zc);
    const double em = mean(eps), se = standard_error(eps);
    hs.values["eps_mean"] = em;
    hs.values["eps_se"] = se;
    hs.values["eps_variance"] = variance(eps);
    hs.values["eps_mean_over_sqrt_t"] = em / std::sqrt(t);
    hs.values["truncated_mean"] = stated;
    hs.values["integrated_survival"] = exact;
    const auto gof = poisson_gof(counts, stated);
    const auto gof_exact = poisson_gof(counts, exact);
    hs.values["poisson_gof_p"] = gof.p_value;
    hs.values["poisson_gof_statistic"] = gof.statistic;
    hs.values["poisson_gof_p_integrated_survival"] = gof_exact.p_value;
    const double ks_c = ks_statistic(zc, normal_cdf), ks_u = ks_statistic(zu, normal_cdf),
                 ks_e = ks_statistic(ze, normal_cdf);
    hs.values["ks_corrected"] = ks_c;
    hs.values["ks_uncorrected"] = ks_u;
    hs.values["ks_corrected_integrated_survival"] = ks_e;
    rep.horizons.push_back(hs);

    add_check(rep, "eps_mean_vs_truncated_mean_se", t, std::abs(em - stated) / se, "<", 3.0);
    add_check(rep, "eps_mean_vs_integrated_survival_se", t, std::abs(em - exact) / se, "<", 3.0,
              true);
    add_check(rep, "poisson_gof_truncated_mean_p", t, gof.p_value, ">=", c.tol.significance);
    add_check(rep, "poisson_gof_integrated_survival_p", t, gof_exact.p_value, ">=",
              c.tol.significance, true);
    if (!means.empty()) {
      add_check(rep, "eps_over_sqrt_t_increase", t, em / std::sqrt(t) - scaled_means.back(), ">",
                0.0);
      const double growth = std::pow(t / c.horizons[h - 1], 1 - aw);
      add_check(rep, "eps_mean_growth_ratio_error", t, std::abs(em / means.back() / growth - 1),
                "<", c.tol.growth_ratio);
    }
    if (h + 1 == c.horizons.size()) {
      add_check(rep, "ks_corrected_truncated_mean", t, ks_c, "<", c.tol.ks);
      add_check(rep, "ks_uncorrected", t, ks_u, ">", c.tol.uncorrected_ks);
      add_check(rep, "ks_corrected_integrated_survival", t, ks_e, "<", c.tol.ks, true);
    }
    means.push_back(em);
    scaled_means.push_back(em / std::sqrt(t));
    keep_raw(rep, c, t, paths, zc);
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

GoFReport run_residue_scaling(const ExperimentConfig& c) {
  validate(c);
  const auto start = Clock::now();
  GoFReport rep;
  rep.regime = Regime::ResidueScaling;

  // Normalize by a_t when the cluster total is heavy tailed, by sqrt(t) otherwise.
  std::optional<TailPrediction> tp;
  try {
    tp = tail_prediction(c.spec);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnsupportedRegime &&
        e.kind() != ErrorKind::UnsupportedParameterization)
      throw;
    rep.notes.push_back(std::string("tail prediction unavailable: ") + e.what());
  }
  ResidueRegime regime = ResidueRegime::Clt;
  if (tp && tp->alpha > 0 && tp->alpha < 1) regime = ResidueRegime::Stable01;
  if (tp && tp->alpha > 1 && tp->alpha < 2) regime = ResidueRegime::Stable12;
  const bool heavy = regime != ResidueRegime::Clt;
  const auto cond = residue_condition_check(c.spec, regime);
  rep.label = label_of(cond.verdict);
  rep.notes.push_back(cond.condition + ": " + cond.detail);
  rep.analytics["residue_condition"] = to_json(cond);
  rep.analytics["normalization"] = heavy ? "a_t" : "sqrt(t)";
  if (tp) rep.analytics["tail"] = to_json(*tp);

  std::vector<double> normalized;
  for (std::size_t h = 0; h < c.horizons.size(); ++h) {
    const double t = c.horizons[h];
    double scale = std::sqrt(t);
    if (heavy) {
      const TailFunction tail = [&](double x) { return tp->survival(x); };
      const double n = c.spec.nu * t;
      require(n >= 1, ErrorKind::Config, "nu * t must be >= 1");
      scale = normalizing_a(tail, n, tail_lower(tail, n));
    }
    const auto paths = simulate_summaries(c, h);
    std::vector<double> eps(paths.size()), z(paths.size());
    for (std::size_t r = 0; r < eps.size(); ++r) {
      eps[r] = paths[r].eps;
      z[r] = eps[r] / scale;
    }
    auto hs = describe(t, eps);
    hs.values["scale"] = scale;
    hs.values["normalized_mean"] = hs.mean / scale;
    const auto rm = residue_mean(c.spec, t);
    if (rm) {
      hs.values[rm->exact ? "analytic_mean" : "analytic_bound"] = rm->value;
      if (rm->exact) {
        add_check(rep, "eps_mean_vs_exact_se", t,
                  hs.standard_error > 0 ? std::abs(hs.mean - rm->value) / hs.standard_error
                                        : std::abs(hs.mean - rm->value),
                  hs.standard_error > 0 ? "<" : "<=", hs.standard_error > 0 ? 3.0 : 1e-12);
      } else {
        add_check(rep, "eps_mean_minus_bound_over_se", t,
                  (hs.mean - rm->value) / std::max(hs.standard_error, 1e-300), "<", 3.0);
      }
    }
    rep.horizons.push_back(hs);
    normalized.push_back(hs.mean / scale);
    keep_raw(rep, c, t, paths, z);
  }
  if (c.horizons.size() > 1) {
    const double first = normalized.front(), last = normalized.back();
    add_check(rep, "normalized_residue_change", c.horizons.back(), last - first, "<=", 0.0,
              !cond.holds());
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

}  // namespace claimsim
