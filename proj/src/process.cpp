#include "claimsim/process.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "claimsim/error.hpp"
#include "claimsim/numeric.hpp"
#include "csv.hpp"
#include "util.hpp"

namespace claimsim {

void validate(const ModelSpec& spec) {
  require(spec.nu >= 0 && std::isfinite(spec.nu), ErrorKind::ParameterDomain,
          "immigration rate nu must be finite and >= 0, got " + detail::fmt(spec.nu));
  validate(spec.mechanism, spec.marks);
  validate(spec.claim, spec.marks);
  require(spec.node_cap >= 1, ErrorKind::ParameterDomain, "node cap must be >= 1");
}

namespace {

// Draws immigrants on (t_start, inf) up to and including the first arrival
// after t_end, simulating each cluster and handing it to visit(index, time,
// cluster).
template <class Visit>
void generate_clusters(const ModelSpec& spec, double t_start, double t_end, RngStream& rng,
                       Visit&& visit) {
  if (spec.nu <= 0) return;
  Cluster c;
  std::vector<double> a(spec.marks.dim());
  double gamma = t_start;
  for (std::uint64_t i = 0;; ++i) {
    gamma += -std::log(rng.uniform_open()) / spec.nu;
    sample_mark(spec.marks, rng, a);
    simulate_cluster_into(c, spec.mechanism, spec.marks, spec.claim, a, rng, spec.node_cap);
    visit(i, gamma, c);
    if (gamma > t_end) return;
  }
}

double cluster_sum(const ModelSpec& spec, const Cluster& c) {
  if (spec.include_immigrant_claims) return c.D;
  CompensatedSum d;
  for (const auto& e : c.events) d += e.claim;
  return d.value();
}

ProcessPath build_path(const ModelSpec& spec, double t_start, double t_end, RngStream& rng) {
  validate(spec);
  require(t_end > 0 && std::isfinite(t_end), ErrorKind::ParameterDomain,
          "horizon must be positive and finite");
  ProcessPath path;
  path.t_start = t_start;
  path.t_end = t_end;
  generate_clusters(spec, t_start, t_end, rng, [&](std::uint64_t i, double gamma, const Cluster& c) {
    path.immigrants.push_back({gamma, cluster_sum(spec, c), c.K()});
    if (spec.include_immigrant_claims) path.events.push_back({gamma, c.ancestor_claim, i, 0});
    for (const auto& e : c.events) path.events.push_back({gamma + e.offset, e.claim, i, e.generation});
  });
  std::sort(path.events.begin(), path.events.end(), [](const PathEvent& x, const PathEvent& y) {
    if (x.time != y.time) return x.time < y.time;
    return x.cluster < y.cluster;
  });
  return path;
}

void check_horizon(const ProcessPath& path, double t) {
  if (!(t >= 0 && t <= path.t_end))
    fail(ErrorKind::Range, "time " + detail::fmt(t) + " outside the path window [0, " +
                               detail::fmt(path.t_end) + "]");
}

std::vector<PathEvent>::const_iterator first_nonnegative(const ProcessPath& path) {
  return std::lower_bound(path.events.begin(), path.events.end(), 0.0,
                          [](const PathEvent& e, double x) { return e.time < x; });
}

std::vector<PathEvent>::const_iterator first_after(const ProcessPath& path, double t) {
  return std::upper_bound(path.events.begin(), path.events.end(), t,
                          [](double x, const PathEvent& e) { return x < e.time; });
}

double immigrant_time(const ProcessPath& path, const PathEvent& e) {
  if (e.cluster == kNoCluster) fail(ErrorKind::Precondition, "path carries no cluster labels");
  return path.immigrants[e.cluster].time;
}

}  // namespace

ProcessPath simulate_path(const ModelSpec& spec, double t, RngStream& rng) {
  return build_path(spec, 0.0, t, rng);
}

ProcessPath simulate_stationary_path(const ModelSpec& spec, double t, double burnin,
                                     RngStream& rng) {
  require(burnin >= 0 && std::isfinite(burnin), ErrorKind::ParameterDomain,
          "burnin must be finite and >= 0");
  return build_path(spec, -burnin, t, rng);
}

double total_claim(const ProcessPath& path, double t) {
  check_horizon(path, t);
  CompensatedSum s;
  for (auto it = first_nonnegative(path), end = first_after(path, t); it != end; ++it) s += it->claim;
  return s.value();
}

std::uint64_t event_count(const ProcessPath& path, double t) {
  check_horizon(path, t);
  return static_cast<std::uint64_t>(first_after(path, t) - first_nonnegative(path));
}

double residue(const ProcessPath& path, double t) {
  check_horizon(path, t);
  CompensatedSum s;
  for (auto it = first_after(path, t); it != path.events.end(); ++it) {
    const double g = immigrant_time(path, *it);
    if (g >= 0 && g <= t) s += it->claim;
  }
  return s.value();
}

std::uint64_t tau(const ProcessPath& path, double t) {
  check_horizon(path, t);
  const auto& im = path.immigrants;
  auto by_time = [](const Immigrant& i, double x) { return i.time < x; };
  const auto first = std::lower_bound(im.begin(), im.end(), 0.0, by_time);
  const auto after = std::upper_bound(im.begin(), im.end(), t,
                                      [](double x, const Immigrant& i) { return x < i.time; });
  return static_cast<std::uint64_t>(after - first) + 1;
}

double clusters_before_tau(const ProcessPath& path, double t) {
  const std::uint64_t n = tau(path, t);
  const auto& im = path.immigrants;
  const auto first = static_cast<std::size_t>(
      std::lower_bound(im.begin(), im.end(), 0.0,
                       [](const Immigrant& i, double x) { return i.time < x; }) -
      im.begin());
  if (first + n > im.size()) {
    // No arrival after t was drawn (nu = 0): the sum over i < tau covers all.
    CompensatedSum s;
    for (std::size_t i = first; i < im.size(); ++i) s += im[i].D;
    return s.value();
  }
  CompensatedSum s;
  for (std::size_t i = first; i < first + n; ++i) s += im[i].D;
  s += -im[first + n - 1].D;
  return s.value();
}

double eps_star(const ProcessPath& path, double t) {
  check_horizon(path, t);
  CompensatedSum s;
  for (auto it = first_nonnegative(path), end = first_after(path, t); it != end; ++it)
    if (immigrant_time(path, *it) < 0) s += it->claim;
  return s.value();
}

double eps_tilde(const ProcessPath& path, double t) {
  check_horizon(path, t);
  CompensatedSum s;
  for (auto it = first_nonnegative(path), end = first_after(path, t); it != end; ++it)
    if (it->time > 0 && it->time < t && immigrant_time(path, *it) <= -t) s += it->claim;
  return s.value();
}

double truncation_bias_estimate(const ModelSpec& spec, double t, double burnin,
                                std::uint64_t pilot, RngStream& rng) {
  validate(spec);
  require(pilot > 0, ErrorKind::ParameterDomain, "truncation bias: pilot size must be > 0");
  Cluster c;
  std::vector<double> a(spec.marks.dim());
  CompensatedSum total;
  for (std::uint64_t i = 0; i < pilot; ++i) {
    sample_mark(spec.marks, rng, a);
    simulate_cluster_into(c, spec.mechanism, spec.marks, spec.claim, a, rng, spec.node_cap);
    for (const auto& e : c.events) total += e.claim * std::clamp(e.offset - burnin, 0.0, t);
  }
  return spec.nu * total.value() / static_cast<double>(pilot);
}

PathSummary summarize_path(const ModelSpec& spec, double t, RngStream& rng, double burnin) {
  validate(spec);
  require(t > 0 && std::isfinite(t), ErrorKind::ParameterDomain,
          "horizon must be positive and finite");
  require(burnin >= 0 && std::isfinite(burnin), ErrorKind::ParameterDomain,
          "burnin must be finite and >= 0");
  PathSummary out;
  CompensatedSum s, eps, star, tilde;
  std::uint64_t tau_count = 0;
  auto credit = [&](double gamma, double time, double claim) {
    if (time >= 0 && time <= t) {
      s += claim;
      ++out.N;
      if (gamma < 0) star += claim;
      if (gamma <= -t && time > 0 && time < t) tilde += claim;
    } else if (time > t && gamma >= 0 && gamma <= t) {
      eps += claim;
    }
  };
  generate_clusters(spec, -burnin, t, rng, [&](std::uint64_t, double gamma, const Cluster& c) {
    if (gamma >= 0) ++tau_count;
    if (spec.include_immigrant_claims) credit(gamma, gamma, c.ancestor_claim);
    for (const auto& e : c.events) credit(gamma, gamma + e.offset, e.claim);
  });
  out.S = s.value();
  out.eps = eps.value();
  out.eps_star = star.value();
  out.eps_tilde = tilde.value();
  out.tau = spec.nu > 0 ? tau_count : 1;
  return out;
}

void write_path_csv(const ProcessPath& path, std::ostream& os) {
  detail::CsvWriter w(os);
  w.row({"time", "claim", "cluster_index", "generation"});
  for (const auto& e : path.events) {
    w.row({detail::fmt(e.time), detail::fmt(e.claim),
           e.cluster == kNoCluster ? std::string() : std::to_string(e.cluster),
           e.generation == kNoGeneration ? std::string() : std::to_string(e.generation)});
  }
}

}  // namespace claimsim
