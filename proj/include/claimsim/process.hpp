#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "claimsim/cluster.hpp"

namespace claimsim {

struct ModelSpec {
  double nu = 1.0;
  MarkLaw marks{{law::Exponential{1.0}}};
  ClaimMap claim = claim::Projection{0};
  ClusterMechanism mechanism = Hawkes{};
  /// false drops the immigrants' own claims (and events) but keeps their
  /// progeny.
  bool include_immigrant_claims = true;
  std::uint64_t node_cap = kDefaultNodeCap;
};

void validate(const ModelSpec& spec);

inline constexpr std::uint64_t kNoCluster = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint32_t kNoGeneration = std::numeric_limits<std::uint32_t>::max();

struct PathEvent {
  double time;
  double claim;
  std::uint64_t cluster;
  std::uint32_t generation;
};

struct Immigrant {
  double time;
  double D;
  std::uint64_t K;
};

/// Events sorted by time. Every immigrant's whole cluster is kept, so events
/// later than t_end are present; the immigrant list ends with the first
/// arrival after t_end.
struct ProcessPath {
  double t_start = 0;
  double t_end = 0;
  std::vector<PathEvent> events;
  std::vector<Immigrant> immigrants;
};

ProcessPath simulate_path(const ModelSpec& spec, double t, RngStream& rng);

/// Immigration starts at -burnin; S, residue and tau are measured from 0.
ProcessPath simulate_stationary_path(const ModelSpec& spec, double t, double burnin,
                                     RngStream& rng);

/// Sum of claims with 0 <= time <= t.
double total_claim(const ProcessPath& path, double t);
/// Number of events with 0 <= time <= t.
std::uint64_t event_count(const ProcessPath& path, double t);
/// Claims after t belonging to clusters whose immigrant arrived in [0, t].
double residue(const ProcessPath& path, double t);
/// 1-based index, among immigrants arriving at or after 0, of the first one
/// arriving after t.
std::uint64_t tau(const ProcessPath& path, double t);
/// sum_{i <= tau(t)} D_i - D_{tau(t)}
double clusters_before_tau(const ProcessPath& path, double t);
/// Claims in [0, t] from immigrants that arrived before 0.
double eps_star(const ProcessPath& path, double t);
/// Claims in (0, t) from immigrants that arrived at or before -t.
double eps_tilde(const ProcessPath& path, double t);

/// Expected claim mass landing in (0, t) from immigrants older than burnin,
/// estimated from `pilot` independent clusters.
double truncation_bias_estimate(const ModelSpec& spec, double t, double burnin,
                                std::uint64_t pilot, RngStream& rng);

/// Path statistics at horizon t without materializing the sorted path.
/// Consumes the stream exactly like simulate_path / simulate_stationary_path.
struct PathSummary {
  double S = 0;
  double eps = 0;
  std::uint64_t tau = 0;
  std::uint64_t N = 0;
  double eps_star = 0;
  double eps_tilde = 0;
};

PathSummary summarize_path(const ModelSpec& spec, double t, RngStream& rng,
                           double burnin = 0.0);

/// Columns time, claim, cluster_index, generation.
void write_path_csv(const ProcessPath& path, std::ostream& os);

}  // namespace claimsim
