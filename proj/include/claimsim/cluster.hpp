#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "claimsim/laws.hpp"
#include "claimsim/rng.hpp"

namespace claimsim {

inline constexpr std::uint64_t kDefaultNodeCap = 10'000'000;

/// Mark law on R^d with independent coordinates.
struct MarkLaw {
  std::vector<ScalarLaw> coordinates;

  std::size_t dim() const { return coordinates.size(); }
};

void validate(const MarkLaw& q);
void sample_mark(const MarkLaw& q, RngStream& rng, std::span<double> out);
std::vector<double> sample_mark(const MarkLaw& q, RngStream& rng);

namespace claim {
struct Projection {
  std::size_t index;
};
struct Constant {
  double value;
};
/// x = slope * a[index] + intercept
struct Affine {
  std::size_t index;
  double slope;
  double intercept;
};
}  // namespace claim

using ClaimMap = std::variant<claim::Projection, claim::Constant, claim::Affine>;

/// Reads any claim map as intercept + slope * a[index]; index is empty for
/// constant maps.
struct AffineForm {
  std::optional<std::size_t> index;
  double slope = 0;
  double intercept = 0;

  double operator()(double coordinate) const { return intercept + slope * coordinate; }
};

AffineForm affine_form(const ClaimMap& f);
double apply(const ClaimMap& f, std::span<const double> mark);
void validate(const ClaimMap& f, const MarkLaw& q);
std::string to_string(const ClaimMap& f);

namespace fertility {
struct Constant {
  double kappa;
};
/// kappa_a = scale * a[index]
struct Proportional {
  std::size_t index;
  double scale;
};
}  // namespace fertility

using KappaMap = std::variant<fertility::Constant, fertility::Proportional>;

AffineForm affine_form(const KappaMap& k);
double apply(const KappaMap& k, std::span<const double> mark);

namespace shape {
/// g(s) = rate e^{-rate s}
struct Exponential {
  double rate;
};
/// Lomax density g(s) = (alpha / scale) (1 + s / scale)^{-alpha-1}.
struct Lomax {
  double alpha;
  double scale;
};
}  // namespace shape

using DelayShape = std::variant<shape::Exponential, shape::Lomax>;

void validate(const DelayShape& g);
double density(const DelayShape& g, double s);
double survival(const DelayShape& g, double s);
/// int_0^t survival(g, s) ds
double integrated_survival(const DelayShape& g, double t);
double sample_delay(const DelayShape& g, RngStream& rng);
std::string to_string(const DelayShape& g);

struct FertilitySpec {
  DelayShape shape = shape::Exponential{1.0};
  KappaMap kappa = fertility::Constant{0.0};
};

/// The linked law has mean scale * a[index] of the ancestor mark.
struct MarkLink {
  std::size_t index;
  double scale;
};

struct MixedBinomial {
  ScalarLaw count;
  ScalarLaw wait;
  std::optional<MarkLink> count_link;
  std::optional<MarkLink> wait_link;
};

struct Renewal {
  ScalarLaw count;
  ScalarLaw wait;
  std::optional<MarkLink> count_link;
  std::optional<MarkLink> wait_link;
};

struct Hawkes {
  FertilitySpec fertility;
};

using ClusterMechanism = std::variant<MixedBinomial, Renewal, Hawkes>;

/// Mean offspring per event, E kappa_A.
double mean_kappa(const Hawkes& h, const MarkLaw& q);

/// Checks parameter domains, E K < inf and subcriticality.
void validate(const ClusterMechanism& mech, const MarkLaw& q);
std::string mechanism_name(const ClusterMechanism& mech);

inline constexpr std::uint32_t kAncestor = 0xFFFFFFFFu;

struct ClusterEvent {
  double offset;
  double claim;
  std::uint32_t generation;
  /// Index of the parent event, or kAncestor.
  std::uint32_t parent;
};

struct Cluster {
  std::vector<double> ancestor_mark;
  double ancestor_claim = 0;
  std::vector<ClusterEvent> events;
  /// Row-major event marks, events.size() * dim.
  std::vector<double> marks;
  std::size_t dim = 0;
  double D = 0;

  std::size_t K() const { return events.size(); }
  std::span<const double> mark(std::size_t j) const {
    return {marks.data() + j * dim, dim};
  }
};

Cluster simulate_cluster(const ClusterMechanism& mech, const MarkLaw& q, const ClaimMap& f,
                         std::span<const double> ancestor, RngStream& rng,
                         std::uint64_t node_cap = kDefaultNodeCap);

/// Same as simulate_cluster but reuses the buffers of `out`.
void simulate_cluster_into(Cluster& out, const ClusterMechanism& mech, const MarkLaw& q,
                           const ClaimMap& f, std::span<const double> ancestor,
                           RngStream& rng, std::uint64_t node_cap = kDefaultNodeCap);

/// f(ancestor) + sum of f over event marks, recomputed from the marks.
double cluster_total(const Cluster& c, const ClaimMap& f);

struct ClusterSizeReport {
  /// pmf[k] = empirical P(K + 1 = k); pmf[0] = 0.
  std::vector<double> pmf;
  double mean = 0;
  double tv_distance = 0;
  std::uint64_t samples = 0;
};

/// Empirical law of K + 1 over Hawkes clusters with constant fertility,
/// compared with the Borel pmf.
ClusterSizeReport cluster_size_distribution(const ClusterMechanism& mech, const MarkLaw& q,
                                            std::uint64_t n_samples, RngStream& rng);

}  // namespace claimsim
