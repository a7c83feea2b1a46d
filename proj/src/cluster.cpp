#include "claimsim/cluster.hpp"

#include <cmath>

#include "claimsim/error.hpp"
#include "claimsim/numeric.hpp"
#include "util.hpp"

namespace claimsim {

using detail::fmt;
using detail::overloaded;

void validate(const MarkLaw& q) {
  require(q.dim() >= 1, ErrorKind::ParameterDomain, "mark law needs at least one coordinate");
  for (const auto& c : q.coordinates) validate(c);
}

void sample_mark(const MarkLaw& q, RngStream& rng, std::span<double> out) {
  for (std::size_t i = 0; i < q.coordinates.size(); ++i) out[i] = sample(q.coordinates[i], rng);
}

std::vector<double> sample_mark(const MarkLaw& q, RngStream& rng) {
  std::vector<double> a(q.dim());
  sample_mark(q, rng, a);
  return a;
}

AffineForm affine_form(const ClaimMap& f) {
  return std::visit(overloaded{
                        [](const claim::Projection& p) { return AffineForm{p.index, 1.0, 0.0}; },
                        [](const claim::Constant& c) { return AffineForm{std::nullopt, 0.0, c.value}; },
                        [](const claim::Affine& a) { return AffineForm{a.index, a.slope, a.intercept}; },
                    },
                    f);
}

double apply(const ClaimMap& f, std::span<const double> mark) {
  return std::visit(overloaded{
                        [&](const claim::Projection& p) { return mark[p.index]; },
                        [](const claim::Constant& c) { return c.value; },
                        [&](const claim::Affine& a) { return a.slope * mark[a.index] + a.intercept; },
                    },
                    f);
}

namespace {

void check_index(std::size_t idx, const MarkLaw& q, const std::string& what) {
  require(idx < q.dim(), ErrorKind::ParameterDomain,
          what + ": mark coordinate " + std::to_string(idx) + " out of range (dimension " +
              std::to_string(q.dim()) + ")");
}

void check_nonnegative_coordinate(std::size_t idx, const MarkLaw& q, const std::string& what) {
  check_index(idx, q, what);
  require(support_min(q.coordinates[idx]) >= 0, ErrorKind::ParameterDomain,
          what + ": mark coordinate " + std::to_string(idx) + " can be negative");
}

ScalarLaw linked(const ScalarLaw& law, const std::optional<MarkLink>& link,
                 std::span<const double> ancestor) {
  if (!link) return law;
  return with_mean(law, link->scale * ancestor[link->index]);
}

bool count_mean_finite(const ScalarLaw& law, const std::optional<MarkLink>& link,
                       const MarkLaw& q) {
  if (!link) return std::isfinite(count_moment(law, 1));
  return std::isfinite(moment(q.coordinates[link->index], 1));
}

template <class M>
void validate_count_wait(const M& m, const MarkLaw& q, const std::string& name) {
  validate(m.count);
  validate(m.wait);
  require(support_min(m.wait) >= 0, ErrorKind::ParameterDomain,
          name + ": waiting-time law must be nonnegative");
  if (m.count_link) {
    check_nonnegative_coordinate(m.count_link->index, q, name + " count link");
    require(m.count_link->scale >= 0, ErrorKind::ParameterDomain,
            name + ": count link scale must be >= 0");
  }
  if (m.wait_link) {
    check_nonnegative_coordinate(m.wait_link->index, q, name + " wait link");
    require(m.wait_link->scale >= 0, ErrorKind::ParameterDomain,
            name + ": wait link scale must be >= 0");
  }
  if (!count_mean_finite(m.count, m.count_link, q))
    fail(ErrorKind::MomentDoesNotExist, name + ": cluster size needs E[K] < inf");
}

}  // namespace

void validate(const ClaimMap& f, const MarkLaw& q) {
  std::visit(overloaded{
                 [&](const claim::Projection& p) {
                   check_nonnegative_coordinate(p.index, q, "claim map");
                 },
                 [](const claim::Constant& c) {
                   require(c.value >= 0 && std::isfinite(c.value), ErrorKind::ParameterDomain,
                           "claim map: constant claim must be finite and >= 0");
                 },
                 [&](const claim::Affine& a) {
                   check_index(a.index, q, "claim map");
                   require(a.slope >= 0 && std::isfinite(a.slope) && std::isfinite(a.intercept),
                           ErrorKind::ParameterDomain, "claim map: affine slope must be >= 0");
                   require(a.intercept + a.slope * support_min(q.coordinates[a.index]) >= 0,
                           ErrorKind::ParameterDomain,
                           "claim map: affine claims can be negative on the mark support");
                 },
             },
             f);
}

std::string to_string(const ClaimMap& f) {
  return std::visit(overloaded{
                        [](const claim::Projection& p) {
                          return "projection(" + std::to_string(p.index) + ")";
                        },
                        [](const claim::Constant& c) { return "constant(" + fmt(c.value) + ")"; },
                        [](const claim::Affine& a) {
                          return "affine(" + std::to_string(a.index) + ", " + fmt(a.slope) +
                                 ", " + fmt(a.intercept) + ")";
                        },
                    },
                    f);
}

AffineForm affine_form(const KappaMap& k) {
  return std::visit(overloaded{
                        [](const fertility::Constant& c) {
                          return AffineForm{std::nullopt, 0.0, c.kappa};
                        },
                        [](const fertility::Proportional& p) {
                          return AffineForm{p.index, p.scale, 0.0};
                        },
                    },
                    k);
}

double apply(const KappaMap& k, std::span<const double> mark) {
  return std::visit(overloaded{
                        [](const fertility::Constant& c) { return c.kappa; },
                        [&](const fertility::Proportional& p) { return p.scale * mark[p.index]; },
                    },
                    k);
}

void validate(const DelayShape& g) {
  std::visit(overloaded{
                 [](const shape::Exponential& e) {
                   require(e.rate > 0 && std::isfinite(e.rate), ErrorKind::ParameterDomain,
                           "exponential delay shape: rate must be > 0");
                 },
                 [](const shape::Lomax& l) {
                   require(l.alpha > 0 && std::isfinite(l.alpha) && l.scale > 0 &&
                               std::isfinite(l.scale),
                           ErrorKind::ParameterDomain,
                           "pareto-tailed delay shape: alpha and scale must be > 0");
                 },
             },
             g);
}

double density(const DelayShape& g, double s) {
  if (s < 0) return 0.0;
  return std::visit(overloaded{
                        [&](const shape::Exponential& e) { return e.rate * std::exp(-e.rate * s); },
                        [&](const shape::Lomax& l) {
                          return l.alpha / l.scale * std::pow(1 + s / l.scale, -l.alpha - 1);
                        },
                    },
                    g);
}

double survival(const DelayShape& g, double s) {
  if (s <= 0) return 1.0;
  return std::visit(overloaded{
                        [&](const shape::Exponential& e) { return std::exp(-e.rate * s); },
                        [&](const shape::Lomax& l) { return std::pow(1 + s / l.scale, -l.alpha); },
                    },
                    g);
}

double integrated_survival(const DelayShape& g, double t) {
  if (t <= 0) return 0.0;
  return std::visit(overloaded{
                        [&](const shape::Exponential& e) { return -std::expm1(-e.rate * t) / e.rate; },
                        [&](const shape::Lomax& l) {
                          const double u = std::log1p(t / l.scale);
                          if (l.alpha == 1) return l.scale * u;
                          return l.scale * -std::expm1((1 - l.alpha) * u) / (l.alpha - 1);
                        },
                    },
                    g);
}

double sample_delay(const DelayShape& g, RngStream& rng) {
  return std::visit(overloaded{
                        [&](const shape::Exponential& e) {
                          return -std::log(rng.uniform_open()) / e.rate;
                        },
                        [&](const shape::Lomax& l) {
                          return l.scale * std::expm1(-std::log(rng.uniform_open()) / l.alpha);
                        },
                    },
                    g);
}

std::string to_string(const DelayShape& g) {
  return std::visit(overloaded{
                        [](const shape::Exponential& e) { return "exponential(" + fmt(e.rate) + ")"; },
                        [](const shape::Lomax& l) {
                          return "lomax(" + fmt(l.alpha) + ", " + fmt(l.scale) + ")";
                        },
                    },
                    g);
}

double mean_kappa(const Hawkes& h, const MarkLaw& q) {
  const AffineForm k = affine_form(h.fertility.kappa);
  if (!k.index) return k.intercept;
  return k(moment(q.coordinates[*k.index], 1));
}

void validate(const ClusterMechanism& mech, const MarkLaw& q) {
  validate(q);
  std::visit(overloaded{
                 [&](const MixedBinomial& m) { validate_count_wait(m, q, "mixed binomial"); },
                 [&](const Renewal& m) { validate_count_wait(m, q, "renewal"); },
                 [&](const Hawkes& h) {
                   validate(h.fertility.shape);
                   std::visit(overloaded{
                                  [](const fertility::Constant& c) {
                                    require(c.kappa >= 0 && std::isfinite(c.kappa),
                                            ErrorKind::ParameterDomain,
                                            "hawkes: kappa must be >= 0");
                                  },
                                  [&](const fertility::Proportional& p) {
                                    check_nonnegative_coordinate(p.index, q, "hawkes fertility");
                                    require(p.scale >= 0 && std::isfinite(p.scale),
                                            ErrorKind::ParameterDomain,
                                            "hawkes: kappa scale must be >= 0");
                                  },
                              },
                              h.fertility.kappa);
                   const double kappa = mean_kappa(h, q);
                   if (!(kappa < 1))
                     fail(ErrorKind::Supercritical,
                          "hawkes: subcriticality requires kappa = E int h(s, A) ds < 1, got " +
                              fmt(kappa));
                 },
             },
             mech);
}

std::string mechanism_name(const ClusterMechanism& mech) {
  return std::visit(overloaded{
                        [](const MixedBinomial&) { return std::string("mixed_binomial"); },
                        [](const Renewal&) { return std::string("renewal"); },
                        [](const Hawkes&) { return std::string("hawkes"); },
                    },
                    mech);
}

namespace {

void push_event(Cluster& out, const MarkLaw& q, const ClaimMap& f, double offset,
                std::uint32_t generation, std::uint32_t parent, RngStream& rng) {
  const std::size_t j = out.events.size();
  out.marks.resize((j + 1) * out.dim);
  std::span<double> m(out.marks.data() + j * out.dim, out.dim);
  sample_mark(q, rng, m);
  out.events.push_back({offset, apply(f, m), generation, parent});
}

void check_cap(std::uint64_t nodes, std::uint64_t cap) {
  if (nodes > cap)
    fail(ErrorKind::RunawayCluster, "cluster exceeded the node cap of " + std::to_string(cap) +
                                        " events; check that the model is subcritical");
}

}  // namespace

void simulate_cluster_into(Cluster& out, const ClusterMechanism& mech, const MarkLaw& q,
                           const ClaimMap& f, std::span<const double> ancestor, RngStream& rng,
                           std::uint64_t node_cap) {
  out.dim = q.dim();
  out.ancestor_mark.assign(ancestor.begin(), ancestor.end());
  out.ancestor_claim = apply(f, ancestor);
  out.events.clear();
  out.marks.clear();

  std::visit(
      overloaded{
          [&](const MixedBinomial& m) {
            const ScalarLaw count = linked(m.count, m.count_link, ancestor);
            const ScalarLaw wait = linked(m.wait, m.wait_link, ancestor);
            const std::uint64_t k = sample_count(count, rng);
            check_cap(k + 1, node_cap);
            out.events.reserve(k);
            for (std::uint64_t j = 0; j < k; ++j)
              push_event(out, q, f, sample(wait, rng), 1, kAncestor, rng);
          },
          [&](const Renewal& m) {
            const ScalarLaw count = linked(m.count, m.count_link, ancestor);
            const ScalarLaw wait = linked(m.wait, m.wait_link, ancestor);
            const std::uint64_t k = sample_count(count, rng);
            check_cap(k + 1, node_cap);
            out.events.reserve(k);
            double t = 0;
            for (std::uint64_t j = 0; j < k; ++j) {
              t += sample(wait, rng);
              push_event(out, q, f, t, 1, kAncestor, rng);
            }
          },
          [&](const Hawkes& h) {
            const auto& fert = h.fertility;
            auto spawn = [&](double offset, std::uint32_t generation, std::uint32_t parent,
                             double kappa) {
              const std::uint64_t n = sample_poisson(kappa, rng);
              check_cap(out.events.size() + n + 1, node_cap);
              for (std::uint64_t c = 0; c < n; ++c)
                push_event(out, q, f, offset + sample_delay(fert.shape, rng), generation + 1,
                           parent, rng);
            };
            spawn(0.0, 0, kAncestor, apply(fert.kappa, ancestor));
            for (std::size_t head = 0; head < out.events.size(); ++head) {
              const ClusterEvent e = out.events[head];
              spawn(e.offset, e.generation, static_cast<std::uint32_t>(head),
                    apply(fert.kappa, out.mark(head)));
            }
          },
      },
      mech);

  CompensatedSum d;
  d += out.ancestor_claim;
  for (const auto& e : out.events) d += e.claim;
  out.D = d.value();
}

Cluster simulate_cluster(const ClusterMechanism& mech, const MarkLaw& q, const ClaimMap& f,
                         std::span<const double> ancestor, RngStream& rng,
                         std::uint64_t node_cap) {
  Cluster c;
  simulate_cluster_into(c, mech, q, f, ancestor, rng, node_cap);
  return c;
}

double cluster_total(const Cluster& c, const ClaimMap& f) {
  CompensatedSum d;
  d += apply(f, c.ancestor_mark);
  for (std::size_t j = 0; j < c.K(); ++j) d += apply(f, c.mark(j));
  return d.value();
}

ClusterSizeReport cluster_size_distribution(const ClusterMechanism& mech, const MarkLaw& q,
                                            std::uint64_t n_samples, RngStream& rng) {
  const auto* h = std::get_if<Hawkes>(&mech);
  require(h != nullptr, ErrorKind::UnsupportedComparison,
          "cluster size law is only known for hawkes clusters");
  const auto* k = std::get_if<fertility::Constant>(&h->fertility.kappa);
  require(k != nullptr, ErrorKind::UnsupportedComparison,
          "cluster size law is only known for constant fertility kappa");
  require(n_samples > 0, ErrorKind::ParameterDomain, "cluster_size_distribution: no samples");
  validate(mech, q);

  const ClaimMap f = claim::Constant{0.0};
  std::vector<std::uint64_t> counts(2, 0);
  Cluster c;
  std::vector<double> a(q.dim());
  double sum = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    sample_mark(q, rng, a);
    simulate_cluster_into(c, mech, q, f, a, rng);
    const std::size_t size = c.K() + 1;
    if (size >= counts.size()) counts.resize(size + 1, 0);
    ++counts[size];
    sum += static_cast<double>(size);
  }

  ClusterSizeReport r;
  r.samples = n_samples;
  r.mean = sum / static_cast<double>(n_samples);
  r.pmf.resize(counts.size());
  double tv = 0, covered = 0;
  for (std::size_t s = 1; s < counts.size(); ++s) {
    r.pmf[s] = static_cast<double>(counts[s]) / static_cast<double>(n_samples);
    const double p = borel_pmf(k->kappa, s);
    covered += p;
    tv += std::fabs(r.pmf[s] - p);
  }
  r.tv_distance = 0.5 * (tv + std::max(0.0, 1.0 - covered));
  return r;
}

}  // namespace claimsim
