#include "claimsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "claimsim/error.hpp"
#include "util.hpp"

namespace claimsim {

using detail::fmt;
using detail::overloaded;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const ScalarLaw& coordinate(const ModelSpec& spec, std::size_t idx) {
  return spec.marks.coordinates.at(idx);
}

double coord_moment(const ModelSpec& spec, std::size_t idx, int order) {
  return moment(coordinate(spec, idx), order);
}

// Moments of affine functionals of single mark coordinates; coordinates are
// independent, so products over distinct coordinates factorize.
double affine_mean(const ModelSpec& spec, const AffineForm& f) {
  if (!f.index || f.slope == 0) return f.intercept;
  return f.intercept + f.slope * coord_moment(spec, *f.index, 1);
}

double affine_product(const ModelSpec& spec, const AffineForm& f, const AffineForm& g) {
  const bool shared = f.index && g.index && *f.index == *g.index && f.slope != 0 && g.slope != 0;
  if (!shared) return affine_mean(spec, f) * affine_mean(spec, g);
  const double m1 = coord_moment(spec, *f.index, 1);
  const double m2 = coord_moment(spec, *f.index, 2);
  return f.intercept * g.intercept + (f.intercept * g.slope + g.intercept * f.slope) * m1 +
         f.slope * g.slope * m2;
}

struct CountMoments {
  double EK = 0;
  double EK2 = 0;
  double E_X0K = 0;
};

template <class M>
CountMoments count_moments(const ModelSpec& spec, const M& m, bool need_second) {
  CountMoments out;
  const AffineForm fx = affine_form(spec.claim);
  const double ex = affine_mean(spec, fx);
  if (!m.count_link) {
    out.EK = count_moment(m.count, 1);
    out.EK2 = need_second ? count_moment(m.count, 2) : 0.0;
    out.E_X0K = ex * out.EK;
    return out;
  }
  const auto [idx, c] = *m.count_link;
  const ScalarLaw& a = coordinate(spec, idx);
  const bool poisson = std::holds_alternative<law::Poisson>(m.count);
  const bool geometric = std::holds_alternative<law::Geometric>(m.count);
  const bool shared = fx.index && *fx.index == idx && fx.slope != 0;
  if (poisson || geometric) {
    // E[K | a] = c a and E[K^2 | a] = c a + (1 or 2) (c a)^2.
    const double m1 = moment(a, 1);
    const double m2 = need_second || shared ? moment(a, 2) : 0.0;
    out.EK = c * m1;
    out.EK2 = need_second ? c * m1 + (poisson ? 1.0 : 2.0) * c * c * m2 : 0.0;
    out.E_X0K = shared ? c * (fx.intercept * m1 + fx.slope * m2) : ex * out.EK;
    return out;
  }
  auto k1 = [&](double x) { return count_moment(with_mean(m.count, c * x), 1); };
  out.EK = expect(a, k1);
  if (need_second) out.EK2 = expect(a, [&](double x) { return count_moment(with_mean(m.count, c * x), 2); });
  out.E_X0K = shared ? expect(a, [&](double x) { return fx(x) * k1(x); }) : ex * out.EK;
  return out;
}

const Hawkes* as_hawkes(const ModelSpec& spec) { return std::get_if<Hawkes>(&spec.mechanism); }

void require_finite(double v, const std::string& condition) {
  if (!std::isfinite(v))
    fail(ErrorKind::MomentDoesNotExist, "moment condition " + condition + " fails");
}

void drop_immigrant_claim_hawkes(MomentReport& r) {
  const double mu = r.mu_D, ed2 = r.ED2;
  r.mu_D = r.kappa * mu;
  r.ED2 = r.kappa * ed2 + r.E_kappaA2 * mu * mu;
  r.variance_D = r.ED2 - r.mu_D * r.mu_D;
}

}  // namespace

double claim_moment(const ModelSpec& spec, int order) {
  const AffineForm fx = affine_form(spec.claim);
  return order == 1 ? affine_mean(spec, fx) : affine_product(spec, fx, fx);
}

double claim_survival(const ModelSpec& spec, double x) {
  const AffineForm fx = affine_form(spec.claim);
  if (!fx.index || fx.slope == 0) return x < fx.intercept ? 1.0 : 0.0;
  return survival(coordinate(spec, *fx.index), (x - fx.intercept) / fx.slope);
}

double cluster_size_mean(const ModelSpec& spec) {
  return std::visit(overloaded{
                        [&](const Hawkes& h) {
                          const double k = mean_kappa(h, spec.marks);
                          return k < 1 ? k / (1 - k) : kInf;
                        },
                        [&](const auto& m) { return count_moments(spec, m, false).EK; },
                    },
                    spec.mechanism);
}

double cluster_mean(const ModelSpec& spec) {
  validate(spec);
  const double ex = claim_moment(spec, 1);
  require_finite(ex, "E[X] < inf");
  const double ek = cluster_size_mean(spec);
  require_finite(ek, "E[K] < inf");
  const double full = (1 + ek) * ex;
  if (spec.include_immigrant_claims) return full;
  return ek * ex;
}

MomentReport hawkes_second_moment(const ModelSpec& spec) {
  const Hawkes* h = as_hawkes(spec);
  require(h != nullptr, ErrorKind::Precondition, "hawkes_second_moment needs a hawkes model");
  validate(spec);
  MomentReport r;
  r.mechanism = "hawkes";
  const AffineForm fx = affine_form(spec.claim);
  const AffineForm fk = affine_form(h->fertility.kappa);
  r.kappa = mean_kappa(*h, spec.marks);
  if (!(r.kappa < 1))
    fail(ErrorKind::Supercritical, "subcriticality requires kappa < 1, got " + fmt(r.kappa));
  r.mu_X = affine_mean(spec, fx);
  r.EX2 = affine_product(spec, fx, fx);
  r.E_kappaA2 = affine_product(spec, fk, fk);
  r.E_XkappaA = affine_product(spec, fx, fk);
  require_finite(r.mu_X, "E[X] < inf");
  require_finite(r.EX2, "E[X^2] < inf");
  require_finite(r.E_kappaA2, "E[kappa_A^2] < inf");

  const double q = 1 - r.kappa;
  r.mu_D = r.mu_X / q;
  r.ED2 = r.EX2 / q + r.mu_X * r.mu_X * r.E_kappaA2 / (q * q * q) +
          2 * r.mu_X / (q * q) * r.E_XkappaA;
  r.variance_D = r.ED2 - r.mu_D * r.mu_D;

  const double var_kappa = r.E_kappaA2 - r.kappa * r.kappa;
  const double size2 = (1 + var_kappa) / (q * q * q);  // E (K + 1)^2
  r.EK = r.kappa / q;
  r.EK2 = size2 - 2 / q + 1;
  if (!fk.index || fk.slope == 0) {
    const double var_x = r.EX2 - r.mu_X * r.mu_X;
    r.variance_D_independent = var_x / q + r.kappa * r.mu_X * r.mu_X / (q * q * q);
  }
  if (!fx.index || fx.slope == 0) {
    r.ED2_constant_claims = fx.intercept * fx.intercept * (var_kappa + 1) / (q * q * q);
  }
  if (!spec.include_immigrant_claims) drop_immigrant_claim_hawkes(r);
  return r;
}

MomentReport compound_moments(const ModelSpec& spec) {
  if (as_hawkes(spec)) return hawkes_second_moment(spec);
  validate(spec);
  MomentReport r;
  r.mechanism = mechanism_name(spec.mechanism);
  const AffineForm fx = affine_form(spec.claim);
  r.mu_X = affine_mean(spec, fx);
  r.EX2 = affine_product(spec, fx, fx);
  const CountMoments k = std::visit(
      overloaded{
          [&](const Hawkes&) -> CountMoments { return {}; },
          [&](const auto& m) { return count_moments(spec, m, true); },
      },
      spec.mechanism);
  r.EK = k.EK;
  r.EK2 = k.EK2;
  require_finite(r.mu_X, "E[X] < inf");
  require_finite(r.EK, "E[K] < inf");
  require_finite(r.EX2, "E[X^2] < inf");
  require_finite(r.EK2, "E[K^2] < inf");
  if (spec.include_immigrant_claims) {
    r.mu_D = (1 + r.EK) * r.mu_X;
    r.ED2 = (1 + r.EK) * r.EX2 + (r.EK2 - r.EK) * r.mu_X * r.mu_X + 2 * k.E_X0K * r.mu_X;
  } else {
    r.mu_D = r.EK * r.mu_X;
    r.ED2 = r.EK * r.EX2 + (r.EK2 - r.EK) * r.mu_X * r.mu_X;
  }
  r.variance_D = r.ED2 - r.mu_D * r.mu_D;
  return r;
}

std::vector<double> laplace_iterates(const ModelSpec& spec, double s, double tol) {
  const Hawkes* h = as_hawkes(spec);
  require(h != nullptr, ErrorKind::Precondition, "the Laplace fixed point needs a hawkes model");
  require(s >= 0 && std::isfinite(s), ErrorKind::ParameterDomain, "laplace: s must be >= 0");
  require(tol > 0, ErrorKind::ParameterDomain, "laplace: tol must be > 0");
  validate(spec);
  std::vector<double> it{1.0};
  if (s == 0) return it;

  const AffineForm fx = affine_form(spec.claim);
  const AffineForm fk = affine_form(h->fertility.kappa);
  const bool x_random = fx.index && fx.slope != 0;
  const bool k_random = fk.index && fk.slope != 0;
  const bool shared = x_random && k_random && *fx.index == *fk.index;

  double claim_part = 0;
  if (!shared)
    claim_part = x_random ? expect(coordinate(spec, *fx.index),
                                   [&](double a) { return std::exp(-s * fx(a)); })
                          : std::exp(-s * fx.intercept);

  auto map = [&](double phi) {
    if (shared)
      return expect(coordinate(spec, *fx.index),
                    [&](double a) { return std::exp(-s * fx(a) + fk(a) * (phi - 1)); });
    const double k_part =
        k_random ? expect(coordinate(spec, *fk.index),
                          [&](double a) { return std::exp(fk(a) * (phi - 1)); })
                 : std::exp(fk.intercept * (phi - 1));
    return claim_part * k_part;
  };

  double phi = 1.0;
  for (int n = 0; n < 10000; ++n) {
    const double next = map(phi);
    it.push_back(next);
    if (std::fabs(next - phi) < tol) return it;
    phi = next;
  }
  fail(ErrorKind::ContractionFailure,
       "laplace fixed point did not converge in 10000 iterations (kappa >= 1 or bad quadrature)");
}

double laplace_fixed_point(const ModelSpec& spec, double s, double tol) {
  return laplace_iterates(spec, s, tol).back();
}

std::string to_string(TailRegime r) {
  switch (r) {
    case TailRegime::RV1: return "RV1";
    case TailRegime::RV2: return "RV2";
    case TailRegime::RV3: return "RV3";
  }
  return "?";
}

double TailPrediction::survival(double x) const {
  double p = 0;
  if (claim_constant > 0) {
    double z;
    if (claim_coordinate && claim_form.slope != 0) {
      z = claimsim::survival(*claim_coordinate, (x - claim_form.intercept) / claim_form.slope);
    } else {
      z = x < claim_form.intercept ? 1.0 : 0.0;
    }
    p += claim_constant * z;
  }
  if (count_constant > 0 && count_law) {
    const double y = x / count_scale;
    const double k = is_discrete(*count_law) ? claimsim::survival(*count_law, y)
                                             : claimsim::survival(*count_law, std::floor(y) + 1);
    p += count_constant * k;
  }
  return p;
}

TailPrediction tail_prediction(const ModelSpec& spec) {
  validate(spec);
  TailPrediction p;
  const AffineForm fx = affine_form(spec.claim);
  std::optional<double> ax;
  if (fx.index && fx.slope > 0) {
    ax = tail_index(coordinate(spec, *fx.index));
    p.claim_coordinate = coordinate(spec, *fx.index);
  }
  p.claim_form = fx;
  auto unsupported = [](const std::string& why) { fail(ErrorKind::UnsupportedRegime, why); };

  if (const Hawkes* h = as_hawkes(spec)) {
    const AffineForm fk = affine_form(h->fertility.kappa);
    const bool k_random = fk.index && fk.slope > 0;
    const bool shared = k_random && fx.index && *fk.index == *fx.index;
    if (k_random && !shared && tail_index(coordinate(spec, *fk.index)))
      unsupported("fertility kappa_A is regularly varying; the cluster tail is not covered");
    if (!ax) unsupported("claims are not regularly varying; no heavy-tail regime applies");
    const double alpha = *ax;
    if (!(alpha < 2) || alpha == 1)
      unsupported("the hawkes tail prediction covers alpha in (0, 1) or (1, 2), got " + fmt(alpha));
    const double kappa = mean_kappa(*h, spec.marks);
    p.regime = TailRegime::RV1;
    p.alpha = alpha;
    p.claim_constant = 1 / (1 - kappa);
    if (alpha < 1) {
      p.form = "P(D > x) ~ P(X > x) / (1 - kappa)";
    } else {
      const double mu_d = affine_mean(spec, fx) / (1 - kappa);
      if (shared) {
        p.claim_form = AffineForm{fx.index, fx.slope + fk.slope * mu_d, fx.intercept};
        p.note = "Y = X + kappa_A mu_D is affine in the claim coordinate";
      } else {
        p.claim_form = AffineForm{fx.index, fx.slope, fx.intercept + affine_mean(spec, fk) * mu_d};
        p.note = k_random ? "kappa_A is independent of X with a lighter tail, so Y is regularly varying"
                          : "kappa_A is bounded, so Y is regularly varying";
      }
      p.form = "P(D > x) ~ P(Y > x) / (1 - kappa), Y = X + kappa_A mu_D";
    }
    return p;
  }

  const ScalarLaw* count = nullptr;
  std::optional<MarkLink> link;
  std::visit(overloaded{
                 [](const Hawkes&) {},
                 [&](const auto& m) {
                   count = &m.count;
                   link = m.count_link;
                 },
             },
             spec.mechanism);
  std::optional<double> ak;
  if (link) {
    if (tail_index(*count) || tail_index(coordinate(spec, link->index)))
      unsupported("cluster size tail depends on the mark link; not covered");
  } else {
    ak = tail_index(*count);
  }
  const double ek = cluster_size_mean(spec);
  const double ex = affine_mean(spec, fx);

  auto rv1 = [&](double alpha) {
    p.regime = TailRegime::RV1;
    p.alpha = alpha;
    p.claim_constant = ek + 1;
    p.form = "P(D > x) ~ (E[K] + 1) P(X > x)";
  };
  auto rv2 = [&](double alpha) {
    if (!(alpha > 1 && alpha < 2))
      unsupported("a regularly varying cluster size needs index in (1, 2), got " + fmt(alpha));
    p.regime = TailRegime::RV2;
    p.alpha = alpha;
    p.claim_constant = 0;
    p.count_constant = 1;
    p.count_scale = ex;
    p.count_law = *count;
    p.form = "P(D > x) ~ P(K > x / E[X])";
  };

  if (!ax && !ak) unsupported("neither claims nor cluster sizes are regularly varying");
  if (ax && !ak) {
    rv1(*ax);
  } else if (!ax && ak) {
    rv2(*ak);
  } else if (*ax < *ak) {
    rv1(*ax);
    p.note = "cluster size tail is lighter than the claim tail";
  } else if (*ak < *ax) {
    rv2(*ak);
    p.note = "claim tail is lighter than the cluster size tail";
  } else {
    if (!(*ax > 1 && *ax < 2))
      unsupported("tail-equivalent claims and cluster sizes need index in (1, 2)");
    rv1(*ax);
    p.regime = TailRegime::RV3;
    p.count_constant = 1;
    p.count_scale = ex;
    p.count_law = *count;
    p.form = "P(D > x) ~ (E[K] + 1) P(X > x) + P(K > x / E[X])";
  }
  return p;
}

std::string to_string(ResidueRegime r) {
  switch (r) {
    case ResidueRegime::Clt: return "CLT";
    case ResidueRegime::Stable12: return "Stable12";
    case ResidueRegime::Stable01: return "Stable01";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// Power-law decay exponent rho of a waiting-time survival function, or +inf
// for tails lighter than every power.
double decay_exponent(const ScalarLaw& w) {
  if (const auto a = tail_index(w)) return *a;
  return kInf;
}

double decay_exponent(const DelayShape& g) {
  if (const auto* l = std::get_if<shape::Lomax>(&g)) return l->alpha;
  return kInf;
}

ResidueCheck verdict_from_margin(double margin, std::string condition, std::string detail) {
  ResidueCheck c;
  c.margin = margin;
  c.verdict = margin > 0 ? Verdict::Holds : Verdict::Fails;
  c.condition = std::move(condition);
  c.detail = std::move(detail);
  return c;
}

ResidueCheck inconclusive(std::string condition, std::string detail) {
  ResidueCheck c;
  c.verdict = Verdict::Inconclusive;
  c.margin = std::numeric_limits<double>::quiet_NaN();
  c.condition = std::move(condition);
  c.detail = std::move(detail);
  return c;
}

}  // namespace

ResidueCheck residue_condition_check(const ModelSpec& spec, ResidueRegime regime) {
  validate(spec);
  double alpha = 0;
  if (regime == ResidueRegime::Stable12) {
    try {
      alpha = tail_prediction(spec).alpha;
    } catch (const Error& e) {
      return inconclusive("t^(1 + delta - 1/alpha) E[residue mass beyond t] -> 0",
                          std::string("no tail index available: ") + e.what());
    }
    if (!(alpha > 1 && alpha < 2))
      return inconclusive("t^(1 + delta - 1/alpha) E[residue mass beyond t] -> 0",
                          "tail index " + fmt(alpha) + " is outside (1, 2)");
  }

  if (const Hawkes* h = as_hawkes(spec)) {
    const double rho = decay_exponent(h->fertility.shape);
    const std::string shape = to_string(h->fertility.shape);
    switch (regime) {
      case ResidueRegime::Clt:
        return verdict_from_margin(rho - 0.5, "sqrt(t) kappa P(delay > t) -> 0",
                                   "delay shape " + shape + ", decay exponent " + fmt(rho));
      case ResidueRegime::Stable01:
        return verdict_from_margin(rho, "t^delta kappa P(delay > t) -> 0 for some delta > 0",
                                   "delay shape " + shape + ", decay exponent " + fmt(rho));
      case ResidueRegime::Stable12:
        return verdict_from_margin(rho - (1 - 1 / alpha),
                                   "t^(1 + delta - 1/alpha) kappa P(delay > t) -> 0",
                                   "delay shape " + shape + ", alpha " + fmt(alpha));
    }
  }

  if (const auto* m = std::get_if<MixedBinomial>(&spec.mechanism)) {
    const double rho = decay_exponent(m->wait);
    if (m->wait_link && !std::isinf(rho) &&
        !moment_exists(coordinate(spec, m->wait_link->index), rho + 1))
      return inconclusive("E[m_A P(W > t | A)] decay",
                          "the linked waiting-time scale has a heavy tail");
    const std::string wait = to_string(m->wait);
    switch (regime) {
      case ResidueRegime::Clt:
        return verdict_from_margin(rho - 0.5, "sqrt(t) E[m_A P(W > t | A)] -> 0",
                                   "waiting time " + wait);
      case ResidueRegime::Stable01:
        return verdict_from_margin(kInf, "none needed for alpha in (0, 1)",
                                   "waiting time " + wait);
      case ResidueRegime::Stable12:
        return verdict_from_margin(rho - (1 - 1 / alpha),
                                   "t^(1 + delta - 1/alpha) E[m_A P(W > t | A)] -> 0",
                                   "waiting time " + wait + ", alpha " + fmt(alpha));
    }
  }

  const auto& r = std::get<Renewal>(spec.mechanism);
  if (regime == ResidueRegime::Stable01)
    return verdict_from_margin(kInf, "none needed for alpha in (0, 1)",
                               "waiting time " + to_string(r.wait));
  for (const auto& link : {r.count_link, r.wait_link}) {
    if (link && tail_index(coordinate(spec, link->index)))
      return inconclusive("E[K^p W^delta] < inf", "a mark link uses a heavy-tailed coordinate");
  }
  const double rho = decay_exponent(r.wait);
  const std::string wait = to_string(r.wait);
  if (regime == ResidueRegime::Clt) {
    if (!std::isfinite(count_moment(r.count, 2)) && !r.count_link)
      return verdict_from_margin(-kInf, "E[K^2 W^delta] < inf for some delta > 1/2",
                                 "E[K^2] is infinite");
    return verdict_from_margin(rho - 0.5, "E[K^2 W^delta] < inf for some delta > 1/2",
                               "waiting time " + wait);
  }
  // Largest usable gamma in (0, 1] with E[K^(1 + gamma)] < inf.
  double gamma = 1;
  if (const auto ak = tail_index(r.count); ak && !r.count_link) gamma = std::min(1.0, *ak - 1);
  if (!(gamma > 0))
    return verdict_from_margin(-kInf, "E[K^(1 + gamma)] < inf for some gamma > 0",
                               "cluster size tail too heavy");
  return verdict_from_margin(rho - (1 - gamma / alpha),
                             "E[K^(1 + gamma) W^delta] < inf, delta > (alpha - gamma) / alpha",
                             "waiting time " + wait + ", gamma " + fmt(gamma) + ", alpha " +
                                 fmt(alpha));
}

double integrated_survival(const ScalarLaw& law, double t) {
  if (t <= 0) return 0.0;
  return std::visit(
      overloaded{
          [&](const law::Constant& l) { return std::clamp(l.value, 0.0, t); },
          [&](const law::Exponential& l) { return -std::expm1(-l.rate * t) / l.rate; },
          [&](const law::Pareto& l) {
            if (t <= l.scale) return t;
            if (l.alpha == 1) return l.scale + l.scale * std::log(t / l.scale);
            return l.scale + std::pow(l.scale, l.alpha) *
                                 (std::pow(t, 1 - l.alpha) - std::pow(l.scale, 1 - l.alpha)) /
                                 (1 - l.alpha);
          },
          [&](const auto&) {
            return expect(law, [t](double x) { return std::clamp(x, 0.0, t); });
          },
      },
      law);
}

std::optional<ResidueMean> residue_mean(const ModelSpec& spec, double t) {
  validate(spec);
  require(t >= 0, ErrorKind::ParameterDomain, "residue_mean: t must be >= 0");
  const double ex = claim_moment(spec, 1);
  if (!std::isfinite(ex)) return std::nullopt;

  if (const Hawkes* h = as_hawkes(spec)) {
    const double kappa = mean_kappa(*h, spec.marks);
    const double mu_d = ex / (1 - kappa);
    return ResidueMean{spec.nu / (1 - kappa) * mu_d * kappa *
                           integrated_survival(h->fertility.shape, t),
                       false};
  }

  auto linked_law = [&](const ScalarLaw& law, const std::optional<MarkLink>& link, double a) {
    return link ? with_mean(law, link->scale * a) : law;
  };

  if (const auto* m = std::get_if<MixedBinomial>(&spec.mechanism)) {
    auto size = [&](double a) { return count_moment(linked_law(m->count, m->count_link, a), 1); };
    auto reach = [&](double a) { return integrated_survival(linked_law(m->wait, m->wait_link, a), t); };
    double inner;
    if (m->count_link && m->wait_link && m->count_link->index == m->wait_link->index) {
      inner = expect(coordinate(spec, m->count_link->index),
                     [&](double a) { return size(a) * reach(a); });
    } else {
      const double ek = m->count_link ? expect(coordinate(spec, m->count_link->index), size)
                                      : count_moment(m->count, 1);
      const double ew = m->wait_link ? expect(coordinate(spec, m->wait_link->index), reach)
                                     : reach(0.0);
      inner = ek * ew;
    }
    return ResidueMean{spec.nu * ex * inner, true};
  }

  const auto& r = std::get<Renewal>(spec.mechanism);
  const auto* c = std::get_if<law::Constant>(&r.count);
  if (!c || r.count_link || std::floor(c->value) > 1) return std::nullopt;
  if (std::floor(c->value) < 1) return ResidueMean{0.0, true};
  const double ew =
      r.wait_link ? expect(coordinate(spec, r.wait_link->index),
                           [&](double a) { return integrated_survival(linked_law(r.wait, r.wait_link, a), t); })
                  : integrated_survival(r.wait, t);
  return ResidueMean{spec.nu * ex * ew, true};
}

namespace {

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

template <class T>
nlohmann::ordered_json optional_number(const std::optional<T>& v) {
  if (v) return number_or_null(*v);
  return nullptr;
}

}  // namespace

nlohmann::ordered_json to_json(const MomentReport& m) {
  nlohmann::ordered_json j;
  j["mechanism"] = m.mechanism;
  j["mu_X"] = number_or_null(m.mu_X);
  j["EX2"] = number_or_null(m.EX2);
  j["EK"] = number_or_null(m.EK);
  j["EK2"] = number_or_null(m.EK2);
  j["kappa"] = number_or_null(m.kappa);
  j["E_kappaA2"] = number_or_null(m.E_kappaA2);
  j["E_XkappaA"] = number_or_null(m.E_XkappaA);
  j["mu_D"] = number_or_null(m.mu_D);
  j["ED2"] = number_or_null(m.ED2);
  j["variance_D"] = number_or_null(m.variance_D);
  j["variance_D_independent"] = optional_number(m.variance_D_independent);
  j["ED2_constant_claims"] = optional_number(m.ED2_constant_claims);
  return j;
}

nlohmann::ordered_json to_json(const TailPrediction& p) {
  nlohmann::ordered_json j;
  j["regime"] = to_string(p.regime);
  j["alpha"] = p.alpha;
  j["claim_constant"] = p.claim_constant;
  j["count_constant"] = p.count_constant;
  j["count_scale"] = p.count_scale;
  j["hypothesis_verified"] = p.hypothesis_verified;
  j["form"] = p.form;
  j["note"] = p.note;
  return j;
}

nlohmann::ordered_json to_json(const ResidueCheck& c) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(c.verdict);
  if (std::isnan(c.margin)) {
    j["margin"] = nullptr;
  } else if (std::isinf(c.margin)) {
    j["margin"] = c.margin > 0 ? "inf" : "-inf";
  } else {
    j["margin"] = c.margin;
  }
  j["condition"] = c.condition;
  j["detail"] = c.detail;
  return j;
}

}  // namespace claimsim
