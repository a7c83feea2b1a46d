#include "claimsim/thinning.hpp"

#include <cmath>

#include "claimsim/error.hpp"
#include "util.hpp"

namespace claimsim {

IntensityState::IntensityState(double nu, DelayShape shape) : nu_(nu), shape_(std::move(shape)) {
  require(nu >= 0 && std::isfinite(nu), ErrorKind::ParameterDomain, "intensity: nu must be >= 0");
  validate(shape_);
  if (const auto* e = std::get_if<shape::Exponential>(&shape_)) {
    exponential_ = true;
    rate_ = e->rate;
  }
}

void IntensityState::add_event(double time, double kappa) {
  if (!history_.empty() && time < history_.back().first)
    fail(ErrorKind::Ordering, "intensity: event at " + detail::fmt(time) +
                                  " precedes the last recorded event at " +
                                  detail::fmt(history_.back().first));
  if (exponential_) {
    const double jump = kappa * rate_;
    if (history_.empty()) {
      cache_ = jump;
      at_last_ = jump;
    } else {
      const double last = history_.back().first;
      cache_ = cache_ * std::exp(-rate_ * (time - last)) + jump;
      at_last_ = time == last ? at_last_ + jump : jump;
    }
  }
  history_.emplace_back(time, kappa);
}

double IntensityState::brute_force(double t) const {
  double s = nu_;
  for (const auto& [tau, kappa] : history_)
    if (tau < t) s += kappa * density(shape_, t - tau);
  return s;
}

double IntensityState::excitation(double t, bool include_at_t) const {
  if (!history_.empty() && t < history_.back().first)
    fail(ErrorKind::Ordering, "intensity: query at " + detail::fmt(t) +
                                  " precedes the last recorded event");
  if (history_.empty()) return 0.0;
  const double last = history_.back().first;
  if (exponential_) {
    if (t > last) return cache_ * std::exp(-rate_ * (t - last));
    return include_at_t ? cache_ : cache_ - at_last_;
  }
  double s = 0;
  for (const auto& [tau, kappa] : history_)
    if (tau < t || (include_at_t && tau == t)) s += kappa * density(shape_, t - tau);
  return s;
}

double IntensityState::intensity(double t) const { return nu_ + excitation(t, false); }

double IntensityState::intensity_right(double t) const { return nu_ + excitation(t, true); }

double IntensityState::compensator(double t0, double t1) const {
  require(t1 >= t0, ErrorKind::Ordering, "compensator: need t0 <= t1");
  double s = nu_ * (t1 - t0);
  for (const auto& [tau, kappa] : history_) {
    if (tau >= t1) continue;
    const double from = std::max(t0, tau) - tau;
    s += kappa * (survival(shape_, from) - survival(shape_, t1 - tau));
  }
  return s;
}

double conditional_intensity(const IntensityState& state, double t) { return state.intensity(t); }

ProcessPath simulate_by_thinning(const ModelSpec& spec, double t, RngStream& rng,
                                 IntensityState* final_state) {
  validate(spec);
  const auto* hawkes = std::get_if<Hawkes>(&spec.mechanism);
  require(hawkes != nullptr, ErrorKind::Precondition, "thinning needs a hawkes model");
  require(spec.include_immigrant_claims, ErrorKind::Precondition,
          "thinning cannot tell immigrants from progeny; immigrant claims must be included");
  require(t > 0 && std::isfinite(t), ErrorKind::ParameterDomain, "horizon must be positive");

  ProcessPath path;
  path.t_start = 0;
  path.t_end = t;
  IntensityState state(spec.nu, hawkes->fertility.shape);
  if (spec.nu > 0) {
    const double lookahead = 1.0 / (10.0 * spec.nu);
    std::vector<double> a(spec.marks.dim());
    double now = 0;
    for (;;) {
      const double bound = state.intensity_right(now);
      const double block_end = now + lookahead;
      const double cand = now - std::log(rng.uniform_open()) / bound;
      if (cand > block_end || cand > t) {
        if (block_end >= t) break;
        now = block_end;
        continue;
      }
      const double lambda = state.intensity(cand);
      if (lambda > bound * (1 + 1e-9))
        fail(ErrorKind::OracleUnsound, "thinning bound violated at t = " + detail::fmt(cand) +
                                           ": intensity " + detail::fmt(lambda) +
                                           " exceeds bound " + detail::fmt(bound));
      if (rng.uniform() * bound <= lambda) {
        sample_mark(spec.marks, rng, a);
        state.add_event(cand, apply(hawkes->fertility.kappa, a));
        path.events.push_back({cand, apply(spec.claim, a), kNoCluster, kNoGeneration});
      }
      now = cand;
    }
  }
  if (final_state) *final_state = std::move(state);
  return path;
}

std::vector<double> rescaled_interarrivals(const IntensityState& state) {
  const auto& h = state.history();
  std::vector<double> out;
  out.reserve(h.size());
  if (const auto* e = std::get_if<shape::Exponential>(&state.shape())) {
    // Excitation just after the previous event, decayed across each gap.
    double excite = 0, prev = 0;
    for (const auto& [tau, kappa] : h) {
      const double gap = tau - prev;
      out.push_back(state.nu() * gap + excite * -std::expm1(-e->rate * gap) / e->rate);
      excite = excite * std::exp(-e->rate * gap) + kappa * e->rate;
      prev = tau;
    }
    return out;
  }
  double prev = 0;
  for (const auto& [tau, kappa] : h) {
    out.push_back(state.compensator(prev, tau));
    prev = tau;
  }
  return out;
}

}  // namespace claimsim
