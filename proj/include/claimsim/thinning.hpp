#pragma once

#include <utility>
#include <vector>

#include "claimsim/cluster.hpp"
#include "claimsim/process.hpp"

namespace claimsim {

/// Event history of a separable Hawkes intensity
/// lambda(t) = nu + sum_{tau_i < t} kappa_i g(t - tau_i).
class IntensityState {
 public:
  IntensityState(double nu, DelayShape shape);

  /// Appends an event; times must be nondecreasing.
  void add_event(double time, double kappa);

  /// Left limit lambda(t); t must not precede the last event.
  double intensity(double t) const;
  /// Right limit: includes events at exactly t.
  double intensity_right(double t) const;
  /// lambda(t) summed term by term, for any t.
  double brute_force(double t) const;
  /// int_{t0}^{t1} lambda(s) ds.
  double compensator(double t0, double t1) const;

  double nu() const { return nu_; }
  const DelayShape& shape() const { return shape_; }
  const std::vector<std::pair<double, double>>& history() const { return history_; }
  double last_time() const { return history_.empty() ? 0.0 : history_.back().first; }

 private:
  double excitation(double t, bool include_at_t) const;

  double nu_;
  DelayShape shape_;
  std::vector<std::pair<double, double>> history_;
  // Exponential shape only: excitation just after the last event, and the
  // share of it coming from events at exactly that time.
  bool exponential_ = false;
  double rate_ = 0;
  double cache_ = 0;
  double at_last_ = 0;
};

double conditional_intensity(const IntensityState& state, double t);

/// Ogata thinning with a piecewise-constant bound refreshed at each event and
/// every 1 / (10 nu) time units. Events carry no cluster labels.
ProcessPath simulate_by_thinning(const ModelSpec& spec, double t, RngStream& rng,
                                 IntensityState* final_state = nullptr);

/// Compensator increments between consecutive events (the first measured
/// from 0); Exp(1) under the model.
std::vector<double> rescaled_interarrivals(const IntensityState& state);

}  // namespace claimsim
