#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "claimsim/process.hpp"

namespace claimsim {

/// Expectation of g over a scalar law: exact summation for discrete laws,
/// composite 128-point Gauss-Legendre in the quantile variable otherwise.
template <class F>
double expect(const ScalarLaw& law, F&& g);

struct MomentReport {
  std::string mechanism;
  double mu_X = 0;
  double EX2 = 0;
  double EK = 0;
  double EK2 = 0;
  double kappa = 0;
  double E_kappaA2 = 0;
  double E_XkappaA = 0;
  double mu_D = 0;
  double ED2 = 0;
  double variance_D = 0;
  /// Hawkes with deterministic fertility:
  /// sigma_X^2 / (1 - kappa) + kappa (E X)^2 / (1 - kappa)^3.
  std::optional<double> variance_D_independent;
  /// Hawkes with constant claims c: c^2 (Var kappa_A + 1) / (1 - kappa)^3.
  std::optional<double> ED2_constant_claims;
};

/// Closed-form mean and second moment of the cluster total. Hawkes models
/// are dispatched to hawkes_second_moment.
MomentReport compound_moments(const ModelSpec& spec);
MomentReport hawkes_second_moment(const ModelSpec& spec);

/// E D, requiring first moments only.
double cluster_mean(const ModelSpec& spec);
/// E K (mean number of progeny per cluster).
double cluster_size_mean(const ModelSpec& spec);

/// Moments of the claim X = f(A).
double claim_moment(const ModelSpec& spec, int order);
/// P(X > x).
double claim_survival(const ModelSpec& spec, double x);

/// Iterates of phi -> E[e^{-sX} e^{kappa_A (phi - 1)}] from phi_0 = 1 until
/// successive change < tol; the last entry is the fixed point.
std::vector<double> laplace_iterates(const ModelSpec& spec, double s, double tol = 1e-12);
double laplace_fixed_point(const ModelSpec& spec, double s, double tol = 1e-12);

enum class TailRegime { RV1, RV2, RV3 };
std::string to_string(TailRegime r);

struct TailPrediction {
  TailRegime regime = TailRegime::RV1;
  double alpha = 0;
  /// Multiplies P(Z > x) where Z is the claim (or, for Hawkes with alpha in
  /// (1, 2), the variable X + kappa_A mu_D).
  double claim_constant = 0;
  /// P(K > x / count_scale) enters with this weight (0 or 1).
  double count_constant = 0;
  double count_scale = 1;
  bool hypothesis_verified = true;
  std::string form;
  std::string note;

  // Ingredients of the predicted survival function.
  std::optional<ScalarLaw> claim_coordinate;
  AffineForm claim_form;
  std::optional<ScalarLaw> count_law;

  double survival(double x) const;
};

TailPrediction tail_prediction(const ModelSpec& spec);

enum class ResidueRegime { Clt, Stable12, Stable01 };
enum class Verdict { Holds, Fails, Inconclusive };
std::string to_string(ResidueRegime r);
std::string to_string(Verdict v);

struct ResidueCheck {
  Verdict verdict = Verdict::Inconclusive;
  /// Decay-exponent margin; positive when the condition holds, +inf for
  /// light tails, NaN when inconclusive.
  double margin = 0;
  std::string condition;
  std::string detail;

  bool holds() const { return verdict == Verdict::Holds; }
};

ResidueCheck residue_condition_check(const ModelSpec& spec, ResidueRegime regime);

/// E eps_t: exact for mixed binomial and single-step renewal clusters, an
/// upper bound for Hawkes, empty otherwise.
struct ResidueMean {
  double value = 0;
  bool exact = false;
};
std::optional<ResidueMean> residue_mean(const ModelSpec& spec, double t);

/// E[min(W, t)] = int_0^t P(W > s) ds.
double integrated_survival(const ScalarLaw& law, double t);

nlohmann::ordered_json to_json(const MomentReport& m);
nlohmann::ordered_json to_json(const TailPrediction& p);
nlohmann::ordered_json to_json(const ResidueCheck& c);

}  // namespace claimsim

#include "claimsim/detail/expect.hpp"
