#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "claimsim/process.hpp"

namespace claimsim {

enum class Regime { Clt, Stable12, Stable01, Subordinator, Counterexample, ResidueScaling };

std::string to_string(Regime r);
/// Accepts the names printed by to_string, case-insensitively.
Regime parse_regime(const std::string& name);

struct Tolerances {
  double ks = 0.03;
  double laplace = 0.02;
  double quantile_ratio = 0.10;
  double significance = 0.01;
  /// The uncorrected counterexample statistic must exceed this.
  double uncorrected_ks = 0.1;
  double growth_ratio = 0.10;
};

struct SubordinatorSetup {
  ScalarLaw y = law::Pareto{0.5, 1.0};
  ScalarLaw w = law::Exponential{1.0};
  std::vector<double> s_grid{0.25, 0.5, 1.0};
  /// The s at which the quantile-ratio scaling is asserted.
  double ratio_s = 0.5;
};

struct ExperimentConfig {
  Regime regime = Regime::Clt;
  ModelSpec spec;
  std::vector<double> horizons{500.0, 2000.0};
  std::uint64_t replications = 10000;
  std::uint64_t master_seed = 1;
  bool stationary = false;
  double burnin = 0.0;
  /// Size of the i.i.d. oracle sample; 0 means `replications`.
  std::uint64_t oracle_replications = 0;
  std::vector<double> lambda_grid{0.5, 1.0, 2.0, 4.0};
  SubordinatorSetup subordinator;
  Tolerances tol;
  std::uint64_t pilot_clusters = 20000;
  std::uint64_t empirical_tail_samples = 1000000;
  bool exploratory = false;
  bool keep_raw = false;
  unsigned threads = 1;
};

void validate(const ExperimentConfig& config);

struct Check {
  std::string name;
  double horizon = 0;
  double statistic = 0;
  double threshold = 0;
  /// "<", ">", "<=" or ">=": pass iff statistic relation threshold.
  std::string relation;
  bool pass = false;
  /// Reported but excluded from the verdict.
  bool informational = false;
};

/// Recomputes pass from statistic, relation and threshold.
bool evaluate(const Check& c);

struct HorizonStats {
  double t = 0;
  std::uint64_t replications = 0;
  double mean = 0;
  double variance = 0;
  double standard_error = 0;
  std::map<std::string, double> values;
};

struct RawRecord {
  std::uint64_t replication = 0;
  double horizon = 0;
  double S = 0;
  double eps = 0;
  std::uint64_t tau = 0;
  double standardized = 0;
};

struct GoFReport {
  Regime regime = Regime::Clt;
  /// "theorem-applies", "outside-hypotheses", "inconclusive" or
  /// "counterexample".
  std::string label;
  std::vector<std::string> notes;
  nlohmann::ordered_json analytics = nlohmann::ordered_json::object();
  std::vector<HorizonStats> horizons;
  std::vector<Check> checks;
  double wall_clock_seconds = 0;
  std::vector<RawRecord> raw;

  /// Every non-informational check passes.
  bool passed() const;
  /// Failed checks count against the exit status.
  bool binding() const { return label != "outside-hypotheses" && label != "inconclusive"; }
};

/// Wall-clock time is left out unless requested, so equal configs give equal
/// bytes.
nlohmann::ordered_json to_json(const GoFReport& report, bool with_timing = false);
/// Columns replication, horizon, S_t, eps_t, tau_t, standardized.
void write_raw_csv(const GoFReport& report, std::ostream& os);

GoFReport run_experiment(const ExperimentConfig& config);

GoFReport run_clt(const ExperimentConfig& config);
GoFReport run_stable_12(const ExperimentConfig& config);
GoFReport run_stable_01(const ExperimentConfig& config);
GoFReport run_subordinator(const ExperimentConfig& config);
GoFReport run_counterexample(const ExperimentConfig& config);
GoFReport run_residue_scaling(const ExperimentConfig& config);

/// V_{sigma(u)} = sum of the jumps Y_k over renewal epochs W_1 + ... + W_k <= u,
/// for each u of an ascending grid along one path. Draws W then Y per epoch.
std::vector<double> subordinated_sums(const ScalarLaw& y, const ScalarLaw& w,
                                      const std::vector<double>& u, RngStream& rng);
/// Y_1 + ... + Y_n for each n of an ascending grid along one sequence.
std::vector<double> direct_sums(const ScalarLaw& y, const std::vector<std::uint64_t>& n,
                                RngStream& rng);

/// Stream purposes used by the harness.
namespace purpose {
inline constexpr std::uint64_t kPaths = 1;
inline constexpr std::uint64_t kOracle = 2;
inline constexpr std::uint64_t kFixedOracle = 3;
inline constexpr std::uint64_t kSubordinated = 4;
inline constexpr std::uint64_t kDirect = 5;
inline constexpr std::uint64_t kPilot = 6;
inline constexpr std::uint64_t kEmpiricalTail = 7;
}  // namespace purpose

}  // namespace claimsim
