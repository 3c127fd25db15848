#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "motscore/baselines.hpp"
#include "motscore/densities.hpp"
#include "motscore/scoring.hpp"

namespace motscore {

inline constexpr int kSchemaVersion = 1;

struct BaselineConfig {
  double gospa_cutoff = 2.0;
  double clear_mot_cutoff = 2.0;
  double estimate_existence_threshold = 0.5;
};

struct TrackerPosterior {
  std::string name;
  std::string declared_type;  // "cphd" | "pmbm" | "pmb" | "mbm" | "mbm01" | "bernoulli-set"
  PosteriorDensity posterior;
};

// One scored unit of work: a ground-truth set, named tracker posteriors and
// the baseline hyperparameters.
class Scenario {
 public:
  Scenario(std::string name, GroundTruthSet ground_truth,
           std::vector<TrackerPosterior> trackers, BaselineConfig config);

  const std::string& name() const { return name_; }
  const GroundTruthSet& ground_truth() const { return ground_truth_; }
  const std::vector<TrackerPosterior>& trackers() const { return trackers_; }
  const BaselineConfig& baseline_config() const { return config_; }

 private:
  std::string name_;
  GroundTruthSet ground_truth_;
  std::vector<TrackerPosterior> trackers_;
  BaselineConfig config_;
};

struct TrackerScore {
  std::string name;
  NllReport nll;
  std::optional<EstimateSet> estimates;     // absent for CPHD posteriors
  std::optional<GospaResult> gospa;         // requires estimates
  std::optional<ClearMotResult> clear_mot;  // requires estimates and |Y| > 0
};

struct ScoreReport {
  std::string scenario_name;
  std::size_t q = 10;
  bool prefer_exact = false;
  bool ground_truth_has_duplicates = false;
  std::vector<TrackerScore> trackers;
  std::vector<std::string> ranking_by_nll;    // stable: score, then name
  std::vector<std::string> ranking_by_gospa;  // trackers with a GOSPA score only
};

enum class ReportFormat { Human, Machine };

// --- scenario I/O ---

Scenario parse_scenario(const std::string& text);
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

// --- scoring and reports ---

ScoreReport score_scenario(const Scenario& scenario, const NllConfig& config = {});

std::string emit_report(const ScoreReport& report, ReportFormat format);
nlohmann::json report_to_json(const ScoreReport& report);
ScoreReport report_from_json(const nlohmann::json& doc);

// --- random scenario generation (fuzz/property harness) ---

struct ScenarioLimits {
  std::size_t max_objects = 5;
  std::size_t max_bernoullis = 5;
  std::size_t max_hypotheses = 3;
  int dimension = 2;
};

// Reproducible from the seed; covers edge cases with fixed probabilities:
// empty ground truth 10%, an r = 0 Bernoulli 10%, an r = 1 Bernoulli 10%,
// zero intensity 25%. Geometry is kept well-separated so Murty's Q-best
// approximation of the likelihood is exhaustive-or-negligible at oracle
// scale.
Scenario generate_random_scenario(std::uint64_t seed, const ScenarioLimits& limits = {});

// --- theorem-1 demo fixture ---

struct Theorem1Demo {
  Theorem1Construction construction;
  GroundTruthSet ground_truth;
};

Theorem1Demo parse_theorem1_demo(const std::string& text);

}  // namespace motscore
