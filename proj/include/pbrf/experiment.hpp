#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbrf/bounds.hpp"
#include "pbrf/dataset.hpp"
#include "pbrf/forest.hpp"
#include "pbrf/optimize.hpp"
#include "pbrf/stats.hpp"
#include "pbrf/synth.hpp"

namespace pbrf {

enum class Setting { Bagging, Validation, Optimize };

std::string setting_str(Setting s);
Setting parse_setting(const std::string& name);

struct ExperimentConfig {
  Setting setting = Setting::Bagging;
  std::string dataset_name;  // display name used in reports
  std::uint64_t seed = 1;
  double delta = 0.05;
  int trees = 0;  // 0 -> largest of {100,200,500,1000} below N/4
  int max_depth = kUnlimitedDepth;
  SplitFeatureMode split_mode = SplitFeatureMode::AllFeatures;
  XiMode xi_mode = XiMode::Xi;
  std::optional<EvalMode> eval_mode_override;  // validation setting only
  int repeats = 1;  // mean over seeds seed..seed+repeats-1
  std::vector<double> mu_grid;  // empty -> default grid
};

// Largest value from {100, 200, 500, 1000} strictly below n/4.
int auto_tree_count(std::size_t n_rows);

// Seeded-shuffle split: test gets n/2 rows, the validation setting carves a
// further n/4 for the validation set, training keeps the rest.
struct SplitPlan {
  std::vector<std::int32_t> test;
  std::vector<std::int32_t> validation;
  std::vector<std::int32_t> train;
};
SplitPlan make_split(std::size_t n_rows, Setting setting, Rng& rng);

// One bound evaluation inside a report. mode is the evaluation-set choice
// ("oob", "oob+val" or "val"); posterior names the weighting it was computed
// under; the PBkl/SH rows appear in an "xi" and a "2sqrtn" variant with the
// configured one flagged primary.
struct BoundRow {
  std::string posterior;  // "uniform", "lambda", "cbound"
  std::string mode;
  std::string variant;  // "xi", "2sqrtn" or "" when not applicable
  bool primary = true;
  BoundReport report;
};

struct PosteriorSummary {
  std::string name;
  double test_mv_loss = 0.0;
  double oob_mv_loss = 0.0;
  std::optional<double> lambda_star;
  std::optional<double> mu_star;
  std::optional<double> mass_on_complements;
  bool converged = true;
};

struct ExperimentRun {
  std::uint64_t seed = 0;
  std::size_t n_total = 0, n_train = 0, n_test = 0, n_val = 0;
  std::size_t tree_count = 0;
  double test_mv_loss = 0.0;  // uniform posterior
  double oob_mv_loss = 0.0;   // uniform posterior, skip-uncovered
  std::size_t oob_uncovered = 0;
  double gibbs_emp = 0.0;     // primary-mode uniform Gibbs loss
  double disagreement = 0.0;  // primary-mode uniform rho-disagreement
  std::vector<BoundRow> bounds;
  std::vector<PosteriorSummary> posteriors;  // optimize setting
  // Per-voter detail (optimize setting): evaluation losses and the
  // optimized posteriors, in tree order.
  std::vector<double> per_tree_loss;
  std::vector<double> rho_lambda;
  std::vector<double> q_cbound;
  std::vector<double> lambda_trace;

  const BoundRow* find(const std::string& posterior, const std::string& mode,
                       BoundName name, bool primary_only = true) const;
};

struct ExperimentResult {
  ExperimentConfig cfg;
  std::size_t n_rows = 0, n_features = 0;
  std::vector<ExperimentRun> runs;

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data);

// Writes the JSON report to out_path and the CSV table next to it
// (.json swapped for .csv, else .csv appended).
void write_report(const ExperimentResult& result, const std::string& out_path,
                  const nlohmann::ordered_json& dataset_info = {});

// One experiment per (feature mode, depth) pair; depths ascending, with
// kUnlimitedDepth allowed as the last entry.
struct SweepPoint {
  SplitFeatureMode split_mode;
  int max_depth;
  ExperimentRun run;
};
struct SweepResult {
  ExperimentConfig cfg;
  std::vector<SweepPoint> points;
  std::string to_csv() const;
};
SweepResult run_sweep(const ExperimentConfig& cfg, const Dataset& data,
                      std::span<const int> depths,
                      std::span<const SplitFeatureMode> modes);

}  // namespace pbrf
