#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pbrf/dataset.hpp"
#include "pbrf/forest.hpp"

namespace pbrf {

// Where the empirical estimators are evaluated:
//   OobOnly    - tree i on V_i, pair (i,j) on V_i n V_j
//   OobPlusVal - the same sets, each united with the validation set
//   ValOnly    - everything on the validation set
enum class EvalMode { OobOnly, OobPlusVal, ValOnly };

struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> v;

  explicit SquareMatrix(std::size_t size = 0) : n(size), v(size * size, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return v[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * n + j]; }
};

// Empirical quantities feeding the bounds. Matrices are symmetric; the
// disagreement diagonal is 0 and the joint-error diagonal is the per-tree
// loss on that tree's own evaluation set.
struct OobStatistics {
  EvalMode mode = EvalMode::OobOnly;
  std::vector<double> per_tree_loss;       // L(h_i, E_i)
  std::vector<std::int64_t> per_tree_count;  // |E_i|
  SquareMatrix disagreement;               // fraction h_i != h_j on E_ij
  SquareMatrix joint_error;                // fraction both wrong on E_ij
  SquareMatrix pair_count;                 // |E_ij|
  std::int64_t n_gibbs = 0;                // min_i |E_i|
  std::int64_t n_pair = 0;                 // min_{i != j} |E_ij|
};

// V_i = training rows absent from tree i's bootstrap multiset. Throws
// ConfigError if some V_i is empty (bounds cannot be evaluated).
std::vector<std::vector<std::int32_t>> oob_sets(const Ensemble& ens,
                                                std::size_t n_train_rows);

// Per-tree losses, pairwise disagreement/joint-error matrices and effective
// sample sizes in the requested mode. validation must be non-null unless
// mode == OobOnly. Pair computations run in parallel over tree pairs.
OobStatistics compute_statistics(const Ensemble& ens, const Dataset& train,
                                 EvalMode mode, const Dataset* validation);

// rho-weighted aggregates over the statistics record.
double gibbs_loss(const OobStatistics& stats, std::span<const double> weights);
double rho_disagreement(const OobStatistics& stats, std::span<const double> weights);
double rho_joint_error(const OobStatistics& stats, std::span<const double> weights);

// OOB majority-vote estimate: each training row is voted on by the trees
// whose bootstrap misses it, with the given weights; ties count as errors.
// Rows no tree is OOB for are skipped and reported through uncovered.
double oob_mv_estimate(const Ensemble& ens, const Dataset& train,
                       std::span<const double> weights,
                       std::size_t* uncovered = nullptr);

}  // namespace pbrf
