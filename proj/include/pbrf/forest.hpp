#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pbrf/dataset.hpp"
#include "pbrf/rng.hpp"

namespace pbrf {

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

enum class SplitFeatureMode { AllFeatures, OneRandomFeature };

struct TreeConfig {
  int max_depth = kUnlimitedDepth;  // root has depth 0
  SplitFeatureMode split_mode = SplitFeatureMode::AllFeatures;
};

// Internal node: feature >= 0, rows with x[feature] <= threshold go left.
// Leaf: feature = -1 and leaf_label in {-1, +1}.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int8_t leaf_label = 0;

  bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::int8_t predict(const double* x) const {
    std::int32_t at = 0;
    while (!nodes[at].is_leaf())
      at = x[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left
                                                       : nodes[at].right;
    return nodes[at].leaf_label;
  }
};

// Bagged ensemble: trees, their bootstrap row multisets (indices into the
// training dataset) and a posterior weight vector summing to 1.
struct Ensemble {
  std::vector<TreeModel> trees;
  std::vector<std::vector<std::int32_t>> bootstrap;
  std::vector<double> weights;

  std::size_t size() const { return trees.size(); }
};

// Greedy CART on the given row multiset: Gini impurity decrease, thresholds
// at midpoints between consecutive distinct sorted values, growth until
// purity or max_depth, leaf labels by majority with ties to +1.
TreeModel train_tree(const Dataset& data, std::span<const std::int32_t> rows,
                     const TreeConfig& cfg, Rng& rng);

// m bootstrap samples of size n_rows (with replacement) and one tree per
// sample; uniform initial weights. Tree i's sampling and splitting use an
// rng seeded by mix_seed(seed, i) so results are reproducible and
// independent of scheduling.
Ensemble train_forest(const Dataset& data, std::size_t m, const TreeConfig& cfg,
                      std::uint64_t seed);

// rho-weighted majority vote; a tied vote goes to +1.
std::int8_t mv_predict(const Ensemble& ens, const double* x);

// Per-row margin y * sum_i rho_i h_i(x), computed as 1 - 2 * (weight mass on
// the wrong label) so a two-way tie gives exactly 0. The overloads take a
// posterior other than ens.weights (must still be a probability vector).
std::vector<double> margins(const Ensemble& ens, const Dataset& data);
std::vector<double> margins(const Ensemble& ens, const Dataset& data,
                            std::span<const double> weights);

// Majority-vote empirical loss = fraction of rows with margin <= 0.
double mv_loss(const Ensemble& ens, const Dataset& data);
double mv_loss(const Ensemble& ens, const Dataset& data,
               std::span<const double> weights);

// Loss of a vote with arbitrary real per-tree weights (used for the signed
// votes induced by aligned posteriors); ties count as errors.
double weighted_vote_loss(const Ensemble& ens, const Dataset& data,
                          std::span<const double> vote_weights);

}  // namespace pbrf
