#include "pbrf/stats.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pbrf/bitset64.hpp"
#include "pbrf/errors.hpp"
#include "pbrf/parallel.hpp"

namespace pbrf {

std::vector<std::vector<std::int32_t>> oob_sets(const Ensemble& ens,
                                                std::size_t n_train_rows) {
  std::vector<std::vector<std::int32_t>> out(ens.size());
  std::vector<char> in_bag(n_train_rows);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (std::int32_t r : ens.bootstrap[i]) in_bag[static_cast<std::size_t>(r)] = 1;
    for (std::size_t r = 0; r < n_train_rows; ++r)
      if (!in_bag[r]) out[i].push_back(static_cast<std::int32_t>(r));
    if (out[i].empty())
      throw ConfigError("tree " + std::to_string(i) +
                        " has an empty out-of-bag set; bounds cannot be evaluated");
  }
  return out;
}

namespace {

struct TreeBits {
  BitVec pred_train, wrong_train, oob;  // over training rows
  BitVec pred_val, wrong_val;           // over validation rows
};

}  // namespace

OobStatistics compute_statistics(const Ensemble& ens, const Dataset& train,
                                 EvalMode mode, const Dataset* validation) {
  const std::size_t m = ens.size();
  if (m == 0) throw ConfigError("compute_statistics: empty ensemble");
  if (mode != EvalMode::OobOnly && validation == nullptr)
    throw ConfigError("evaluation mode requires a validation set");
  if (mode == EvalMode::OobOnly && validation != nullptr)
    throw ConfigError("OOB-only mode must not carry a validation set");

  const bool use_oob = mode != EvalMode::ValOnly;
  const bool use_val = mode != EvalMode::OobOnly;
  const std::size_t n_train = train.n_rows;
  const std::size_t n_val = use_val ? validation->n_rows : 0;
  if (use_val && n_val == 0) throw DataError("validation set is empty");

  std::vector<std::vector<std::int32_t>> oob;
  if (use_oob) oob = oob_sets(ens, n_train);

  // Per-tree prediction/mistake masks, filled in parallel.
  std::vector<TreeBits> bits(m);
  parallel_for(m, [&](std::size_t i) {
    TreeBits& b = bits[i];
    if (use_oob) {
      b.pred_train = BitVec(n_train);
      b.wrong_train = BitVec(n_train);
      b.oob = BitVec(n_train);
      for (std::int32_t r : oob[i]) b.oob.set(static_cast<std::size_t>(r));
      for (std::size_t r = 0; r < n_train; ++r) {
        const std::int8_t p = ens.trees[i].predict(train.row(r));
        if (p > 0) b.pred_train.set(r);
        if (p != train.labels[r]) b.wrong_train.set(r);
      }
    }
    if (use_val) {
      b.pred_val = BitVec(n_val);
      b.wrong_val = BitVec(n_val);
      for (std::size_t r = 0; r < n_val; ++r) {
        const std::int8_t p = ens.trees[i].predict(validation->row(r));
        if (p > 0) b.pred_val.set(r);
        if (p != validation->labels[r]) b.wrong_val.set(r);
      }
    }
  });

  OobStatistics stats;
  stats.mode = mode;
  stats.per_tree_loss.resize(m);
  stats.per_tree_count.resize(m);
  stats.disagreement = SquareMatrix(m);
  stats.joint_error = SquareMatrix(m);
  stats.pair_count = SquareMatrix(m);

  for (std::size_t i = 0; i < m; ++i) {
    std::size_t wrong = 0, total = 0;
    if (use_oob) {
      wrong += count_and(bits[i].wrong_train, bits[i].oob);
      total += bits[i].oob.count();
    }
    if (use_val) {
      wrong += bits[i].wrong_val.count();
      total += n_val;
    }
    if (total == 0) throw DataError("empty evaluation set for tree " + std::to_string(i));
    stats.per_tree_loss[i] = static_cast<double>(wrong) / static_cast<double>(total);
    stats.per_tree_count[i] = static_cast<std::int64_t>(total);
    stats.joint_error.at(i, i) = stats.per_tree_loss[i];
    stats.pair_count.at(i, i) = static_cast<double>(total);
  }

  // Pairs are independent; each worker owns the (i, j) and (j, i) cells.
  const std::size_t n_pairs = m * (m - 1) / 2;
  parallel_for(n_pairs, [&](std::size_t k) {
    // Unrank k -> (i, j), i < j.
    std::size_t i = 0;
    std::size_t offset = k;
    while (offset >= m - 1 - i) {
      offset -= m - 1 - i;
      ++i;
    }
    const std::size_t j = i + 1 + offset;

    PairCounts c;
    if (use_oob) {
      c = count_pair(bits[i].pred_train, bits[j].pred_train, bits[i].wrong_train,
                     bits[j].wrong_train, bits[i].oob, bits[j].oob);
    }
    if (use_val) {
      const PairCounts cv = count_pair_full(bits[i].pred_val, bits[j].pred_val,
                                            bits[i].wrong_val, bits[j].wrong_val);
      c.common += cv.common;
      c.disagree += cv.disagree;
      c.joint_wrong += cv.joint_wrong;
    }
    if (c.common == 0)
      throw ConfigError("empty pairwise evaluation set for trees (" +
                        std::to_string(i) + ", " + std::to_string(j) + ")");
    const double n_ij = static_cast<double>(c.common);
    const double d = static_cast<double>(c.disagree) / n_ij;
    const double e = static_cast<double>(c.joint_wrong) / n_ij;
    stats.disagreement.at(i, j) = stats.disagreement.at(j, i) = d;
    stats.joint_error.at(i, j) = stats.joint_error.at(j, i) = e;
    stats.pair_count.at(i, j) = stats.pair_count.at(j, i) = n_ij;
  });

  stats.n_gibbs = *std::min_element(stats.per_tree_count.begin(), stats.per_tree_count.end());
  std::int64_t n_pair = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      n_pair = std::min(n_pair, static_cast<std::int64_t>(stats.pair_count.at(i, j)));
  stats.n_pair = m > 1 ? n_pair : stats.n_gibbs;
  return stats;
}

namespace {

void check_weights(const OobStatistics& stats, std::span<const double> w) {
  if (w.size() != stats.per_tree_loss.size())
    throw ConfigError("weight vector length does not match ensemble size");
}

}  // namespace

double gibbs_loss(const OobStatistics& stats, std::span<const double> weights) {
  check_weights(stats, weights);
  double loss = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    loss += weights[i] * stats.per_tree_loss[i];
  return loss;
}

double rho_disagreement(const OobStatistics& stats, std::span<const double> weights) {
  check_weights(stats, weights);
  const std::size_t m = weights.size();
  double out = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out += weights[i] * weights[j] * stats.disagreement.at(i, j);
  return out;
}

double rho_joint_error(const OobStatistics& stats, std::span<const double> weights) {
  check_weights(stats, weights);
  const std::size_t m = weights.size();
  double out = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out += weights[i] * weights[j] * stats.joint_error.at(i, j);
  return out;
}

double oob_mv_estimate(const Ensemble& ens, const Dataset& train,
                       std::span<const double> weights, std::size_t* uncovered) {
  const std::size_t m = ens.size();
  if (weights.size() != m)
    throw ConfigError("weight vector length does not match ensemble size");

  std::vector<char> in_bag(m * train.n_rows, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::int32_t r : ens.bootstrap[i])
      in_bag[i * train.n_rows + static_cast<std::size_t>(r)] = 1;

  std::size_t skipped = 0, covered = 0, errors = 0;
  for (std::size_t r = 0; r < train.n_rows; ++r) {
    double vote = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (in_bag[i * train.n_rows + r]) continue;
      any = true;
      vote += weights[i] * ens.trees[i].predict(train.row(r));
    }
    if (!any) {
      ++skipped;
      continue;
    }
    ++covered;
    if (static_cast<double>(train.labels[r]) * vote <= 0.0) ++errors;
  }
  if (uncovered) *uncovered = skipped;
  if (covered == 0) throw DataError("no training row is out-of-bag for any tree");
  return static_cast<double>(errors) / static_cast<double>(covered);
}

}  // namespace pbrf
