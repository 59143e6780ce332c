#include "pbrf/forest.hpp"

#include <algorithm>
#include <cmath>

#include "pbrf/errors.hpp"
#include "pbrf/parallel.hpp"

namespace pbrf {

namespace {

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

double gini(std::size_t pos, std::size_t neg) {
  const double n = static_cast<double>(pos + neg);
  if (n == 0.0) return 0.0;
  const double pp = pos / n, pn = neg / n;
  return 1.0 - pp * pp - pn * pn;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TreeConfig& cfg, Rng& rng)
      : data_(data), cfg_(cfg), rng_(rng) {}

  TreeModel build(std::span<const std::int32_t> rows) {
    if (rows.empty()) throw ConfigError("train_tree: empty row set");
    TreeModel model;
    work_.assign(rows.begin(), rows.end());
    grow(model, 0, work_.size(), 0);
    return model;
  }

 private:
  // Grows the subtree for work_[begin, end), returns its node index.
  std::int32_t grow(TreeModel& model, std::size_t begin, std::size_t end, int depth) {
    std::size_t pos = 0;
    for (std::size_t i = begin; i < end; ++i)
      if (data_.labels[work_[i]] > 0) ++pos;
    const std::size_t n = end - begin;
    const std::size_t neg = n - pos;

    const std::int32_t id = static_cast<std::int32_t>(model.nodes.size());
    model.nodes.emplace_back();
    if (pos == n || neg == n || depth >= cfg_.max_depth) {
      model.nodes[id].leaf_label = pos >= neg ? 1 : -1;
      return id;
    }

    SplitChoice best = find_split(begin, end, pos);
    if (best.feature < 0) {  // no impurity-reducing split (conflicting duplicates)
      model.nodes[id].leaf_label = pos >= neg ? 1 : -1;
      return id;
    }

    auto mid_it = std::partition(
        work_.begin() + begin, work_.begin() + end, [&](std::int32_t r) {
          return data_.at(r, best.feature) <= best.threshold;
        });
    const std::size_t mid = static_cast<std::size_t>(mid_it - work_.begin());

    model.nodes[id].feature = best.feature;
    model.nodes[id].threshold = best.threshold;
    const std::int32_t left = grow(model, begin, mid, depth + 1);
    model.nodes[id].left = left;
    const std::int32_t right = grow(model, mid, end, depth + 1);
    model.nodes[id].right = right;
    return id;
  }

  SplitChoice find_split(std::size_t begin, std::size_t end, std::size_t pos_total) {
    const std::size_t n = end - begin;
    const double parent = gini(pos_total, n - pos_total);

    SplitChoice best;
    auto consider = [&](int feature) {
      sorted_.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const std::int32_t r = work_[i];
        sorted_.push_back({data_.at(r, feature), data_.labels[r] > 0});
      }
      std::sort(sorted_.begin(), sorted_.end(),
                [](const Cell& a, const Cell& b) { return a.value < b.value; });

      std::size_t left_pos = 0, left_n = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_n += 1;
        left_pos += sorted_[i].positive ? 1 : 0;
        if (sorted_[i].value == sorted_[i + 1].value) continue;
        const std::size_t right_n = n - left_n;
        const double child =
            (left_n * gini(left_pos, left_n - left_pos) +
             right_n * gini(pos_total - left_pos, right_n - (pos_total - left_pos))) /
            static_cast<double>(n);
        const double gain = parent - child;
        // Strict improvement keeps the first (lowest feature index, lowest
        // threshold) among ties.
        if (gain > best.gain + 1e-12) {
          best.gain = gain;
          best.feature = feature;
          best.threshold = sorted_[i].value + 0.5 * (sorted_[i + 1].value - sorted_[i].value);
        }
      }
    };

    if (cfg_.split_mode == SplitFeatureMode::AllFeatures) {
      for (std::size_t f = 0; f < data_.n_cols; ++f) consider(static_cast<int>(f));
    } else {
      consider(static_cast<int>(rng_.below(data_.n_cols)));
    }
    return best;
  }

  struct Cell {
    double value;
    bool positive;
  };

  const Dataset& data_;
  const TreeConfig& cfg_;
  Rng& rng_;
  std::vector<std::int32_t> work_;
  std::vector<Cell> sorted_;
};

}  // namespace

TreeModel train_tree(const Dataset& data, std::span<const std::int32_t> rows,
                     const TreeConfig& cfg, Rng& rng) {
  if (cfg.max_depth < 1) throw ConfigError("max_depth must be >= 1 when finite");
  return TreeBuilder(data, cfg, rng).build(rows);
}

Ensemble train_forest(const Dataset& data, std::size_t m, const TreeConfig& cfg,
                      std::uint64_t seed) {
  if (m < 1) throw ConfigError("tree count must be >= 1");
  if (data.n_rows == 0) throw DataError("train_forest: empty dataset");

  Ensemble ens;
  ens.trees.resize(m);
  ens.bootstrap.resize(m);
  ens.weights.assign(m, 1.0 / static_cast<double>(m));

  const std::size_t n = data.n_rows;
  parallel_for(m, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    auto& sample = ens.bootstrap[i];
    sample.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      sample[k] = static_cast<std::int32_t>(rng.below(n));
    ens.trees[i] = train_tree(data, sample, cfg, rng);
  });
  return ens;
}

std::int8_t mv_predict(const Ensemble& ens, const double* x) {
  if (ens.trees.empty()) throw ConfigError("mv_predict: empty ensemble");
  double vote = 0.0;
  for (std::size_t i = 0; i < ens.trees.size(); ++i)
    vote += ens.weights[i] * ens.trees[i].predict(x);
  return vote >= 0.0 ? 1 : -1;
}

std::vector<double> margins(const Ensemble& ens, const Dataset& data,
                            std::span<const double> weights) {
  if (weights.size() != ens.trees.size())
    throw ConfigError("margins: weight vector length does not match ensemble");
  std::vector<double> out(data.n_rows);
  for (std::size_t r = 0; r < data.n_rows; ++r) {
    double wrong_mass = 0.0;
    for (std::size_t i = 0; i < ens.trees.size(); ++i)
      if (ens.trees[i].predict(data.row(r)) != data.labels[r])
        wrong_mass += weights[i];
    out[r] = 1.0 - 2.0 * wrong_mass;
  }
  return out;
}

std::vector<double> margins(const Ensemble& ens, const Dataset& data) {
  return margins(ens, data, ens.weights);
}

double mv_loss(const Ensemble& ens, const Dataset& data,
               std::span<const double> weights) {
  if (data.n_rows == 0) throw DataError("mv_loss: empty dataset");
  const std::vector<double> m = margins(ens, data, weights);
  std::size_t errors = 0;
  for (double v : m)
    if (v <= 0.0) ++errors;
  return static_cast<double>(errors) / static_cast<double>(data.n_rows);
}

double mv_loss(const Ensemble& ens, const Dataset& data) {
  return mv_loss(ens, data, ens.weights);
}

double weighted_vote_loss(const Ensemble& ens, const Dataset& data,
                          std::span<const double> vote_weights) {
  if (vote_weights.size() != ens.trees.size())
    throw ConfigError("weighted_vote_loss: weight vector length does not match ensemble");
  if (data.n_rows == 0) throw DataError("weighted_vote_loss: empty dataset");
  std::size_t errors = 0;
  for (std::size_t r = 0; r < data.n_rows; ++r) {
    double vote = 0.0;
    for (std::size_t i = 0; i < ens.trees.size(); ++i)
      vote += vote_weights[i] * ens.trees[i].predict(data.row(r));
    if (static_cast<double>(data.labels[r]) * vote <= 0.0) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.n_rows);
}

}  // namespace pbrf
