#include <algorithm>
#include <cmath>
#include <numeric>

#include "covtweet/classical.hpp"
#include "covtweet/errors.hpp"
#include "covtweet/rng.hpp"

namespace covtweet::classical {

namespace {

int class_index(Label l) { return l == Label::Informative ? 0 : 1; }

// Column-major view of the training matrix; rows within a column ascend.
struct Columns {
  std::vector<std::vector<std::pair<std::int32_t, double>>> cols;

  explicit Columns(const std::vector<SparseVector>& X, Eigen::Index v)
      : cols(static_cast<std::size_t>(v)) {
    for (std::size_t i = 0; i < X.size(); ++i) {
      for (std::size_t k = 0; k < X[i].nnz(); ++k) {
        cols[X[i].indices[k]].emplace_back(static_cast<std::int32_t>(i),
                                           X[i].values[k]);
      }
    }
  }
};

double gini(const std::array<double, 2>& counts) {
  const double n = counts[0] + counts[1];
  if (n <= 0.0) return 0.0;
  const double p0 = counts[0] / n;
  const double p1 = counts[1] / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = -1.0;  // weighted impurity decrease
};

class TreeBuilder {
 public:
  TreeBuilder(const Columns& columns, const std::vector<Label>& y,
              int max_depth, int n_features_per_split, rng::Engine eng)
      : columns_(columns),
        y_(y),
        max_depth_(max_depth),
        n_features_per_split_(n_features_per_split),
        eng_(eng) {}

  Tree build(std::vector<std::int32_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  // rows is sorted and may repeat indices (bootstrap multiplicity).
  std::int32_t grow(std::vector<std::int32_t> rows, int depth) {
    std::array<double, 2> counts{0.0, 0.0};
    for (const std::int32_t r : rows) {
      counts[class_index(y_[r])] += 1.0;
    }
    const auto node_id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    set_leaf_dist(node_id, counts);

    if (depth >= max_depth_ || rows.size() < 2 || counts[0] == 0.0 ||
        counts[1] == 0.0) {
      return node_id;
    }
    const SplitChoice split = best_split(rows, counts);
    if (split.feature < 0) {
      return node_id;
    }

    std::vector<std::int32_t> left_rows;
    std::vector<std::int32_t> right_rows;
    partition(rows, split, left_rows, right_rows);
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[node_id].feature = split.feature;
    tree_.nodes[node_id].threshold = split.threshold;
    const std::int32_t left = grow(std::move(left_rows), depth + 1);
    tree_.nodes[node_id].left = left;
    const std::int32_t right = grow(std::move(right_rows), depth + 1);
    tree_.nodes[node_id].right = right;
    return node_id;
  }

  void set_leaf_dist(std::int32_t node_id, const std::array<double, 2>& c) {
    const double n = c[0] + c[1];
    tree_.nodes[node_id].leaf_dist = {c[0] / n, c[1] / n};
  }

  // (value, label) pairs of `rows` in feature column `f`, including the
  // implicit zeros. Rows may repeat; column rows are unique.
  void gather_column(const std::vector<std::int32_t>& rows, std::int32_t f,
                     std::vector<std::pair<double, int>>& out) const {
    out.clear();
    const auto& col = columns_.cols[static_cast<std::size_t>(f)];
    std::size_t ci = 0;
    for (const std::int32_t r : rows) {
      while (ci < col.size() && col[ci].first < r) ++ci;
      const double value =
          (ci < col.size() && col[ci].first == r) ? col[ci].second : 0.0;
      out.push_back({value, class_index(y_[r])});
    }
  }

  SplitChoice best_split(const std::vector<std::int32_t>& rows,
                         const std::array<double, 2>& counts) {
    const double n = counts[0] + counts[1];
    const double impurity_before = gini(counts);
    SplitChoice best;

    sample_features();
    std::vector<std::pair<double, int>> vals;
    for (const std::int32_t f : feature_sample_) {
      gather_column(rows, f, vals);
      std::sort(vals.begin(), vals.end());
      if (vals.front().first == vals.back().first) continue;

      std::array<double, 2> left{0.0, 0.0};
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left[vals[i].second] += 1.0;
        if (vals[i].first == vals[i + 1].first) continue;
        const std::array<double, 2> right{counts[0] - left[0],
                                          counts[1] - left[1]};
        const double nl = left[0] + left[1];
        const double nr = right[0] + right[1];
        const double score =
            impurity_before - (nl * gini(left) + nr * gini(right)) / n;
        if (score > best.score + 1e-12) {
          best.score = score;
          best.feature = f;
          best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        }
      }
    }
    if (best.score <= 1e-12) best.feature = -1;
    return best;
  }

  void partition(const std::vector<std::int32_t>& rows,
                 const SplitChoice& split, std::vector<std::int32_t>& left,
                 std::vector<std::int32_t>& right) const {
    const auto& col = columns_.cols[static_cast<std::size_t>(split.feature)];
    std::size_t ci = 0;
    for (const std::int32_t r : rows) {
      while (ci < col.size() && col[ci].first < r) ++ci;
      const double value =
          (ci < col.size() && col[ci].first == r) ? col[ci].second : 0.0;
      (value <= split.threshold ? left : right).push_back(r);
    }
  }

  void sample_features() {
    const auto v = static_cast<std::int32_t>(columns_.cols.size());
    if (static_cast<std::int32_t>(universe_.size()) != v) {
      universe_.resize(static_cast<std::size_t>(v));
      std::iota(universe_.begin(), universe_.end(), 0);
    }
    const int k = std::min(n_features_per_split_, static_cast<int>(v));
    // partial Fisher-Yates: the first k entries become the sample
    for (int i = 0; i < k; ++i) {
      const auto j =
          i + static_cast<std::int32_t>(rng::below(
                  eng_, static_cast<std::uint64_t>(v - i)));
      std::swap(universe_[static_cast<std::size_t>(i)],
                universe_[static_cast<std::size_t>(j)]);
    }
    feature_sample_.assign(universe_.begin(), universe_.begin() + k);
  }

  const Columns& columns_;
  const std::vector<Label>& y_;
  const int max_depth_;
  const int n_features_per_split_;
  rng::Engine eng_;
  Tree tree_;
  std::vector<std::int32_t> universe_;
  std::vector<std::int32_t> feature_sample_;
};

}  // namespace

ForestParams forest_fit(const std::vector<SparseVector>& X,
                        const std::vector<Label>& y, int n_trees,
                        int max_depth, std::uint64_t seed) {
  if (X.empty() || X.size() != y.size()) {
    throw DataError("forest_fit: " + std::to_string(X.size()) +
                    " feature vectors for " + std::to_string(y.size()) +
                    " labels");
  }
  const Eigen::Index v = X[0].dim;
  const Columns columns(X, v);
  const int features_per_split = std::max(
      1, static_cast<int>(std::sqrt(static_cast<double>(v))));

  ForestParams forest;
  forest.max_depth = max_depth;
  forest.seed = seed;
  forest.trees.reserve(static_cast<std::size_t>(n_trees));
  const auto n = static_cast<std::int32_t>(X.size());
  for (int t = 0; t < n_trees; ++t) {
    // per-tree stream: bootstrap first, then node feature sampling
    auto eng = rng::make_engine(seed, static_cast<std::uint64_t>(t));
    std::vector<std::int32_t> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) {
      r = static_cast<std::int32_t>(
          rng::below(eng, static_cast<std::uint64_t>(n)));
    }
    std::sort(rows.begin(), rows.end());
    TreeBuilder builder(columns, y, max_depth, features_per_split, eng);
    forest.trees.push_back(builder.build(std::move(rows)));
  }
  return forest;
}

std::array<int, 2> forest_votes(const SparseVector& x,
                                const ForestParams& p) {
  std::array<int, 2> votes{0, 0};
  for (const Tree& tree : p.trees) {
    std::int32_t node = 0;
    while (tree.nodes[node].feature >= 0) {
      const TreeNode& nd = tree.nodes[node];
      node = x.at(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    const auto& dist = tree.nodes[node].leaf_dist;
    // within-leaf ties break to the majority class
    votes[dist[0] > dist[1] ? 0 : 1] += 1;
  }
  return votes;
}

Label forest_predict(const SparseVector& x, const ForestParams& p) {
  const auto votes = forest_votes(x, p);
  return votes[0] > votes[1] ? Label::Informative : Label::Uninformative;
}

}  // namespace covtweet::classical
