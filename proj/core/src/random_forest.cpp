#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bonefrag/seeding.hpp"
#include "models.hpp"

namespace bonefrag::detail {
namespace {

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_class = 0;
};

using Tree = std::vector<Node>;

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> labels, std::span<const double> weights, int n_classes,
              int max_features, double min_leaf, Rng& rng)
      : x_(x), labels_(labels), weights_(weights), n_classes_(n_classes), max_features_(max_features),
        min_leaf_(min_leaf), rng_(rng) {}

  Tree build(std::vector<int> samples) {
    samples_ = std::move(samples);
    Tree tree;
    struct Pending {
      int node;
      std::size_t begin;
      std::size_t end;
    };
    std::vector<Pending> stack;
    tree.emplace_back();
    stack.push_back({0, 0, samples_.size()});
    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      std::vector<double> counts(static_cast<std::size_t>(n_classes_), 0.0);
      for (std::size_t i = job.begin; i < job.end; ++i) {
        const int s = samples_[i];
        counts[static_cast<std::size_t>(labels_[static_cast<std::size_t>(s)])] += weights_[static_cast<std::size_t>(s)];
      }
      tree[static_cast<std::size_t>(job.node)].leaf_class = argmax(counts, n_classes_);
      const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
      const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
      if (pure || total < 2.0 * min_leaf_) continue;

      const Split split = best_split(job.begin, job.end, counts, total);
      if (split.feature < 0) continue;

      const auto mid = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(job.begin),
                                      samples_.begin() + static_cast<std::ptrdiff_t>(job.end), [&](int s) {
                                        return x_(s, split.feature) <= split.threshold;
                                      });
      const auto mid_index = static_cast<std::size_t>(mid - samples_.begin());
      const int left = static_cast<int>(tree.size());
      tree.emplace_back();
      tree.emplace_back();
      Node& node = tree[static_cast<std::size_t>(job.node)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, mid_index, job.end});
      stack.push_back({left, job.begin, mid_index});
    }
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  static double gini_sum(const std::vector<double>& counts, double total) {
    if (total <= 0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return total - sq / total;  // total * gini
  }

  Split best_split(std::size_t begin, std::size_t end, const std::vector<double>& parent_counts, double total) {
    const int d = static_cast<int>(x_.cols());
    std::vector<int> features(static_cast<std::size_t>(d));
    std::iota(features.begin(), features.end(), 0);
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    int evaluated = 0;
    std::vector<std::pair<double, int>> values;
    std::vector<double> left(static_cast<std::size_t>(n_classes_));
    std::vector<double> right(static_cast<std::size_t>(n_classes_));
    for (int f = 0; f < d && evaluated < max_features_; ++f) {
      std::uniform_int_distribution<int> pick(f, d - 1);
      std::swap(features[static_cast<std::size_t>(f)], features[static_cast<std::size_t>(pick(rng_))]);
      const int feature = features[static_cast<std::size_t>(f)];
      values.clear();
      for (std::size_t i = begin; i < end; ++i) values.emplace_back(x_(samples_[i], feature), samples_[i]);
      std::sort(values.begin(), values.end());
      if (values.front().first == values.back().first) continue;  // constant here; does not count
      ++evaluated;
      std::fill(left.begin(), left.end(), 0.0);
      right = parent_counts;
      double w_left = 0.0;
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const auto s = static_cast<std::size_t>(values[i].second);
        const double w = weights_[s];
        left[static_cast<std::size_t>(labels_[s])] += w;
        right[static_cast<std::size_t>(labels_[s])] -= w;
        w_left += w;
        if (values[i].first == values[i + 1].first) continue;
        const double w_right = total - w_left;
        if (w_left < min_leaf_ || w_right < min_leaf_) continue;
        const double impurity = gini_sum(left, w_left) + gini_sum(right, w_right);
        if (impurity < best.impurity) {
          double threshold = 0.5 * (values[i].first + values[i + 1].first);
          if (threshold >= values[i + 1].first) threshold = values[i].first;
          best = {feature, threshold, impurity};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> labels_;
  std::span<const double> weights_;
  int n_classes_;
  int max_features_;
  double min_leaf_;
  Rng& rng_;
  std::vector<int> samples_;
};

class RandomForestModel final : public Model {
 public:
  RandomForestModel(std::vector<Tree> trees, int n_classes) : trees_(std::move(trees)), n_classes_(n_classes) {}

  std::vector<int> predict(const Matrix& z) const override {
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    std::vector<int> votes(static_cast<std::size_t>(n_classes_));
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      std::fill(votes.begin(), votes.end(), 0);
      for (const auto& tree : trees_) {
        const Node* node = &tree.front();
        while (node->feature >= 0) {
          node = &tree[static_cast<std::size_t>(z(r, node->feature) <= node->threshold ? node->left : node->right)];
        }
        ++votes[static_cast<std::size_t>(node->leaf_class)];
      }
      out[static_cast<std::size_t>(r)] = argmax(votes, n_classes_);
    }
    return out;
  }

  std::vector<double> parameters() const override {
    std::vector<double> p;
    for (const auto& tree : trees_) {
      for (const auto& n : tree) {
        p.insert(p.end(), {static_cast<double>(n.feature), n.threshold, static_cast<double>(n.left),
                           static_cast<double>(n.right), static_cast<double>(n.leaf_class)});
      }
    }
    return p;
  }

 private:
  std::vector<Tree> trees_;
  int n_classes_;
};

}  // namespace

std::shared_ptr<const Model> train_random_forest(const RandomForestParams& p, const TrainingSet& data,
                                                 std::uint64_t seed) {
  // Trees are grown on weighted unique rows; a bootstrap of the original
  // rows becomes a vector of per-unique-row counts.
  const CompressedRows c = compress_rows(data.rows, data.labels);
  const auto n = static_cast<std::size_t>(data.rows.rows());
  const int d = static_cast<int>(data.rows.cols());
  const int mtry = p.max_features > 0 ? std::min(p.max_features, d)
                                      : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))));
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(p.n_trees));
  std::vector<double> counts(c.weights.size());
  for (int t = 0; t < p.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::fill(counts.begin(), counts.end(), 0.0);
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) counts[c.unique_of_row[draw(rng)]] += 1.0;
    std::vector<int> samples;
    for (std::size_t u = 0; u < counts.size(); ++u) {
      if (counts[u] > 0) samples.push_back(static_cast<int>(u));
    }
    TreeBuilder builder(c.rows, c.labels, counts, data.n_classes, mtry, static_cast<double>(p.min_leaf), rng);
    trees.push_back(builder.build(std::move(samples)));
  }
  return std::make_shared<RandomForestModel>(std::move(trees), data.n_classes);
}

}  // namespace bonefrag::detail
