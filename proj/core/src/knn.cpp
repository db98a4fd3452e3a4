#include <algorithm>
#include <numeric>

#include "models.hpp"

namespace bonefrag::detail {
namespace {

// Stores the (compressed) training rows; duplicates count with multiplicity.
class KnnModel final : public Model {
 public:
  KnnModel(int k, int n_classes, CompressedRows train) : k_(k), n_classes_(n_classes), train_(std::move(train)) {
    total_weight_ = std::accumulate(train_.weights.begin(), train_.weights.end(), 0.0);
  }

  std::vector<int> predict(const Matrix& z) const override {
    const auto n = train_.rows.rows();
    const double k = std::min(static_cast<double>(k_), total_weight_);
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
    std::vector<double> votes(static_cast<std::size_t>(n_classes_));
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      for (Eigen::Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = {(train_.rows.row(i) - z.row(r)).squaredNorm(), i};
      // Enough unique rows to cover k neighbours even with multiplicity 1.
      const auto take = static_cast<std::size_t>(std::min<double>(static_cast<double>(n), k));
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
      std::fill(votes.begin(), votes.end(), 0.0);
      double remaining = k;
      std::size_t used = 0;
      for (; used < dist.size() && remaining > 0; ++used) {
        const auto i = static_cast<std::size_t>(dist[used].second);
        const double w = std::min(train_.weights[i], remaining);
        votes[static_cast<std::size_t>(train_.labels[i])] += w;
        remaining -= w;
      }
      const double best = *std::max_element(votes.begin(), votes.end());
      int label = -1;
      for (std::size_t j = 0; j < used && label < 0; ++j) {
        const int cls = train_.labels[static_cast<std::size_t>(dist[j].second)];
        if (votes[static_cast<std::size_t>(cls)] == best) label = cls;
      }
      out[static_cast<std::size_t>(r)] = label;
    }
    return out;
  }

  std::vector<double> parameters() const override {
    std::vector<double> p(train_.rows.data(), train_.rows.data() + train_.rows.size());
    p.insert(p.end(), train_.weights.begin(), train_.weights.end());
    for (int l : train_.labels) p.push_back(l);
    return p;
  }

 private:
  int k_;
  int n_classes_;
  CompressedRows train_;
  double total_weight_ = 0.0;
};

}  // namespace

std::shared_ptr<const Model> train_knn(const KnnParams& p, const TrainingSet& data) {
  return std::make_shared<KnnModel>(p.k, data.n_classes, compress_rows(data.rows, data.labels));
}

}  // namespace bonefrag::detail
