#include <algorithm>
#include <cmath>
#include <numeric>

#include "bonefrag/seeding.hpp"
#include "models.hpp"

namespace bonefrag::detail {
namespace {

using MatF = Eigen::MatrixXf;
using VecF = Eigen::VectorXf;

struct Layer {
  MatF w;  // out x in
  VecF b;
};

MatF forward_eval(const std::vector<Layer>& layers, MatF a) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    MatF z = layers[l].w * a;
    z.colwise() += layers[l].b;
    a = l + 1 < layers.size() ? MatF(z.cwiseMax(0.0f)) : z;
  }
  return a;
}

class NeuralNetModel final : public Model {
 public:
  explicit NeuralNetModel(std::vector<Layer> layers) : layers_(std::move(layers)) {}

  std::vector<int> predict(const Matrix& z) const override {
    const MatF logits = forward_eval(layers_, z.cast<float>().transpose());
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index r = 0; r < logits.cols(); ++r) {
      out[static_cast<std::size_t>(r)] = argmax(logits.col(r), static_cast<int>(logits.rows()));
    }
    return out;
  }

  std::vector<double> parameters() const override {
    std::vector<double> p;
    for (const auto& l : layers_) {
      p.insert(p.end(), l.w.data(), l.w.data() + l.w.size());
      p.insert(p.end(), l.b.data(), l.b.data() + l.b.size());
    }
    return p;
  }

 private:
  std::vector<Layer> layers_;
};

// Adadelta state for one parameter block.
struct Accumulators {
  MatF sq_grad;
  MatF sq_delta;
};

void adadelta_step(MatF& param, const MatF& grad, Accumulators& acc, float rho, float eps, float lr) {
  acc.sq_grad = rho * acc.sq_grad + (1.0f - rho) * grad.cwiseAbs2();
  const MatF delta =
      ((acc.sq_delta.array() + eps).sqrt() / (acc.sq_grad.array() + eps).sqrt() * grad.array()).matrix();
  acc.sq_delta = rho * acc.sq_delta + (1.0f - rho) * delta.cwiseAbs2();
  param -= lr * delta;
}

}  // namespace

std::shared_ptr<const Model> train_neural_net(const NeuralNetParams& p, const TrainingSet& data,
                                              std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(data.rows.rows());
  const MatF x = data.rows.cast<float>().transpose();  // d x n

  std::vector<int> sizes{static_cast<int>(data.rows.cols())};
  sizes.insert(sizes.end(), p.hidden.begin(), p.hidden.end());
  sizes.push_back(data.n_classes);

  std::vector<Layer> layers;
  std::vector<Accumulators> acc_w;
  std::vector<Accumulators> acc_b;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const float bound = 1.0f / std::sqrt(static_cast<float>(sizes[l]));
    std::uniform_real_distribution<float> init(-bound, bound);
    Layer layer{MatF(sizes[l + 1], sizes[l]), VecF(sizes[l + 1])};
    for (Eigen::Index i = 0; i < layer.w.size(); ++i) layer.w.data()[i] = init(rng);
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) layer.b[i] = init(rng);
    acc_w.push_back({MatF::Zero(layer.w.rows(), layer.w.cols()), MatF::Zero(layer.w.rows(), layer.w.cols())});
    acc_b.push_back({MatF::Zero(layer.b.rows(), 1), MatF::Zero(layer.b.rows(), 1)});
    layers.push_back(std::move(layer));
  }
  const std::size_t n_layers = layers.size();
  const std::size_t n_hidden = p.hidden.size();
  const float keep = 1.0f - static_cast<float>(p.dropout);
  std::bernoulli_distribution keep_draw(keep);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<MatF> acts(n_layers + 1);
  std::vector<MatF> masks(n_layers);
  float lr = static_cast<float>(p.learning_rate);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += p.batch_size) {
      const Eigen::Index bsize = std::min<Eigen::Index>(p.batch_size, n - start);
      acts[0].resize(x.rows(), bsize);
      for (Eigen::Index c = 0; c < bsize; ++c) acts[0].col(c) = x.col(order[static_cast<std::size_t>(start + c)]);

      for (std::size_t l = 0; l < n_layers; ++l) {
        MatF z = layers[l].w * acts[l];
        z.colwise() += layers[l].b;
        if (l + 1 == n_layers) {
          acts[l + 1] = std::move(z);
          break;
        }
        acts[l + 1] = z.cwiseMax(0.0f);
        // Dropout sits between consecutive hidden layers only.
        if (l + 1 < n_hidden && p.dropout > 0) {
          masks[l].resize(z.rows(), z.cols());
          for (Eigen::Index i = 0; i < masks[l].size(); ++i) masks[l].data()[i] = keep_draw(rng) ? 1.0f / keep : 0.0f;
          acts[l + 1] = acts[l + 1].cwiseProduct(masks[l]);
        }
      }

      // Softmax cross-entropy, mean over the batch.
      MatF delta = acts[n_layers];
      for (Eigen::Index c = 0; c < bsize; ++c) {
        auto col = delta.col(c);
        col.array() -= col.maxCoeff();
        col = col.array().exp().matrix();
        col /= col.sum();
        col[data.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + c)])]] -= 1.0f;
      }
      delta /= static_cast<float>(bsize);

      for (std::size_t l = n_layers; l-- > 0;) {
        const MatF grad_w = delta * acts[l].transpose();
        const MatF grad_b = delta.rowwise().sum();
        if (l > 0) {
          MatF back = layers[l].w.transpose() * delta;
          if (l < n_hidden && p.dropout > 0) back = back.cwiseProduct(masks[l - 1]);
          back = (acts[l].array() > 0.0f).select(back, 0.0f);
          delta = std::move(back);
        }
        adadelta_step(layers[l].w, grad_w, acc_w[l], static_cast<float>(p.rho), static_cast<float>(p.eps), lr);
        MatF b = layers[l].b;
        adadelta_step(b, grad_b, acc_b[l], static_cast<float>(p.rho), static_cast<float>(p.eps), lr);
        layers[l].b = b;
      }
    }
    lr *= static_cast<float>(p.lr_decay);
  }
  return std::make_shared<NeuralNetModel>(std::move(layers));
}

}  // namespace bonefrag::detail
