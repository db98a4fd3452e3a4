#include "bonefrag/unsupervised.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"
#include "bonefrag/standardizer.hpp"

namespace bonefrag {

SimilarityGraph build_knn_graph(const Matrix& rows, int k_neighbors) {
  const Eigen::Index n = rows.rows();
  if (k_neighbors < 1) throw ContractViolation("build_knn_graph: k_neighbors must be >= 1");
  if (n <= k_neighbors) {
    throw ContractViolation("build_knn_graph: need more than k_neighbors=" + std::to_string(k_neighbors) +
                            " rows, got " + std::to_string(n));
  }
  const Eigen::VectorXd norms = rows.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (rows * rows.transpose());
  d2.colwise() += norms;
  d2.rowwise() += norms.transpose();
  d2 = d2.cwiseMax(0.0);

  const auto k = static_cast<std::size_t>(k_neighbors);
  std::vector<std::vector<Eigen::Index>> neighbours(static_cast<std::size_t>(n));
  Eigen::VectorXd sigma(n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::swap(order[static_cast<std::size_t>(i)], order.back());
    order.pop_back();
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        return d2(i, a) != d2(i, b) ? d2(i, a) < d2(i, b) : a < b;
                      });
    neighbours[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    const std::size_t scale_rank = (k + 1) / 2;  // ceil(k/2), 1-based
    sigma[i] = std::max(std::sqrt(d2(i, neighbours[static_cast<std::size_t>(i)][scale_rank - 1])), 1e-12);
    order.resize(static_cast<std::size_t>(n));
  }

  SimilarityGraph g;
  g.k_neighbors = k_neighbors;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j : neighbours[static_cast<std::size_t>(i)]) {
      double w = std::exp(-d2(i, j) / (sigma[i] * sigma[j]));
      if (w < kEdgeThreshold) w = 0.0;
      g.adjacency(i, j) = std::max(g.adjacency(i, j), w);
      g.adjacency(j, i) = std::max(g.adjacency(j, i), w);
    }
  }
  return g;
}

SpectralEmbedding spectral_embedding(const SimilarityGraph& graph, int k_dims, Diagnostics* diagnostics) {
  const Eigen::Index n = graph.size();
  if (k_dims < 1) throw ContractViolation("spectral_embedding: k_dims must be >= 1");
  if (n < k_dims + 1) throw ContractViolation("spectral_embedding: need at least k_dims + 1 nodes");
  Eigen::VectorXd degree = graph.adjacency.rowwise().sum();
  long isolated = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (degree[i] <= 0.0) {
      degree[i] = 1e-12;
      ++isolated;
    }
  }
  if (isolated > 0) {
    emit_warning(diagnostics, "spectral_embedding: " + std::to_string(isolated) +
                                  " isolated node(s); degree floored at 1e-12");
  }
  const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * graph.adjacency * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw Error("spectral_embedding: eigen-decomposition failed");

  SpectralEmbedding out;
  out.eigenvalues = solver.eigenvalues().head(k_dims);
  out.coordinates = solver.eigenvectors().leftCols(k_dims);
  for (Eigen::Index c = 0; c < k_dims; ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(out.coordinates(i, c)) > std::abs(out.coordinates(arg, c))) arg = i;
    }
    if (out.coordinates(arg, c) < 0) out.coordinates.col(c) *= -1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = out.coordinates.row(i).norm();
    if (norm > 0) out.coordinates.row(i) /= norm;
  }
  return out;
}

namespace {

struct Restart {
  std::vector<int> labels;
  Matrix centers;
  double inertia = 0.0;
  std::vector<double> trace;
};

double assign(const Matrix& x, const Matrix& centers, std::vector<int>& labels, Eigen::VectorXd& dist) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = (x.row(i) - centers.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < centers.rows(); ++c) {
      const double d = (x.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

Matrix plus_plus(const Matrix& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Matrix centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= d2[pick];
        if (target < 0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

Restart lloyd(const Matrix& x, int k, int max_iter, Rng& rng) {
  const Eigen::Index n = x.rows();
  Restart r;
  r.centers = plus_plus(x, k, rng);
  r.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> prev;
  Eigen::VectorXd dist(n);
  for (int it = 0; it < max_iter; ++it) {
    prev = r.labels;
    r.inertia = assign(x, r.centers, r.labels, dist);
    if (it > 0) r.trace.push_back(r.inertia);
    if (r.labels == prev) break;
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        r.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Empty cluster: move it onto the point worst served by its center.
        Eigen::Index far = 0;
        dist.maxCoeff(&far);
        r.centers.row(c) = x.row(far);
        dist[far] = 0.0;
      }
    }
    r.trace.push_back((x - r.centers(r.labels, Eigen::all)).rowwise().squaredNorm().sum());
  }
  return r;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts, int max_iter) {
  if (k < 1) throw ContractViolation("kmeans: k must be >= 1");
  if (points.rows() < k) throw ContractViolation("kmeans: fewer points than clusters");
  if (restarts < 1 || max_iter < 1) throw ContractViolation("kmeans: restarts and max_iter must be >= 1");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Restart run = lloyd(points, k, max_iter, rng);
    if (run.inertia < best.inertia) {
      best.labels = std::move(run.labels);
      best.inertia = run.inertia;
      best.centers = std::move(run.centers);
      best.best_restart = static_cast<std::size_t>(r);
      best.inertia_trace = std::move(run.trace);
    }
  }
  return best;
}

SpectralClustering spectral_clustering(const Matrix& rows, int k, std::uint64_t seed, const SpectralOptions& options,
                                       Diagnostics* diagnostics) {
  if (k < 1) throw ContractViolation("spectral_clustering: k must be >= 1");
  const Matrix z = Standardizer::fit(rows).transform(rows);
  const SimilarityGraph graph = build_knn_graph(z, options.k_neighbors);
  SpectralClustering out;
  out.embedding = spectral_embedding(graph, options.k_dims > 0 ? options.k_dims : k, diagnostics);
  out.clusters = kmeans(out.embedding.coordinates, k, seed, options.restarts);
  return out;
}

namespace {

std::vector<int> dense_ranks(std::span<const int> labels, std::vector<int>& distinct) {
  distinct.assign(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
  }
  return out;
}

}  // namespace

ClusteringScore clustering_score(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw ContractViolation("clustering_accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                            std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw ContractViolation("clustering_accuracy: empty input");
  std::vector<int> pred_values;
  std::vector<int> true_values;
  const std::vector<int> p = dense_ranks(predicted, pred_values);
  const std::vector<int> t = dense_ranks(truth, true_values);
  const std::size_t m = std::max(pred_values.size(), true_values.size());
  if (m > 8) throw ContractViolation("clustering_accuracy: more than 8 distinct labels");

  std::vector<std::vector<long>> counts(m, std::vector<long>(m, 0));  // [cluster][class]
  for (std::size_t i = 0; i < p.size(); ++i) ++counts[static_cast<std::size_t>(p[i])][static_cast<std::size_t>(t[i])];
  std::vector<std::size_t> perm(m);  // cluster -> class
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best_perm = perm;
  long best = -1;
  do {
    long hits = 0;
    for (std::size_t c = 0; c < m; ++c) hits += counts[c][perm[c]];
    if (hits > best) {
      best = hits;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ClusteringScore s;
  s.accuracy = static_cast<double>(best) / static_cast<double>(truth.size());
  s.per_class.assign(true_values.size(), 0.0);
  for (std::size_t cls = 0; cls < true_values.size(); ++cls) {
    long total = 0;
    long hit = 0;
    for (std::size_t c = 0; c < m; ++c) {
      total += counts[c][cls];
      if (best_perm[c] == cls) hit += counts[c][cls];
    }
    s.per_class[cls] = static_cast<double>(hit) / static_cast<double>(total);
  }
  return s;
}

double clustering_accuracy(std::span<const int> predicted, std::span<const int> truth) {
  return clustering_score(predicted, truth).accuracy;
}

std::string scatter_csv_text(const SpectralEmbedding& embedding, std::span<const std::string> ids,
                             std::span<const std::string> labels) {
  if (embedding.coordinates.cols() != 2) {
    throw ContractViolation("export_scatter: embedding has " + std::to_string(embedding.coordinates.cols()) +
                            " dimensions; scatter export needs exactly 2");
  }
  const auto n = static_cast<std::size_t>(embedding.coordinates.rows());
  if (n == 0) throw ContractViolation("export_scatter: empty embedding");
  if (ids.size() != n || labels.size() != n) throw ContractViolation("export_scatter: ids/labels length mismatch");
  std::ostringstream out;
  csv::write_row(out, {"id", "x", "y", "label"});
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    csv::write_row(out, {ids[i], csv::format_double(embedding.coordinates(r, 0)),
                         csv::format_double(embedding.coordinates(r, 1)), labels[i]});
  }
  return out.str();
}

void export_scatter(const SpectralEmbedding& embedding, std::span<const std::string> ids,
                    std::span<const std::string> labels, const std::filesystem::path& path) {
  const std::string text = scatter_csv_text(embedding, ids, labels);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::vector<ScatterPoint> read_scatter(const std::filesystem::path& path) {
  const csv::Document doc = csv::read(path);
  const std::size_t ci = doc.require_column("id", path.string());
  const std::size_t cx = doc.require_column("x", path.string());
  const std::size_t cy = doc.require_column("y", path.string());
  const std::size_t cl = doc.require_column("label", path.string());
  std::vector<ScatterPoint> out;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    ScatterPoint p;
    p.id = doc.rows[r][ci];
    p.label = doc.rows[r][cl];
    if (!csv::parse_double(doc.rows[r][cx], p.x) || !csv::parse_double(doc.rows[r][cy], p.y)) {
      throw DataError(path.string() + ":" + std::to_string(doc.line_numbers[r]) + ": bad coordinate");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string clustering_report_csv(TableLevel level, int k, const ClusteringScore& score,
                                  std::span<const std::string> class_names, std::uint64_t seed) {
  std::vector<std::string> header{"level", "k", "accuracy"};
  for (const auto& c : class_names) header.push_back("acc_class_" + c);
  header.push_back("seed");
  std::vector<std::string> row{std::string(to_string(level)), std::to_string(k), csv::format_double(score.accuracy)};
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    row.push_back(c < score.per_class.size() ? csv::format_double(score.per_class[c]) : "");
  }
  row.push_back(std::to_string(seed));
  std::ostringstream out;
  csv::write_row(out, header);
  csv::write_row(out, row);
  return out.str();
}

}  // namespace bonefrag
