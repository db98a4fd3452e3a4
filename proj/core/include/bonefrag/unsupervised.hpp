#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bonefrag/diagnostics.hpp"
#include "bonefrag/feature_table.hpp"
#include "bonefrag/seeding.hpp"

namespace bonefrag {

struct SimilarityGraph {
  Eigen::MatrixXd adjacency;  // symmetric, zero diagonal, non-negative
  int k_neighbors = 10;

  Eigen::Index size() const { return adjacency.rows(); }
};

// Weights below this are treated as absent edges.
inline constexpr double kEdgeThreshold = 1e-12;

// k-nearest-neighbour graph with self-tuning scales: sigma_i is the distance
// to the ceil(k/2)-th neighbour; w_ij = exp(-d_ij^2 / (sigma_i sigma_j)),
// symmetrized by max.
SimilarityGraph build_knn_graph(const Matrix& rows, int k_neighbors = 10);

struct SpectralEmbedding {
  Matrix coordinates;           // n x k_dims, rows unit length (or zero)
  Eigen::VectorXd eigenvalues;  // ascending
};

// Eigenvectors of I - D^-1/2 W D^-1/2 for the k_dims smallest eigenvalues.
// Each eigenvector is flipped so its largest-magnitude entry is positive.
SpectralEmbedding spectral_embedding(const SimilarityGraph& graph, int k_dims = 2,
                                     Diagnostics* diagnostics = nullptr);

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
  Matrix centers;
  std::size_t best_restart = 0;
  // Inertia after every Lloyd step of the winning restart.
  std::vector<double> inertia_trace;
};

// k-means++ seeding and Lloyd iterations. Restart r draws from
// derive_seed(seed, r); the lowest restart index wins inertia ties.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10, int max_iter = 300);

struct SpectralOptions {
  int k_neighbors = 10;
  int k_dims = 0;  // 0 means the cluster count
  int restarts = 10;
};

struct SpectralClustering {
  SpectralEmbedding embedding;
  KMeansResult clusters;
};

// Standardizes with full-data statistics (no labels involved), builds the
// graph, embeds and clusters.
SpectralClustering spectral_clustering(const Matrix& rows, int k, std::uint64_t seed,
                                       const SpectralOptions& options = {}, Diagnostics* diagnostics = nullptr);

struct ClusteringScore {
  double accuracy = 0.0;
  std::vector<double> per_class;  // indexed by dense true-label rank
};

// Best matching fraction over all one-to-one relabellings of the clusters.
// At most 8 distinct labels on either side.
ClusteringScore clustering_score(std::span<const int> predicted, std::span<const int> truth);
double clustering_accuracy(std::span<const int> predicted, std::span<const int> truth);

struct ScatterPoint {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

// `id,x,y,label`. The embedding must be two-dimensional.
void export_scatter(const SpectralEmbedding& embedding, std::span<const std::string> ids,
                    std::span<const std::string> labels, const std::filesystem::path& path);
std::string scatter_csv_text(const SpectralEmbedding& embedding, std::span<const std::string> ids,
                             std::span<const std::string> labels);
std::vector<ScatterPoint> read_scatter(const std::filesystem::path& path);

// `level,k,accuracy,acc_class_<name>...,seed`
std::string clustering_report_csv(TableLevel level, int k, const ClusteringScore& score,
                                  std::span<const std::string> class_names, std::uint64_t seed);

}  // namespace bonefrag
