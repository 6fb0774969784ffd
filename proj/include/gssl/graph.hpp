#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>

#include "gssl/kernel.hpp"

namespace gssl {

/**
 * Symmetric non-negative similarity graph.  Matrices with >= 90% zero
 * entries are held in compressed sparse column form, everything else dense.
 */
struct WeightedGraph {
    int n = 0;
    bool sparse = false;
    Eigen::MatrixXd Wd;              // dense storage (empty when sparse)
    Eigen::SparseMatrix<double> Ws;  // sparse storage (empty when dense)
    Eigen::VectorXd degrees;         // d_i = sum_j w_ij

    Eigen::MatrixXd dense() const { return sparse ? Eigen::MatrixXd(Ws) : Wd; }
    double max_abs_weight() const;
};

/// Wrap a symmetric weight matrix, choosing the storage format and
/// populating degrees.
WeightedGraph make_graph(const Eigen::MatrixXd& W);
WeightedGraph make_graph(const Eigen::SparseMatrix<double>& W);

/// Entry (i,j) = ||x_i - x_j||^2 / p for an n x p sample matrix.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& X);

/// w_ij = h(||x_i - x_j||^2 / p), diagonal w_ii = h(0) included.
WeightedGraph build_weight_matrix(const Eigen::MatrixXd& X, const KernelFunction& kernel);

/// Binary symmetric k-nearest-neighbor graph (union rule, zero diagonal).
WeightedGraph knn_graph(const Eigen::MatrixXd& X, int k);

/// Centered similarities PWP with P = I - (1/n) 1 1^T; every row sums to 0.
Eigen::MatrixXd center_weights(const WeightedGraph& g);

/// L^(a) = I - D^{-1-a} W D^a.  a = 0 / -1/2 / -1 give the standard,
/// symmetric, and random-walk normalizations.
Eigen::MatrixXd a_normalized_laplacian(const WeightedGraph& g, double a);

struct ConcentrationStats {
    double mean = 0.0;     // empirical tau estimate
    double stddev = 0.0;
    double max_abs_dev = 0.0;
    int pair_count = 0;
};

/// Dispersion of off-diagonal normalized distances around their mean; in
/// high dimension they concentrate as tau + O(p^{-1/2}).
ConcentrationStats distance_concentration_stats(const Eigen::MatrixXd& X);

/// Edge-list CSV "i,j,w" with 0-based indices, upper triangle including
/// the diagonal, 17 significant digits.
void export_edge_list_csv(const WeightedGraph& g, const std::string& path);

}  // namespace gssl
