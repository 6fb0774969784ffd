#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gssl/graph.hpp"

namespace gssl {

/**
 * Two-way partition read off the sign pattern of a single eigenvector.
 * The eigenvector is orientation-fixed (first nonzero entry non-negative)
 * before the signs are taken, so results are deterministic.
 */
struct ClusterAssignment {
    std::vector<int> labels;    // in {1, 2}
    Eigen::VectorXd score;      // the eigenvector used, orientation-fixed
    double eigenvalue = 0.0;
    bool degenerate_gap = false;  // eigengap below 1e-10 (best effort above n=2000)
};

/// Partition by the eigenvector of L_s = I - D^{-1/2} W D^{-1/2} with the
/// second smallest eigenvalue.  Dense eigendecomposition for n <= 2000,
/// deflated power iteration above.
ClusterAssignment spectral_cluster_laplacian(const WeightedGraph& g);

/// Partition by the eigenvector of the centered similarities What = PWP
/// with the largest eigenvalue.
ClusterAssignment spectral_cluster_centered(const WeightedGraph& g);

struct ClusterQuality {
    double d_inter = 0.0;  // |mean of v over class 1 - mean over class 2|
    double d_intra = 0.0;  // norm of v minus its class-wise means, / sqrt(n)
    double ratio = 0.0;    // d_inter / d_intra, +inf when d_intra = 0
};

/// Separation functionals of a score vector against a two-class ground
/// truth (any two distinct label values; the smaller value is class 1).
ClusterQuality cluster_quality(const Eigen::VectorXd& v, const std::vector<int>& truth);

/// CSV "index,label,score" with 0-based indices and 17 significant digits.
void export_assignment_csv(const ClusterAssignment& assignment, const std::string& path);

}  // namespace gssl
