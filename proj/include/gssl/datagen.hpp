#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gssl/graph.hpp"
#include "gssl/model.hpp"

namespace gssl {

/**
 * Feature matrix with a labeled prefix: rows 0..n_l-1 are the labeled
 * samples.  y holds the ground truth (+/-1) for every row, labeled or not,
 * so accuracy on the unlabeled part can always be scored.
 */
struct SplitDataset {
    Eigen::MatrixXd X;   // n x p
    int n_l = 0;
    std::vector<int> y;  // ground truth in {-1,+1}; empty when unknown
};

/**
 * Gaussian-mixture sampler with the class square roots C_k^{1/2} cached
 * (symmetric eigendecomposition, eigenvalues clamped at 1e-12).
 */
class MixtureSampler {
public:
    explicit MixtureSampler(const MixtureModel& model);
    /// n samples with classes drawn i.i.d. from the priors; the labeled
    /// prefix (size model.n_labeled()) is guaranteed to contain both
    /// classes whenever the sample does.
    SplitDataset sample(int n, uint64_t seed) const;

private:
    MixtureModel model_;
    Eigen::MatrixXd sqrt1_, sqrt2_;
};

/// One-shot convenience wrapper around MixtureSampler.
SplitDataset sample_mixture(const MixtureModel& model, int n, uint64_t seed);

/**
 * Two-class (degree-corrected) stochastic block model.  Within-class pairs
 * connect with probability r_i r_j q_in, across-class pairs with
 * r_i r_j q_out; r_i = 1 when no degree law is given.
 */
struct SbmSpec {
    int n = 0;
    int n1 = -1;  // class-1 size; -1 means equal halves (n2 = n - n1)
    double q_in = 0.0;
    double q_out = 0.0;
    std::vector<double> r_values;  // empty -> homogeneous model
    std::vector<double> r_probs;

    void validate() const;
};

struct SbmSample {
    WeightedGraph graph;
    std::vector<int> y;          // ground truth in {-1,+1}
    int n_l = 0;                 // stratified labeled prefix size
    Eigen::VectorXd r;           // realized degree factors
};

/// Adjacency sampled from the spec, then vertices permuted so that a
/// class-stratified random subset of size n_l comes first (labeled-prefix
/// convention); the rest follow in random order.  n_l = 0 skips the split.
SbmSample sample_sbm(const SbmSpec& spec, int n_l, uint64_t seed);

/**
 * Rectangular numeric CSV -> SplitDataset.  labels_column >= 0 pulls that
 * column out as integer ground truth; shuffle_seed reorders rows before the
 * prefix split.  Ragged rows or non-numeric cells fail with the 1-based row
 * number.
 */
SplitDataset load_features_csv(const std::string& path, int n_l, int labels_column = -1,
                               std::optional<uint64_t> shuffle_seed = std::nullopt);

/// Features (and labels when present) written as plain CSV, 17 significant
/// digits, no header; the exact inverse of load_features_csv.
void write_features_csv(const SplitDataset& data, const std::string& path,
                        bool include_labels = true);

}  // namespace gssl
