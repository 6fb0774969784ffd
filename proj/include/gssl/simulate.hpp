#pragma once
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gssl/datagen.hpp"
#include "gssl/kernel.hpp"
#include "gssl/model.hpp"

namespace gssl {

/**
 * A scoring method plus its hyperparameter grid.  Grid semantics by method:
 *   laplacian    normalization exponents a            (empty -> {-1})
 *   centered     exponents t, alpha = (1+10^t)*||What_uu||  (empty -> -3:0.1:3)
 *   spectral     none (grid ignored)
 *   iterated     regularizer powers m                 (empty -> 1..20)
 *   eigenvector  subspace sizes s                     (empty -> 1..20)
 */
struct MethodGrid {
    std::string method;
    std::vector<double> grid;
};

std::vector<double> default_method_grid(const std::string& method);

/**
 * Monte Carlo experiment on mixture data: per sweep value, sample
 * `trials` datasets, build the similarity graph, score every method at
 * every grid value, and summarize accuracy at the oracle grid choice.
 */
struct TrialConfig {
    MixtureModel model;
    KernelFunction kernel = KernelFunction::gaussian();
    std::string sweep_variable = "cu";  // "cu" | "cl"
    std::vector<double> sweep;          // empty -> single point at the model's own ratio
    std::vector<MethodGrid> methods;    // empty -> centered, laplacian(a=-1), spectral
    int trials = 0;                     // <= 0 -> ceil(50000 / n_u) per sweep value
    uint64_t seed = 1;
    int knn = 0;                        // > 0: k-nearest-neighbor graph instead of full kernel
    bool attach_theory = true;          // asymptotic predictions where applicable
    int threads = 0;                    // <= 0 -> hardware concurrency
};

struct MethodResult {
    std::string method;
    double sweep_value = 0.0;
    int trials = 0;
    int failures = 0;  // trials where this method raised an error
    double mean_accuracy = std::numeric_limits<double>::quiet_NaN();
    double std_accuracy = std::numeric_limits<double>::quiet_NaN();
    double ci99 = std::numeric_limits<double>::quiet_NaN();  // 2.576*std/sqrt(successes)
    double oracle_param = std::numeric_limits<double>::quiet_NaN();
    double theory = std::numeric_limits<double>::quiet_NaN();
    // Diagnostics: mean accuracy at every grid value.
    std::vector<double> grid_values;
    std::vector<double> grid_mean;
};

struct ExperimentResult {
    std::string sweep_variable;
    std::vector<MethodResult> rows;
};

ExperimentResult run_trials(const TrialConfig& config);
void write_experiment_csv(const ExperimentResult& result, std::ostream& os);

// ---------------------------------------------------------------- theory

struct TheoryRow {
    double value = std::numeric_limits<double>::quiet_NaN();  // the grid variable
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    double m = std::numeric_limits<double>::quiet_NaN();       // per-class mean parameter
    double sigma1 = std::numeric_limits<double>::quiet_NaN();  // per-class std deviations
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    double theta = std::numeric_limits<double>::quiet_NaN();
    double xi = std::numeric_limits<double>::quiet_NaN();
    double e = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

/**
 * Centered-regularization prediction on a grid of unlabeled-reliance values
 * theta in [0,1).  The theta = 0 row is the vanishing-norm limit, i.e. the
 * Laplacian prediction.  Rows outside the attainable range report their
 * error in `status` instead of aborting the sweep.
 */
std::vector<TheoryRow> theory_sweep_theta(const MixtureModel& model, const KernelFunction& kernel,
                                          const std::vector<double>& theta_grid);
void write_theory_theta_csv(const std::vector<TheoryRow>& rows, std::ostream& os);

/// One sample-ratio value: predictions of all three methods side by side.
struct TheoryComparisonRow {
    double value = std::numeric_limits<double>::quiet_NaN();
    double laplacian = std::numeric_limits<double>::quiet_NaN();
    double centered_max_e = std::numeric_limits<double>::quiet_NaN();
    double e_star = std::numeric_limits<double>::quiet_NaN();
    double theta_star = std::numeric_limits<double>::quiet_NaN();
    double spectral = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

std::vector<TheoryComparisonRow> theory_sweep_ratio(const MixtureModel& model,
                                                    const KernelFunction& kernel,
                                                    const std::string& variable,  // "cu" | "cl"
                                                    const std::vector<double>& grid);
void write_theory_ratio_csv(const std::string& variable,
                            const std::vector<TheoryComparisonRow>& rows, std::ostream& os);

// ------------------------------------------------- isotropic fixed points

struct OptimalRow {
    double mu_norm_sq = std::numeric_limits<double>::quiet_NaN();
    double cu = std::numeric_limits<double>::quiet_NaN();
    double bayes = std::numeric_limits<double>::quiet_NaN();
    double centered = std::numeric_limits<double>::quiet_NaN();
    double laplacian = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

/// Best-achievable vs centered vs Laplacian accuracy on isotropic mixtures,
/// one row per (||mu||^2, c_u) pair.
std::vector<OptimalRow> compare_optimal(const std::vector<double>& mu_norm_sq, double c_l,
                                        const std::vector<double>& cu_grid);
void write_optimal_csv(const std::vector<OptimalRow>& rows, std::ostream& os);

// ----------------------------------------------------------------- SBM

struct SbmConfig {
    SbmSpec spec;
    int n_l = 50;
    std::vector<MethodGrid> methods;  // empty -> laplacian, centered, iterated, eigenvector
    int trials = 100;
    uint64_t seed = 1;
    int threads = 0;
};

struct SbmMethodResult {
    std::string method;
    int trials = 0;
    int failures = 0;
    double mean_accuracy = std::numeric_limits<double>::quiet_NaN();
    double std_accuracy = std::numeric_limits<double>::quiet_NaN();
    double ci99 = std::numeric_limits<double>::quiet_NaN();
    double oracle_param = std::numeric_limits<double>::quiet_NaN();
    // Trials (both methods succeeded) where this method strictly beats the
    // Laplacian baseline at the respective oracle grid choices; -1 when the
    // comparison does not apply.
    int wins_vs_laplacian = -1;
    int paired_trials = 0;
};

struct SbmResult {
    std::vector<SbmMethodResult> rows;
};

SbmResult sbm_experiment(const SbmConfig& config);
void write_sbm_csv(const SbmResult& result, std::ostream& os);

/**
 * Stream-splitting rule for parallel Monte Carlo: the seed of trial t of
 * sweep point s is one counter-mode output of the master-seeded generator
 * on stream (s << 32) | t, so any subset of trials can be reproduced
 * without running the others.
 */
uint64_t derive_trial_seed(uint64_t master_seed, uint64_t sweep_index, uint64_t trial_index);

}  // namespace gssl
