#include "gssl/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <thread>

#include "gssl/csv.hpp"
#include "gssl/graph.hpp"
#include "gssl/rng.hpp"
#include "gssl/solvers.hpp"
#include "gssl/spectral.hpp"
#include "gssl/theory.hpp"

namespace gssl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Truth label -> class index matching classify(): binary labels are +/-1
/// (class 1 iff -1); multiclass labels are already 1..K.
int truth_class(int label, int n_score_cols) {
    if (n_score_cols <= 1) return label < 0 ? 1 : 2;
    return label;
}

/// Everything a method evaluation needs for one trial.  The graph may be a
/// subgraph of the original node set (isolated vertices removed); `kept`
/// then maps graph indices back to original indices so accuracy is still
/// reported over every original unlabeled node, with missing nodes scored
/// zero (class 1).
struct TrialContext {
    const WeightedGraph* g = nullptr;
    Eigen::MatrixXd f_l;      // balanced labeled scores on the graph's prefix
    Eigen::MatrixXd y_l_raw;  // uncentered +/-1 fit targets on the prefix
    int n_l = 0;              // labeled count in *g
    const std::vector<int>* truth = nullptr;  // original labels, size N
    int N = 0;
    int N_l = 0;
    const std::vector<int>* kept = nullptr;  // graph index -> original index
};

Eigen::MatrixXd raw_label_matrix(const std::vector<int>& y_l) {
    bool binary = true;
    for (int v : y_l)
        if (v != -1 && v != 1) binary = false;
    if (binary) {
        Eigen::MatrixXd y(y_l.size(), 1);
        for (size_t i = 0; i < y_l.size(); ++i) y(static_cast<int>(i), 0) = y_l[i];
        return y;
    }
    int k_max = 0;
    for (int v : y_l) k_max = std::max(k_max, v);
    Eigen::MatrixXd y = Eigen::MatrixXd::Constant(static_cast<int>(y_l.size()), k_max, -1.0);
    for (size_t i = 0; i < y_l.size(); ++i) y(static_cast<int>(i), y_l[i] - 1) = 1.0;
    return y;
}

/// Accuracy over the original unlabeled nodes of unlabeled-score rows.
double scores_accuracy(const Eigen::MatrixXd& scores_u, const TrialContext& ctx) {
    const std::vector<int> pred = classify(scores_u);
    const int cols = static_cast<int>(scores_u.cols());
    const int total = ctx.N - ctx.N_l;
    int correct = 0;
    if (!ctx.kept) {
        for (int i = 0; i < total; ++i)
            correct += pred[i] == truth_class((*ctx.truth)[ctx.N_l + i], cols);
    } else {
        std::vector<int> full(total, 1);  // dropped nodes score zero -> class 1
        for (int gi = ctx.n_l; gi < ctx.g->n; ++gi)
            full[(*ctx.kept)[gi] - ctx.N_l] = pred[gi - ctx.n_l];
        for (int i = 0; i < total; ++i)
            correct += full[i] == truth_class((*ctx.truth)[ctx.N_l + i], cols);
    }
    return static_cast<double>(correct) / total;
}

/// Two-cluster assignment accuracy over all original nodes, orientation-free.
double clustering_accuracy(const std::vector<int>& labels, const TrialContext& ctx) {
    std::vector<int> full(ctx.N, 1);
    if (!ctx.kept) {
        full = labels;
    } else {
        for (int gi = 0; gi < ctx.g->n; ++gi) full[(*ctx.kept)[gi]] = labels[gi];
    }
    int match = 0;
    for (int i = 0; i < ctx.N; ++i) match += (full[i] == 2) == ((*ctx.truth)[i] > 0);
    return std::max(match, ctx.N - match) / static_cast<double>(ctx.N);
}

/// Per-grid-value accuracies of one method on one trial.  `sym_cache`
/// shares the symmetric-Laplacian eigendecomposition between the iterated
/// and eigenvector methods (both run on the same graph within a trial).
std::vector<double> evaluate_grid(const std::string& method, const std::vector<double>& grid,
                                  const TrialContext& ctx,
                                  std::optional<SymLaplacianEigen>& sym_cache) {
    std::vector<double> out;
    out.reserve(std::max<size_t>(grid.size(), 1));
    if (method == "centered") {
        CenteredEigenSweep sweep(*ctx.g, ctx.f_l);
        for (double t : grid) {
            double alpha = (1.0 + std::pow(10.0, t)) * sweep.wuu_norm();
            out.push_back(scores_accuracy(sweep.solve(alpha), ctx));
        }
    } else if (method == "laplacian") {
        LaplacianGridSolver solver(*ctx.g, ctx.n_l);
        for (double a : grid) out.push_back(scores_accuracy(solver.solve(ctx.f_l, a), ctx));
    } else if (method == "spectral") {
        out.push_back(clustering_accuracy(spectral_cluster_laplacian(*ctx.g).labels, ctx));
    } else if (method == "iterated") {
        if (!sym_cache) sym_cache.emplace(*ctx.g);
        for (double m : grid) {
            int mi = static_cast<int>(std::lround(m));
            out.push_back(scores_accuracy(sym_cache->iterated_scores(ctx.f_l, mi), ctx));
        }
    } else if (method == "eigenvector") {
        if (!sym_cache) sym_cache.emplace(*ctx.g);
        for (double s : grid) {
            int si = static_cast<int>(std::lround(s));
            Eigen::MatrixXd all = sym_cache->eigenbasis_scores(ctx.y_l_raw, si);
            out.push_back(scores_accuracy(all.bottomRows(ctx.g->n - ctx.n_l), ctx));
        }
    } else {
        throw std::invalid_argument("unknown method '" + method +
                                    "' (available: centered, laplacian, spectral, iterated, "
                                    "eigenvector)");
    }
    return out;
}

void run_pool(int count, int threads, const std::function<void(int)>& body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int t = 0; t < count; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < count; t = next.fetch_add(1)) body(t);
        });
    for (auto& th : pool) th.join();
}

/// Oracle-grid summary of one method's trial-by-grid accuracy table.
/// acc[t] is empty when trial t failed for this method.
MethodResult reduce_method(const MethodGrid& mg, double sweep_value,
                           const std::vector<std::vector<double>>& acc) {
    MethodResult r;
    r.method = mg.method;
    r.sweep_value = sweep_value;
    r.trials = static_cast<int>(acc.size());
    std::vector<const std::vector<double>*> ok;
    for (const auto& row : acc)
        if (!row.empty()) ok.push_back(&row);
    r.failures = r.trials - static_cast<int>(ok.size());
    if (ok.empty()) return r;

    const size_t G = ok.front()->size();
    std::vector<double> mean(G, 0.0);
    for (const auto* row : ok)
        for (size_t j = 0; j < G; ++j) mean[j] += (*row)[j];
    for (double& v : mean) v /= static_cast<double>(ok.size());
    size_t best = static_cast<size_t>(
        std::max_element(mean.begin(), mean.end()) - mean.begin());

    double var = 0.0;
    for (const auto* row : ok) var += std::pow((*row)[best] - mean[best], 2);
    const size_t S = ok.size();
    r.mean_accuracy = mean[best];
    r.std_accuracy = S > 1 ? std::sqrt(var / static_cast<double>(S - 1)) : 0.0;
    r.ci99 = S > 1 ? 2.576 * r.std_accuracy / std::sqrt(static_cast<double>(S)) : kNan;
    r.oracle_param = mg.method == "spectral" ? kNan : mg.grid[best];
    r.grid_values = mg.method == "spectral" ? std::vector<double>{} : mg.grid;
    r.grid_mean = std::move(mean);
    if (mg.method == "spectral") r.grid_mean.resize(1);
    return r;
}

std::vector<MethodGrid> with_default_grids(std::vector<MethodGrid> methods) {
    for (auto& m : methods) {
        if (m.grid.empty() && m.method != "spectral") m.grid = default_method_grid(m.method);
        if (m.method == "spectral") m.grid.clear();
    }
    return methods;
}

}  // namespace

std::vector<double> default_method_grid(const std::string& method) {
    std::vector<double> g;
    if (method == "laplacian") {
        g = {-1.0};
    } else if (method == "centered") {
        for (int i = 0; i <= 60; ++i) g.push_back(-3.0 + 0.1 * i);
    } else if (method == "iterated" || method == "eigenvector") {
        for (int i = 1; i <= 20; ++i) g.push_back(i);
    } else if (method == "spectral") {
        // no hyperparameter
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }
    return g;
}

uint64_t derive_trial_seed(uint64_t master_seed, uint64_t sweep_index, uint64_t trial_index) {
    PhiloxRng rng(master_seed, (sweep_index << 32) | (trial_index & 0xffffffffULL));
    return rng.next_u64();
}

ExperimentResult run_trials(const TrialConfig& config) {
    config.model.validate();
    std::vector<MethodGrid> methods = config.methods;
    if (methods.empty())
        methods = {{"centered", {}}, {"laplacian", {-1.0}}, {"spectral", {}}};
    methods = with_default_grids(methods);
    for (const auto& m : methods) default_method_grid(m.method);  // validate names

    if (config.sweep_variable != "cu" && config.sweep_variable != "cl")
        throw std::invalid_argument("sweep variable must be 'cu' or 'cl', got '" +
                                    config.sweep_variable + "'");
    std::vector<double> sweep = config.sweep;
    if (sweep.empty())
        sweep = {config.sweep_variable == "cu" ? config.model.c_u : config.model.c_l};

    ExperimentResult result;
    result.sweep_variable = config.sweep_variable;
    for (size_t si = 0; si < sweep.size(); ++si) {
        MixtureModel model = config.model;
        (config.sweep_variable == "cu" ? model.c_u : model.c_l) = sweep[si];
        model.validate();
        const int n_l = model.n_labeled();
        const int n_u = model.n_unlabeled();
        const int n = n_l + n_u;
        if (n_l < 1 || n_u < 1)
            throw std::invalid_argument("sweep value " + std::to_string(sweep[si]) +
                                        " leaves no labeled or no unlabeled samples");
        const int trials =
            config.trials > 0 ? config.trials : static_cast<int>((50000 + n_u - 1) / n_u);

        // acc[method][trial] = accuracy per grid value; empty = failed trial
        std::vector<std::vector<std::vector<double>>> acc(
            methods.size(), std::vector<std::vector<double>>(trials));

        run_pool(trials, config.threads, [&](int t) {
            try {
                SplitDataset data =
                    sample_mixture(model, n, derive_trial_seed(config.seed, si, t));
                WeightedGraph g = config.knn > 0 ? knn_graph(data.X, config.knn)
                                                 : build_weight_matrix(data.X, config.kernel);
                std::vector<int> y_l(data.y.begin(), data.y.begin() + n_l);
                TrialContext ctx;
                ctx.g = &g;
                ctx.f_l = balanced_label_scores(y_l);
                ctx.y_l_raw = raw_label_matrix(y_l);
                ctx.n_l = n_l;
                ctx.truth = &data.y;
                ctx.N = n;
                ctx.N_l = n_l;
                std::optional<SymLaplacianEigen> sym;
                for (size_t mi = 0; mi < methods.size(); ++mi) {
                    try {
                        acc[mi][t] = evaluate_grid(methods[mi].method, methods[mi].grid, ctx, sym);
                    } catch (const std::exception&) {
                        acc[mi][t].clear();
                    }
                }
            } catch (const std::exception&) {
                for (size_t mi = 0; mi < methods.size(); ++mi) acc[mi][t].clear();
            }
        });

        for (size_t mi = 0; mi < methods.size(); ++mi) {
            MethodResult row = reduce_method(methods[mi], sweep[si], acc[mi]);
            if (config.attach_theory && config.knn == 0) {
                try {
                    if (row.method == "laplacian")
                        row.theory = laplacian_theory(model, config.kernel).accuracy;
                    else if (row.method == "centered")
                        row.theory = centered_theory_max_e(model, config.kernel).accuracy;
                    else if (row.method == "spectral")
                        row.theory = spectral_limit_theory(model, config.kernel, model.c0());
                } catch (const std::exception&) {
                    // no prediction applies; leave NaN
                }
            }
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

void write_experiment_csv(const ExperimentResult& result, std::ostream& os) {
    csv_header(os, {result.sweep_variable, "method", "trials", "failures", "mean_accuracy",
                    "std_accuracy", "ci99", "oracle_param", "theory"});
    for (const MethodResult& r : result.rows)
        csv_row(os, {r.sweep_value, r.method, static_cast<long long>(r.trials),
                     static_cast<long long>(r.failures), r.mean_accuracy, r.std_accuracy, r.ci99,
                     r.oracle_param, r.theory});
}

std::vector<TheoryRow> theory_sweep_theta(const MixtureModel& model, const KernelFunction& kernel,
                                          const std::vector<double>& theta_grid) {
    model.validate();
    CenteredTheoryEngine engine(model, kernel);
    std::vector<TheoryRow> rows;
    rows.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        TheoryRow row;
        row.value = theta;
        try {
            AsymptoticPrediction pr = engine.predict_theta(theta);
            row.accuracy = pr.accuracy;
            row.m = pr.mean2 / (1.0 - model.rho2);
            row.sigma1 = pr.sigma1;
            row.sigma2 = pr.sigma2;
            row.theta = pr.theta;
            row.xi = pr.xi;
            row.e = pr.e;
        } catch (const std::exception& ex) {
            row.status = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_theory_theta_csv(const std::vector<TheoryRow>& rows, std::ostream& os) {
    csv_header(os, {"theta", "accuracy", "m", "sigma1", "sigma2", "xi", "e", "status"});
    for (const TheoryRow& r : rows)
        csv_row(os, {r.value, r.accuracy, r.m, r.sigma1, r.sigma2, r.xi, r.e, r.status});
}

std::vector<TheoryComparisonRow> theory_sweep_ratio(const MixtureModel& model,
                                                    const KernelFunction& kernel,
                                                    const std::string& variable,
                                                    const std::vector<double>& grid) {
    if (variable != "cu" && variable != "cl")
        throw std::invalid_argument("theory sweep variable must be 'cu' or 'cl', got '" +
                                    variable + "'");
    std::vector<TheoryComparisonRow> rows;
    rows.reserve(grid.size());
    for (double v : grid) {
        TheoryComparisonRow row;
        row.value = v;
        try {
            MixtureModel m = model;
            (variable == "cu" ? m.c_u : m.c_l) = v;
            m.validate();
            if (m.n_unlabeled() < 1) throw std::invalid_argument("no unlabeled samples");
            row.laplacian = laplacian_theory(m, kernel).accuracy;
            CenteredTheoryEngine engine(m, kernel);
            double e_star = kNan;
            AsymptoticPrediction best = engine.max_over_e(&e_star);
            row.centered_max_e = best.accuracy;
            row.e_star = e_star;
            row.theta_star = best.theta;
            row.spectral = engine.spectral_limit_accuracy(m.c0());
        } catch (const std::exception& ex) {
            row.status = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_theory_ratio_csv(const std::string& variable,
                            const std::vector<TheoryComparisonRow>& rows, std::ostream& os) {
    csv_header(os, {variable, "laplacian", "centered_max_e", "e_star", "theta_star", "spectral",
                    "status"});
    for (const TheoryComparisonRow& r : rows)
        csv_row(os, {r.value, r.laplacian, r.centered_max_e, r.e_star, r.theta_star, r.spectral,
                     r.status});
}

std::vector<OptimalRow> compare_optimal(const std::vector<double>& mu_norm_sq, double c_l,
                                        const std::vector<double>& cu_grid) {
    std::vector<OptimalRow> rows;
    rows.reserve(mu_norm_sq.size() * cu_grid.size());
    for (double M : mu_norm_sq) {
        for (double cu : cu_grid) {
            OptimalRow row;
            row.mu_norm_sq = M;
            row.cu = cu;
            try {
                row.bayes = bayes_optimal_isotropic(M, c_l, cu).accuracy;
                row.centered = centered_isotropic(M, c_l, cu).accuracy;
                const int p = 100;  // the prediction depends only on normalized traces
                MixtureModel m = opposite_means_model(
                    p, std::sqrt(M), Eigen::MatrixXd::Identity(p, p), c_l, cu);
                row.laplacian = laplacian_theory(m, KernelFunction::gaussian()).accuracy;
            } catch (const std::exception& ex) {
                row.status = ex.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_optimal_csv(const std::vector<OptimalRow>& rows, std::ostream& os) {
    csv_header(os, {"mu_norm_sq", "cu", "bayes", "centered", "laplacian", "status"});
    for (const OptimalRow& r : rows)
        csv_row(os, {r.mu_norm_sq, r.cu, r.bayes, r.centered, r.laplacian, r.status});
}

SbmResult sbm_experiment(const SbmConfig& config) {
    config.spec.validate();
    const int N = config.spec.n;
    const int N_l = config.n_l;
    if (N_l < 1 || N_l >= N)
        throw std::invalid_argument("sbm experiment: need 1 <= n_l < n");
    if (config.trials < 1) throw std::invalid_argument("sbm experiment: trials must be >= 1");

    std::vector<MethodGrid> methods = config.methods;
    if (methods.empty()) {
        std::vector<double> a_grid;
        for (int i = 0; i <= 100; ++i) a_grid.push_back(-2.0 + 0.02 * i);
        methods = {{"laplacian", a_grid},
                   {"centered", default_method_grid("centered")},
                   {"iterated", default_method_grid("iterated")},
                   {"eigenvector", default_method_grid("eigenvector")}};
    }
    methods = with_default_grids(methods);
    for (const auto& m : methods) default_method_grid(m.method);

    const int trials = config.trials;
    std::vector<std::vector<std::vector<double>>> acc(
        methods.size(), std::vector<std::vector<double>>(trials));

    // Degree-dependent methods run on the subgraph of non-isolated vertices
    // (their rows of W are zero, so the restricted equations are exact);
    // dropped unlabeled nodes keep score zero.  Centered regularization has
    // no degree requirement and always runs on the full graph.
    run_pool(trials, config.threads, [&](int t) {
        try {
            SbmSample sample = sample_sbm(config.spec, N_l, derive_trial_seed(config.seed, 0, t));
            std::vector<int> y_l(sample.y.begin(), sample.y.begin() + N_l);

            TrialContext full_ctx;
            full_ctx.g = &sample.graph;
            full_ctx.f_l = balanced_label_scores(y_l);
            full_ctx.y_l_raw = raw_label_matrix(y_l);
            full_ctx.n_l = N_l;
            full_ctx.truth = &sample.y;
            full_ctx.N = N;
            full_ctx.N_l = N_l;

            std::vector<int> kept;
            for (int i = 0; i < N; ++i)
                if (sample.graph.degrees(i) > 0.0) kept.push_back(i);

            WeightedGraph stripped;
            TrialContext deg_ctx = full_ctx;
            std::string deg_error;
            if (static_cast<int>(kept.size()) < N) {
                try {
                    Eigen::MatrixXd W = sample.graph.dense()(kept, kept);
                    stripped = make_graph(W);
                    int n_l_kept = 0;
                    while (n_l_kept < static_cast<int>(kept.size()) && kept[n_l_kept] < N_l)
                        ++n_l_kept;
                    std::vector<int> y_l_kept;
                    y_l_kept.reserve(n_l_kept);
                    for (int i = 0; i < n_l_kept; ++i) y_l_kept.push_back(sample.y[kept[i]]);
                    deg_ctx.g = &stripped;
                    deg_ctx.f_l = balanced_label_scores(y_l_kept);
                    deg_ctx.y_l_raw = raw_label_matrix(y_l_kept);
                    deg_ctx.n_l = n_l_kept;
                    deg_ctx.kept = &kept;
                } catch (const std::exception& ex) {
                    deg_error = ex.what();
                }
            }

            std::optional<SymLaplacianEigen> sym;
            for (size_t mi = 0; mi < methods.size(); ++mi) {
                const bool degree_dependent = methods[mi].method != "centered";
                try {
                    if (degree_dependent && !deg_error.empty())
                        throw std::runtime_error(deg_error);
                    const TrialContext& ctx = degree_dependent ? deg_ctx : full_ctx;
                    acc[mi][t] = evaluate_grid(methods[mi].method, methods[mi].grid, ctx, sym);
                } catch (const std::exception&) {
                    acc[mi][t].clear();
                }
            }
        } catch (const std::exception&) {
            for (size_t mi = 0; mi < methods.size(); ++mi) acc[mi][t].clear();
        }
    });

    SbmResult result;
    size_t lap_index = methods.size();
    for (size_t mi = 0; mi < methods.size(); ++mi)
        if (methods[mi].method == "laplacian") lap_index = mi;

    std::vector<size_t> oracle(methods.size(), 0);
    for (size_t mi = 0; mi < methods.size(); ++mi) {
        MethodResult summary = reduce_method(methods[mi], 0.0, acc[mi]);
        // recover the oracle grid index from the reported parameter
        if (!summary.grid_values.empty()) {
            auto it = std::find(summary.grid_values.begin(), summary.grid_values.end(),
                                summary.oracle_param);
            if (it != summary.grid_values.end())
                oracle[mi] = static_cast<size_t>(it - summary.grid_values.begin());
        }
        SbmMethodResult row;
        row.method = summary.method;
        row.trials = summary.trials;
        row.failures = summary.failures;
        row.mean_accuracy = summary.mean_accuracy;
        row.std_accuracy = summary.std_accuracy;
        row.ci99 = summary.ci99;
        row.oracle_param = summary.oracle_param;
        result.rows.push_back(std::move(row));
    }

    if (lap_index < methods.size()) {
        for (size_t mi = 0; mi < methods.size(); ++mi) {
            if (mi == lap_index) continue;
            int wins = 0, paired = 0;
            for (int t = 0; t < trials; ++t) {
                if (acc[mi][t].empty() || acc[lap_index][t].empty()) continue;
                ++paired;
                wins += acc[mi][t][oracle[mi]] > acc[lap_index][t][oracle[lap_index]];
            }
            result.rows[mi].wins_vs_laplacian = wins;
            result.rows[mi].paired_trials = paired;
        }
    }
    return result;
}

void write_sbm_csv(const SbmResult& result, std::ostream& os) {
    csv_header(os, {"method", "trials", "failures", "mean_accuracy", "std_accuracy", "ci99",
                    "oracle_param", "wins_vs_laplacian", "paired_trials"});
    for (const SbmMethodResult& r : result.rows)
        csv_row(os, {r.method, static_cast<long long>(r.trials),
                     static_cast<long long>(r.failures), r.mean_accuracy, r.std_accuracy, r.ci99,
                     r.oracle_param, static_cast<long long>(r.wins_vs_laplacian),
                     static_cast<long long>(r.paired_trials)});
}

}  // namespace gssl
