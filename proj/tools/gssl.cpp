#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gssl/config.hpp"
#include "gssl/datagen.hpp"
#include "gssl/graph.hpp"
#include "gssl/presets.hpp"
#include "gssl/simulate.hpp"

namespace {

using namespace gssl;

/// Output target: stdout by default, a file when --out names one.
struct OutStream {
    std::ofstream file;
    std::ostream* os = &std::cout;

    void open(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
        os = &file;
    }
};

struct Sweep {
    std::string variable;
    std::vector<double> grid;
};

Sweep parse_sweep(const std::string& text) {
    size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("sweep must look like 'var=start:stop:step' or 'var=value', "
                                    "got '" + text + "'");
    return {text.substr(0, eq), parse_grid(text.substr(eq + 1))};
}

Preset load_preset(const std::string& name, const std::string& config_path) {
    Preset preset = preset_by_name(name);
    if (config_path.empty()) return preset;
    ConfigFile cfg;
    try {
        cfg = load_config_file(config_path);
    } catch (const std::exception& e) {
        // A bad --config argument is a usage problem, not an execution one.
        throw std::invalid_argument(e.what());
    }
    switch (preset.kind) {
        case Preset::Kind::mixture:
            preset.model = model_from_config(cfg, name, &preset.model);
            preset.kernel = kernel_from_config(cfg, name, preset.kernel);
            break;
        case Preset::Kind::isotropic:
            if (cfg.has(name, "mu_norm_sq"))
                preset.mu_norm_sq = parse_double_list(cfg.get(name, "mu_norm_sq"));
            if (cfg.has(name, "c_l")) preset.c_l = cfg.get_double(name, "c_l");
            break;
        case Preset::Kind::sbm:
            preset.sbm = sbm_from_config(cfg, name, preset.sbm);
            if (cfg.has(name, "nl_ratio")) preset.nl_ratio = cfg.get_double(name, "nl_ratio");
            break;
    }
    return preset;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        std::string item =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

/// Per-method hyperparameter grids from the CLI flags; empty flag strings
/// fall back to `laplacian_default` for the Laplacian (the two subcommands
/// pin different protocols) and the library defaults elsewhere.
std::vector<MethodGrid> build_methods(const std::string& methods_csv, const std::string& a_grid,
                                      const std::string& t_grid, const std::string& m_grid,
                                      const std::string& s_grid,
                                      const std::vector<double>& laplacian_default) {
    std::vector<MethodGrid> out;
    for (const std::string& name : split_list(methods_csv)) {
        MethodGrid mg;
        mg.method = name;
        if (name == "laplacian")
            mg.grid = a_grid.empty() ? laplacian_default : parse_grid(a_grid);
        else if (name == "centered" && !t_grid.empty())
            mg.grid = parse_grid(t_grid);
        else if (name == "iterated" && !m_grid.empty())
            mg.grid = parse_grid(m_grid);
        else if (name == "eigenvector" && !s_grid.empty())
            mg.grid = parse_grid(s_grid);
        default_method_grid(name);  // validates the method name
        out.push_back(std::move(mg));
    }
    if (out.empty()) throw std::invalid_argument("--methods must name at least one method");
    return out;
}

std::vector<double> oracle_a_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 100; ++i) g.push_back(-2.0 + 0.02 * i);
    return g;
}

// ------------------------------------------------------- subcommand state

struct CommonArgs {
    std::string preset = "fig2-left";
    std::string config;
    std::string out;
    uint64_t seed = 1;
    int trials = 0;
    int threads = 0;
};

int run_simulate(const CommonArgs& common, const std::string& sweep_text,
                 const std::string& methods_csv, const std::string& a_grid,
                 const std::string& t_grid, const std::string& m_grid, const std::string& s_grid,
                 const std::string& kernel_name, int knn, bool no_theory) {
    TrialConfig config;
    {
        Preset preset = load_preset(common.preset, common.config);
        if (preset.kind != Preset::Kind::mixture)
            throw std::invalid_argument("simulate needs a mixture preset; '" + common.preset +
                                        "' is not one (use the sbm subcommand for graphs)");
        config.model = preset.model;
        config.kernel = kernel_name.empty() ? preset.kernel : KernelFunction::by_name(kernel_name);
    }
    if (!sweep_text.empty()) {
        Sweep sweep = parse_sweep(sweep_text);
        if (sweep.variable != "cu" && sweep.variable != "cl")
            throw std::invalid_argument("simulate sweeps 'cu' or 'cl', got '" + sweep.variable +
                                        "'");
        config.sweep_variable = sweep.variable;
        config.sweep = sweep.grid;
    }
    config.methods = build_methods(methods_csv, a_grid, t_grid, m_grid, s_grid, {-1.0});
    config.trials = common.trials;
    config.seed = common.seed;
    config.threads = common.threads;
    config.knn = knn;
    config.attach_theory = !no_theory && knn == 0;

    OutStream out;
    out.open(common.out);
    write_experiment_csv(run_trials(config), *out.os);
    return 0;
}

int run_theory(const CommonArgs& common, const std::string& sweep_text,
               const std::string& kernel_name) {
    Preset preset = load_preset(common.preset, common.config);
    if (preset.kind != Preset::Kind::mixture)
        throw std::invalid_argument("theory needs a mixture preset; '" + common.preset +
                                    "' is not one");
    KernelFunction kernel =
        kernel_name.empty() ? preset.kernel : KernelFunction::by_name(kernel_name);
    Sweep sweep = parse_sweep(sweep_text.empty() ? "theta=0:1:0.005" : sweep_text);

    OutStream out;
    out.open(common.out);
    if (sweep.variable == "theta") {
        write_theory_theta_csv(theory_sweep_theta(preset.model, kernel, sweep.grid), *out.os);
    } else if (sweep.variable == "cu" || sweep.variable == "cl") {
        write_theory_ratio_csv(
            sweep.variable,
            theory_sweep_ratio(preset.model, kernel, sweep.variable, sweep.grid), *out.os);
    } else {
        throw std::invalid_argument("theory sweeps 'theta', 'cu' or 'cl', got '" + sweep.variable +
                                    "'");
    }
    return 0;
}

int run_sbm(const CommonArgs& common, const std::string& methods_csv, const std::string& a_grid,
            const std::string& t_grid, const std::string& m_grid, const std::string& s_grid,
            double nl_ratio, int n_l_flag) {
    SbmConfig config;
    {
        Preset preset = load_preset(common.preset, common.config);
        if (preset.kind != Preset::Kind::sbm)
            throw std::invalid_argument("sbm needs an SBM preset (table1-case1/table1-case2); '" +
                                        common.preset + "' is not one");
        config.spec = preset.sbm;
        double ratio = nl_ratio > 0.0 ? nl_ratio : preset.nl_ratio;
        config.n_l = n_l_flag > 0
                         ? n_l_flag
                         : static_cast<int>(std::lround(ratio * config.spec.n));
    }
    if (!methods_csv.empty())
        config.methods = build_methods(methods_csv, a_grid, t_grid, m_grid, s_grid,
                                       oracle_a_grid());
    else if (!a_grid.empty() || !t_grid.empty() || !m_grid.empty() || !s_grid.empty())
        config.methods = build_methods("laplacian,centered,iterated,eigenvector", a_grid, t_grid,
                                       m_grid, s_grid, oracle_a_grid());
    config.trials = common.trials > 0 ? common.trials : 100;
    config.seed = common.seed;
    config.threads = common.threads;

    OutStream out;
    out.open(common.out);
    write_sbm_csv(sbm_experiment(config), *out.os);
    return 0;
}

int run_optimal(const CommonArgs& common, const std::string& mu_list, double cl_flag,
                const std::string& cu_grid_text) {
    Preset preset = load_preset(common.preset, common.config);
    if (preset.kind != Preset::Kind::isotropic)
        throw std::invalid_argument("optimal needs an isotropic preset (fig8); '" + common.preset +
                                    "' is not one");
    std::vector<double> mu_norm_sq =
        mu_list.empty() ? preset.mu_norm_sq : parse_double_list(mu_list);
    double c_l = cl_flag > 0.0 ? cl_flag : preset.c_l;
    std::vector<double> cu_grid = parse_grid(cu_grid_text.empty() ? "1:10:1" : cu_grid_text);

    OutStream out;
    out.open(common.out);
    write_optimal_csv(compare_optimal(mu_norm_sq, c_l, cu_grid), *out.os);
    return 0;
}

int run_graph_export(const CommonArgs& common, const std::string& kernel_name, int knn) {
    if (common.out.empty() || common.out == "-")
        throw std::invalid_argument("graph-export writes a file; pass --out <path>");
    Preset preset = load_preset(common.preset, common.config);
    if (preset.kind == Preset::Kind::mixture) {
        const MixtureModel& m = preset.model;
        SplitDataset data = sample_mixture(m, m.n_labeled() + m.n_unlabeled(),
                                           derive_trial_seed(common.seed, 0, 0));
        KernelFunction kernel =
            kernel_name.empty() ? preset.kernel : KernelFunction::by_name(kernel_name);
        WeightedGraph g =
            knn > 0 ? knn_graph(data.X, knn) : build_weight_matrix(data.X, kernel);
        export_edge_list_csv(g, common.out);
    } else if (preset.kind == Preset::Kind::sbm) {
        int n_l = static_cast<int>(std::lround(preset.nl_ratio * preset.sbm.n));
        SbmSample s = sample_sbm(preset.sbm, n_l, derive_trial_seed(common.seed, 0, 0));
        export_edge_list_csv(s.graph, common.out);
    } else {
        throw std::invalid_argument("graph-export needs a mixture or SBM preset; '" +
                                    common.preset + "' is neither");
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_preset) {
    args.preset = default_preset;
    cmd->add_option("--preset", args.preset,
                    "named setup: fig1-left, fig1-right, fig2-left, fig2-right, fig8, "
                    "table1-case1, table1-case2")
        ->capture_default_str();
    cmd->add_option("--config", args.config,
                    "key=value config file; the section named after the preset overrides its "
                    "parameters");
    cmd->add_option("--out", args.out, "output CSV path (default: stdout)");
    cmd->add_option("--seed", args.seed, "master random seed")->capture_default_str();
    cmd->add_option("--trials", args.trials,
                    "Monte Carlo trials (0 = protocol default: ceil(50000/n_u) per sweep point "
                    "for simulate, 100 for sbm)")
        ->capture_default_str();
    cmd->add_option("--threads", args.threads, "worker threads (0 = hardware concurrency)")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-based semi-supervised learning: benchmarks and asymptotic predictions"};
    app.require_subcommand(1);

    CommonArgs sim_args, theory_args, sbm_args, opt_args, export_args;
    std::string sim_sweep, sim_methods = "centered,laplacian,spectral";
    std::string sim_a, sim_t, sim_m, sim_s, sim_kernel;
    int sim_knn = 0;
    bool sim_no_theory = false;

    CLI::App* sim = app.add_subcommand(
        "simulate", "Monte Carlo accuracy of graph SSL methods on sampled mixture data");
    add_common(sim, sim_args, "fig2-left");
    sim->add_option("--sweep", sim_sweep, "sweep spec, e.g. cu=2:10:2 or cl=1:4:0.5");
    sim->add_option("--methods", sim_methods,
                    "comma list of centered, laplacian, spectral, iterated, eigenvector")
        ->capture_default_str();
    sim->add_option("--a-grid", sim_a,
                    "Laplacian normalization grid start:stop:step (default: the single value -1)");
    sim->add_option("--t-grid", sim_t,
                    "centered-regularization exponent grid; alpha = (1+10^t)*||What_uu|| "
                    "(default -3:0.1:3)");
    sim->add_option("--m-grid", sim_m, "iterated-regularizer power grid (default 1:20:1)");
    sim->add_option("--s-grid", sim_s, "eigenvector subspace size grid (default 1:20:1)");
    sim->add_option("--kernel", sim_kernel, "similarity kernel: gaussian | linear");
    sim->add_option("--knn", sim_knn,
                    "build a k-nearest-neighbor graph instead of the full kernel matrix "
                    "(disables theory columns)")
        ->capture_default_str();
    sim->add_flag("--no-theory", sim_no_theory, "omit asymptotic prediction column");

    std::string theory_sweep_text, theory_kernel;
    CLI::App* theory = app.add_subcommand(
        "theory", "asymptotic accuracy predictions (no sampling)");
    add_common(theory, theory_args, "fig1-left");
    theory->add_option("--sweep", theory_sweep_text,
                       "theta=<grid>, cu=<grid> or cl=<grid> (default theta=0:1:0.005)");
    theory->add_option("--kernel", theory_kernel, "similarity kernel: gaussian | linear");

    std::string sbm_methods, sbm_a, sbm_t, sbm_m, sbm_s;
    double sbm_nl_ratio = 0.0;
    int sbm_n_l = 0;
    CLI::App* sbm = app.add_subcommand(
        "sbm", "four-method benchmark on stochastic block model graphs");
    add_common(sbm, sbm_args, "table1-case1");
    sbm->add_option("--case", sbm_args.preset, "alias for --preset");
    sbm->add_option("--methods", sbm_methods,
                    "comma list (default laplacian,centered,iterated,eigenvector with oracle "
                    "grids)");
    sbm->add_option("--a-grid", sbm_a, "Laplacian grid (default -2:0.02:0)");
    sbm->add_option("--t-grid", sbm_t, "centered exponent grid (default -3:0.1:3)");
    sbm->add_option("--m-grid", sbm_m, "iterated power grid (default 1:20:1)");
    sbm->add_option("--s-grid", sbm_s, "eigenvector subspace grid (default 1:20:1)");
    sbm->add_option("--nl-ratio", sbm_nl_ratio, "labeled fraction n_l/n (default: preset's 1/20)");
    sbm->add_option("--n-l", sbm_n_l, "absolute labeled count (overrides --nl-ratio)");

    std::string opt_mu, opt_cu_grid;
    double opt_cl = 0.0;
    CLI::App* optimal = app.add_subcommand(
        "optimal", "best-achievable vs centered vs Laplacian accuracy on isotropic mixtures");
    add_common(optimal, opt_args, "fig8");
    optimal->add_option("--mu-norm-sq", opt_mu,
                        "comma list of squared mean norms (default: preset's 2, 4/3, 1)");
    optimal->add_option("--cl", opt_cl, "labeled ratio c_l (default: preset's 0.5)");
    optimal->add_option("--cu-grid", opt_cu_grid, "unlabeled ratio grid (default 1:10:1)");

    std::string export_kernel;
    int export_knn = 0;
    CLI::App* graph_export = app.add_subcommand(
        "graph-export", "sample one dataset or SBM graph and write its edge list CSV");
    add_common(graph_export, export_args, "fig2-left");
    graph_export->add_option("--kernel", export_kernel, "similarity kernel: gaussian | linear");
    graph_export->add_option("--knn", export_knn, "k-nearest-neighbor sparsification")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed())
            return run_simulate(sim_args, sim_sweep, sim_methods, sim_a, sim_t, sim_m, sim_s,
                                sim_kernel, sim_knn, sim_no_theory);
        if (theory->parsed()) return run_theory(theory_args, theory_sweep_text, theory_kernel);
        if (sbm->parsed())
            return run_sbm(sbm_args, sbm_methods, sbm_a, sbm_t, sbm_m, sbm_s, sbm_nl_ratio,
                           sbm_n_l);
        if (optimal->parsed()) return run_optimal(opt_args, opt_mu, opt_cl, opt_cu_grid);
        if (graph_export->parsed()) return run_graph_export(export_args, export_kernel, export_knn);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
