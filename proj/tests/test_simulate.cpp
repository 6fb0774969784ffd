#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gssl/config.hpp"
#include "gssl/csv.hpp"
#include "gssl/presets.hpp"
#include "gssl/simulate.hpp"
#include "gssl/theory.hpp"

using namespace gssl;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

/// Small, fast mixture for harness tests: n = 100 (20 labeled, 80 unlabeled).
MixtureModel tiny_model() {
    return opposite_means_model(40, 1.2, Eigen::MatrixXd::Identity(40, 40), 0.5, 2.0);
}

}  // namespace

// ----------------------------------------------------------------- parsing

TEST_CASE("grid parser") {
    std::vector<double> g = parse_grid("0:10:0.5");
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 10.0);
    CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(parse_grid("3") == std::vector<double>{3.0});
    CHECK(parse_grid("-2:0:1") == std::vector<double>{-2.0, -1.0, 0.0});
    CHECK(parse_grid("1:20:1").size() == 20);

    CHECK_THROWS_AS((void)parse_grid("2:1:0.5"), std::invalid_argument);  // stop < start
    CHECK_THROWS_AS((void)parse_grid("0:1:0"), std::invalid_argument);    // zero step
    CHECK_THROWS_AS((void)parse_grid("0:1:-1"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_grid("abc"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_grid(""), std::invalid_argument);
}

TEST_CASE("double-list parser") {
    std::vector<double> v = parse_double_list("0.3,0.5,1");
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 0.3);
    CHECK(v[2] == 1.0);
    CHECK_THROWS_AS((void)parse_double_list("1,,2"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_double_list("1,x"), std::invalid_argument);
}

TEST_CASE("config files: sections, comments, typed access") {
    const std::string path = "test_simulate_cfg.ini";
    spit(path,
         "# comment\n"
         "top = 1\n"
         "\n"
         "[alpha]\n"
         "c_u = 7.5   ; trailing comment\n"
         "n = 250\n"
         "name = hello\n"
         "\n"
         "[beta]\n"
         "c_u = 2\n");
    ConfigFile cfg = load_config_file(path);
    CHECK(cfg.has("", "top"));
    CHECK(cfg.get_double("alpha", "c_u") == 7.5);
    CHECK(cfg.get_int("alpha", "n") == 250);
    CHECK(cfg.get("alpha", "name") == "hello");
    CHECK(cfg.get_double("beta", "c_u") == 2.0);
    CHECK_FALSE(cfg.has("alpha", "missing"));
    CHECK_THROWS_AS((void)cfg.get("alpha", "missing"), std::exception);
    CHECK_THROWS_AS((void)cfg.get_int("alpha", "c_u"), std::exception);  // 7.5 not integral

    spit(path, "just words\n");
    CHECK_THROWS_AS((void)load_config_file(path), std::exception);
    CHECK_THROWS_AS((void)load_config_file("no_such_file.ini"), std::exception);
    std::remove(path.c_str());
}

TEST_CASE("config sections patch model, kernel, and block-model parameters") {
    const std::string path = "test_simulate_cfg2.ini";
    spit(path,
         "[exp]\n"
         "c_u = 5\n"
         "mu = opposite:2\n"
         "C = toeplitz:0.2\n"
         "kernel = linear\n"
         "[sbmx]\n"
         "n = 400\n"
         "q_in = 0.05\n"
         "r_values = 0.5,1\n"
         "r_probs = 0.5,0.5\n");
    ConfigFile cfg = load_config_file(path);

    MixtureModel base = tiny_model();
    MixtureModel patched = model_from_config(cfg, "exp", &base);
    CHECK(patched.c_u == 5.0);
    CHECK(patched.c_l == base.c_l);  // untouched keys keep the base
    CHECK(patched.mu2(0) == 2.0);
    CHECK(patched.mu1(0) == -2.0);
    CHECK(patched.C1(0, 1) == doctest::Approx(0.2).epsilon(1e-15));

    KernelFunction k = kernel_from_config(cfg, "exp", KernelFunction::gaussian());
    CHECK(k.name == "linear");
    KernelFunction untouched = kernel_from_config(cfg, "sbmx", KernelFunction::gaussian());
    CHECK(untouched.name == "gaussian");

    SbmSpec sbase;
    sbase.n = 1000;
    sbase.q_in = 0.014;
    sbase.q_out = 0.007;
    SbmSpec spatched = sbm_from_config(cfg, "sbmx", sbase);
    CHECK(spatched.n == 400);
    CHECK(spatched.q_in == 0.05);
    CHECK(spatched.q_out == 0.007);
    REQUIRE(spatched.r_values.size() == 2);
    CHECK(spatched.r_values[1] == 1.0);
    std::remove(path.c_str());
}

TEST_CASE("CSV cell formatting round-trips doubles and sanitizes text") {
    CHECK(csv_format(CsvCell{1.0 / 3.0}) == "0.33333333333333331");
    CHECK(csv_format(CsvCell{static_cast<long long>(42)}) == "42");
    CHECK(csv_format(CsvCell{std::string("a,b\nc")}) == "a;b;c");
    double parsed = std::strtod(csv_format(CsvCell{0.1 + 0.2}).c_str(), nullptr);
    CHECK(parsed == 0.1 + 0.2);
}

// ----------------------------------------------------------------- presets

TEST_CASE("every preset loads with the right kind and parameters") {
    std::vector<std::string> names = preset_names();
    CHECK(names.size() == 7);
    for (const std::string& name : names) CHECK_NOTHROW((void)preset_by_name(name));
    CHECK_THROWS_AS((void)preset_by_name("nope"), std::invalid_argument);

    Preset f2l = preset_by_name("fig2-left");
    CHECK(f2l.kind == Preset::Kind::mixture);
    CHECK(f2l.model.p == 100);
    CHECK(f2l.model.c_l == 2.0);
    CHECK((f2l.model.mu2 - f2l.model.mu1).squaredNorm() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(f2l.model.C1.isIdentity(1e-14));

    Preset f1r = preset_by_name("fig1-right");
    CHECK(f1r.model.c_l == 4.0);
    CHECK(f1r.model.c_u == 8.0);
    CHECK(f1r.model.C1(0, 1) == doctest::Approx(0.1).epsilon(1e-15));

    Preset fig8 = preset_by_name("fig8");
    CHECK(fig8.kind == Preset::Kind::isotropic);
    REQUIRE(fig8.mu_norm_sq.size() == 3);
    CHECK(fig8.mu_norm_sq[0] == 2.0);
    CHECK(fig8.mu_norm_sq[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(fig8.c_l == 0.5);

    Preset t1 = preset_by_name("table1-case1");
    CHECK(t1.kind == Preset::Kind::sbm);
    CHECK(t1.sbm.n == 1000);
    CHECK(t1.sbm.q_in == doctest::Approx(0.014).epsilon(1e-15));
    CHECK(t1.nl_ratio == doctest::Approx(0.05).epsilon(1e-15));

    Preset t2 = preset_by_name("table1-case2");
    CHECK(t2.sbm.q_in == doctest::Approx(0.035).epsilon(1e-15));
    REQUIRE(t2.sbm.r_values.size() == 3);
    CHECK(t2.sbm.r_probs[1] == 0.5);
}

// ------------------------------------------------------------- the harness

TEST_CASE("trial-seed derivation separates sweep points and trials") {
    std::set<uint64_t> seen;
    for (uint64_t s = 0; s < 4; ++s)
        for (uint64_t t = 0; t < 50; ++t) seen.insert(derive_trial_seed(1, s, t));
    CHECK(seen.size() == 200);
    CHECK(derive_trial_seed(1, 0, 0) == derive_trial_seed(1, 0, 0));
    CHECK(derive_trial_seed(1, 0, 0) != derive_trial_seed(2, 0, 0));
}

TEST_CASE("Monte Carlo harness: shape, determinism, oracle placement") {
    TrialConfig cfg;
    cfg.model = tiny_model();
    cfg.sweep = {1.5, 2.0};
    cfg.trials = 6;
    cfg.seed = 31;
    cfg.threads = 1;

    ExperimentResult res = run_trials(cfg);
    CHECK(res.sweep_variable == "cu");
    REQUIRE(res.rows.size() == 6);  // 3 default methods x 2 sweep values

    for (const MethodResult& r : res.rows) {
        CHECK(r.trials == 6);
        CHECK(r.failures == 0);
        CHECK(r.mean_accuracy >= 0.0);
        CHECK(r.mean_accuracy <= 1.0);
        CHECK(r.ci99 >= 0.0);
        if (r.method == "laplacian") {
            CHECK(r.oracle_param == -1.0);  // single-point default grid
            CHECK(std::abs(r.theory -
                           laplacian_theory(cfg.model, cfg.kernel).accuracy) <= 1e-12);
        }
        if (r.method == "centered") {
            CHECK(r.oracle_param >= -3.0);
            CHECK(r.oracle_param <= 3.0);
            REQUIRE(r.grid_values.size() == 61);
            REQUIRE(r.grid_mean.size() == 61);
            // The oracle is the grid argmax.
            double best = *std::max_element(r.grid_mean.begin(), r.grid_mean.end());
            auto it = std::find(r.grid_values.begin(), r.grid_values.end(), r.oracle_param);
            REQUIRE(it != r.grid_values.end());
            CHECK(r.grid_mean[it - r.grid_values.begin()] == best);
        }
        if (r.method == "spectral") {
            CHECK(std::isnan(r.oracle_param));
            MixtureModel at = cfg.model;
            at.c_u = r.sweep_value;
            CHECK(std::abs(r.theory -
                           spectral_limit_theory(at, cfg.kernel, at.c0())) <= 1e-12);
        }
    }

    // Bitwise reproducibility, and sensitivity to the seed.
    ExperimentResult res2 = run_trials(cfg);
    for (size_t i = 0; i < res.rows.size(); ++i)
        CHECK(res.rows[i].mean_accuracy == res2.rows[i].mean_accuracy);
    cfg.seed = 32;
    ExperimentResult res3 = run_trials(cfg);
    bool any_diff = false;
    for (size_t i = 0; i < res.rows.size(); ++i)
        any_diff = any_diff || res.rows[i].mean_accuracy != res3.rows[i].mean_accuracy;
    CHECK(any_diff);
}

TEST_CASE("neighbor-sparsified graphs run without a theory column") {
    TrialConfig cfg;
    cfg.model = tiny_model();
    cfg.sweep = {2.0};
    cfg.trials = 3;
    cfg.seed = 8;
    cfg.threads = 1;
    cfg.knn = 6;
    cfg.methods = {{"laplacian", {-1.0}}, {"centered", {0.0}}};

    ExperimentResult res = run_trials(cfg);
    for (const MethodResult& r : res.rows) {
        CHECK(std::isnan(r.theory));  // predictors do not apply to KNN graphs
        CHECK(r.mean_accuracy > 0.4);
        CHECK(r.failures == 0);
    }
}

TEST_CASE("experiment CSV writer emits one row per method and sweep value") {
    TrialConfig cfg;
    cfg.model = tiny_model();
    cfg.sweep = {2.0};
    cfg.trials = 2;
    cfg.seed = 3;
    cfg.threads = 1;
    cfg.methods = {{"laplacian", {-1.0}}};
    ExperimentResult res = run_trials(cfg);

    std::ostringstream os;
    write_experiment_csv(res, os);
    std::string text = os.str();
    CHECK(count_lines(text) == 2);
    CHECK(text.rfind("cu,method,trials,failures,mean_accuracy,std_accuracy,ci99,oracle_param,"
                     "theory\n", 0) == 0);
    // Full-precision mean survives the round trip.
    std::string row = text.substr(text.find('\n') + 1);
    for (int skip = 0; skip < 4; ++skip) row = row.substr(row.find(',') + 1);
    CHECK(std::strtod(row.c_str(), nullptr) == res.rows[0].mean_accuracy);
}

TEST_CASE("prediction sweeps expose failures per row instead of aborting") {
    Preset f2l = preset_by_name("fig2-left");

    std::vector<TheoryRow> rows = theory_sweep_theta(f2l.model, f2l.kernel, {0.0, 0.5, 1.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].status == "ok");
    CHECK(std::abs(rows[0].accuracy - 0.7928919108787374) <= 1e-9);
    CHECK(rows[1].status == "ok");
    CHECK(rows[1].accuracy > rows[0].accuracy);
    CHECK(rows[2].status != "ok");  // theta = 1 is outside the open domain
    CHECK(std::isnan(rows[2].accuracy));

    std::vector<TheoryComparisonRow> ratio =
        theory_sweep_ratio(f2l.model, f2l.kernel, "cu", {0.0, 2.0});
    REQUIRE(ratio.size() == 2);
    CHECK(ratio[0].status != "ok");  // no unlabeled data
    CHECK(ratio[1].status == "ok");
    CHECK(std::abs(ratio[1].centered_max_e - 0.80489779673110184) <= 1e-9);
    CHECK(std::abs(ratio[1].laplacian - 0.7928919108787374) <= 1e-9);
    CHECK(std::abs(ratio[1].spectral - 0.78010043256668005) <= 1e-9);
    CHECK(ratio[1].theta_star > 0.0);
    CHECK(ratio[1].theta_star < 1.0);

    std::ostringstream os;
    write_theory_ratio_csv("cu", ratio, os);
    CHECK(count_lines(os.str()) == 3);
    CHECK(os.str().rfind("cu,laplacian,centered_max_e,e_star,theta_star,spectral,status\n", 0) ==
          0);
}

TEST_CASE("fixed-point comparison rows are ordered and well-formed") {
    std::vector<OptimalRow> rows = compare_optimal({2.0, 1.0}, 0.5, {2.0, 10.0});
    REQUIRE(rows.size() == 4);
    for (const OptimalRow& r : rows) {
        CHECK(r.status == "ok");
        CHECK(r.bayes >= r.centered - 1e-12);
        CHECK(r.centered >= r.laplacian - 1e-9);
        CHECK(r.laplacian > 0.5);
    }
    // Frozen spot value: best achievable at M = 2, c_u = 10.
    CHECK(rows[1].mu_norm_sq == 2.0);
    CHECK(rows[1].cu == 10.0);
    CHECK(std::abs(rows[1].bayes - 0.91497386918810508) <= 1e-9);
    CHECK(std::abs(rows[1].centered - 0.91408344046311563) <= 1e-9);

    std::ostringstream os;
    write_optimal_csv(rows, os);
    CHECK(count_lines(os.str()) == 5);
    CHECK(os.str().rfind("mu_norm_sq,cu,bayes,centered,laplacian,status\n", 0) == 0);
}

TEST_CASE("block-model benchmark: reduction, pairing, reproducibility") {
    SbmConfig cfg;
    cfg.spec.n = 200;
    cfg.spec.q_in = 0.20;
    cfg.spec.q_out = 0.05;
    cfg.n_l = 20;
    cfg.trials = 5;
    cfg.seed = 17;
    cfg.threads = 1;
    cfg.methods = {{"laplacian", parse_grid("-2:0:0.25")}, {"centered", parse_grid("-2:2:0.5")}};

    SbmResult res = sbm_experiment(cfg);
    REQUIRE(res.rows.size() == 2);
    const SbmMethodResult& lap = res.rows[0];
    const SbmMethodResult& ctr = res.rows[1];
    CHECK(lap.method == "laplacian");
    CHECK(lap.trials == 5);
    CHECK(lap.failures == 0);
    CHECK(lap.mean_accuracy > 0.7);  // strong communities -> easy problem
    CHECK(lap.wins_vs_laplacian == -1);  // no self-comparison
    CHECK(ctr.paired_trials == 5);
    CHECK(ctr.wins_vs_laplacian >= 0);
    CHECK(ctr.wins_vs_laplacian <= 5);
    CHECK(lap.oracle_param >= -2.0);
    CHECK(lap.oracle_param <= 0.0);

    SbmResult res2 = sbm_experiment(cfg);
    CHECK(res.rows[0].mean_accuracy == res2.rows[0].mean_accuracy);
    CHECK(res.rows[1].mean_accuracy == res2.rows[1].mean_accuracy);

    std::ostringstream os;
    write_sbm_csv(res, os);
    CHECK(count_lines(os.str()) == 3);
    CHECK(os.str().rfind("method,trials,failures,mean_accuracy,std_accuracy,ci99,oracle_param,"
                         "wins_vs_laplacian,paired_trials\n", 0) == 0);
}

TEST_CASE("empirical means track the predictions on the benchmark preset") {
    // 25 trials x 200 unlabeled points = 5000 evaluations at c_u = 2.
    Preset f2l = preset_by_name("fig2-left");
    TrialConfig cfg;
    cfg.model = f2l.model;
    cfg.kernel = f2l.kernel;
    cfg.sweep = {2.0};
    cfg.trials = 25;
    cfg.seed = 4242;
    cfg.threads = 1;
    ExperimentResult res = run_trials(cfg);
    REQUIRE(res.rows.size() == 3);
    for (const MethodResult& r : res.rows) {
        double tol = std::max(0.01, r.ci99);
        CHECK(std::abs(r.mean_accuracy - r.theory) <= tol);
        if (r.method == "centered") {
            // Oracle strictly inside the default exponent grid.
            CHECK(r.oracle_param > -3.0);
            CHECK(r.oracle_param < 3.0);
        }
    }
}

// ------------------------------------------------------------ CLI binary

namespace {

/// Runs the installed CLI and returns its exit status.
int run_cli(const std::string& args) {
    const char* bin = std::getenv("GSSL_CLI");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args;
    int status = std::system(cmd.c_str());
    return status < 0 ? status : WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("command-line runs are byte-identical under a fixed seed") {
    CHECK(run_cli("simulate --preset fig2-left --sweep cu=2:2:1 --trials 2 --seed 7 "
                  "--out cli_run_a.csv") == 0);
    CHECK(run_cli("simulate --preset fig2-left --sweep cu=2:2:1 --trials 2 --seed 7 "
                  "--out cli_run_b.csv") == 0);
    std::string a = slurp("cli_run_a.csv");
    CHECK(a == slurp("cli_run_b.csv"));
    CHECK(count_lines(a) == 4);  // header + 3 methods
    std::remove("cli_run_a.csv");
    std::remove("cli_run_b.csv");
}

TEST_CASE("prediction sweep emits one row per grid value") {
    CHECK(run_cli("theory --preset fig2-left --sweep cu=0:10:0.5 --out cli_theory.csv") == 0);
    std::string text = slurp("cli_theory.csv");
    CHECK(count_lines(text) == 22);  // header + 21 values
    CHECK(text.rfind("cu,", 0) == 0);
    std::remove("cli_theory.csv");
}

TEST_CASE("exit codes distinguish usage problems from runtime failures") {
    CHECK(run_cli("--help > /dev/null 2>&1") == 0);
    CHECK(run_cli("theory --help > /dev/null 2>&1") == 0);
    CHECK(run_cli("theory --preset nope 2> /dev/null") == 1);
    CHECK(run_cli("2> /dev/null") == 1);  // missing subcommand
    CHECK(run_cli("simulate --sweep cu=bad 2> /dev/null") == 1);
    CHECK(run_cli("simulate --methods nosuch --trials 1 2> /dev/null") == 1);
    CHECK(run_cli("graph-export --preset table1-case1 --out /nonexistent/x.csv 2> /dev/null") ==
          2);
}
