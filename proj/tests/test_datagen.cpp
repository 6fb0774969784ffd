#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <set>

#include "doctest.h"
#include "gssl/datagen.hpp"
#include "gssl/graph.hpp"
#include "gssl/model.hpp"
#include "gssl/rng.hpp"

using namespace gssl;

TEST_CASE("counter-based generator: determinism and stream separation") {
    PhiloxRng a(42), b(42), c(43), d(42, 1);
    for (int i = 0; i < 100; ++i) {
        uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
        CHECK(va != d.next_u64());
    }
    // Uniform doubles live in [0, 1); normals have reasonable moments.
    PhiloxRng r(7);
    double sum = 0, sumsq = 0;
    const int N = 20000;
    for (int i = 0; i < N; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double z = r.normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / N) <= 0.03);
    CHECK(std::abs(sumsq / N - 1.0) <= 0.04);
    for (int i = 0; i < 1000; ++i) CHECK(r.uniform_below(13) < 13);
}

TEST_CASE("mixture sampler: moments, priors, labeled prefix") {
    const int p = 40, n = 4000;
    MixtureModel model = opposite_means_model(p, 1.0, toeplitz_covariance(p, 0.3), 0.5, 2.0);
    model.rho1 = 0.35;
    model.rho2 = 0.65;
    SplitDataset data = sample_mixture(model, n, 99);
    REQUIRE(data.X.rows() == n);
    REQUIRE(data.X.cols() == p);
    REQUIRE(static_cast<int>(data.y.size()) == n);
    REQUIRE(data.n_l == model.n_labeled());

    // Class proportions within 4 binomial standard deviations.
    int n1 = 0;
    for (int v : data.y) {
        REQUIRE((v == -1 || v == 1));
        n1 += v == -1;
    }
    CHECK(std::abs(static_cast<double>(n1) / n - model.rho1) <=
          4.0 * std::sqrt(model.rho1 * model.rho2 / n));

    // Both classes appear among the labeled prefix (stratified split).
    std::set<int> prefix(data.y.begin(), data.y.begin() + data.n_l);
    CHECK(prefix.size() == 2);

    // Empirical class-2 mean and covariance approach the model parameters.
    std::vector<int> idx2;
    for (int i = 0; i < n; ++i)
        if (data.y[i] == 1) idx2.push_back(i);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(p);
    for (int i : idx2) mean += data.X.row(i);
    mean /= idx2.size();
    CHECK((mean.transpose() - model.mu2).cwiseAbs().maxCoeff() <= 0.1);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (int i : idx2) {
        Eigen::RowVectorXd dev = data.X.row(i) - mean;
        cov += dev.transpose() * dev;
    }
    cov /= idx2.size() - 1;
    CHECK((cov - model.C1).cwiseAbs().maxCoeff() <= 0.02 * 10);  // loose, n ~ 2600
    CHECK((cov - model.C1).cwiseAbs().mean() <= 0.02);
}

TEST_CASE("mixture sampling is reproducible and seed-sensitive") {
    MixtureModel model = opposite_means_model(10, 1.0, Eigen::MatrixXd::Identity(10, 10),
                                              1.0, 2.0);
    SplitDataset a = sample_mixture(model, 30, 5);
    SplitDataset b = sample_mixture(model, 30, 5);
    SplitDataset c = sample_mixture(model, 30, 6);
    CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.y == b.y);
    CHECK((a.X - c.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("block-model sampler: shape, symmetry, counts, stratified prefix") {
    SbmSpec spec;
    spec.n = 1000;
    spec.q_in = 14.0 / 1000;
    spec.q_out = 7.0 / 1000;
    const int n_l = 50;
    SbmSample s = sample_sbm(spec, n_l, 11);
    REQUIRE(s.graph.n == spec.n);
    REQUIRE(static_cast<int>(s.y.size()) == spec.n);
    CHECK(s.n_l == n_l);

    Eigen::MatrixXd A = s.graph.dense();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(A.diagonal().cwiseAbs().maxCoeff() == 0.0);

    // Equal halves by default.
    int n1 = 0;
    for (int v : s.y) n1 += v == -1;
    CHECK(n1 == spec.n / 2);
    std::set<int> prefix(s.y.begin(), s.y.begin() + n_l);
    CHECK(prefix.size() == 2);

    // Edge count within 4 standard deviations of the Bernoulli sum.
    double expected = 0.0, variance = 0.0;
    for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j) {
            double q = s.y[i] == s.y[j] ? spec.q_in : spec.q_out;
            expected += q;
            variance += q * (1.0 - q);
        }
    double edges = A.sum() / 2.0;
    CHECK(std::abs(edges - expected) <= 4.0 * std::sqrt(variance));

    // Homogeneous model: every degree factor is 1.
    CHECK((s.r.array() - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("degree-corrected block model applies the factor law") {
    SbmSpec spec;
    spec.n = 1000;
    spec.q_in = 35.0 / 1000;
    spec.q_out = 15.0 / 1000;
    spec.r_values = {0.3, 0.5, 1.0};
    spec.r_probs = {0.25, 0.5, 0.25};
    SbmSample s = sample_sbm(spec, 50, 13);

    // Factors are drawn from the given support with roughly the given law.
    double r_mean = 0.0;
    for (int i = 0; i < spec.n; ++i) {
        bool known = false;
        for (double v : spec.r_values) known = known || s.r(i) == v;
        CHECK(known);
        r_mean += s.r(i);
    }
    r_mean /= spec.n;
    CHECK(std::abs(r_mean - 0.575) <= 0.05);

    // Edge count against the realized factors, 4 sigma.
    double expected = 0.0, variance = 0.0;
    for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j) {
            double q = (s.y[i] == s.y[j] ? spec.q_in : spec.q_out) * s.r(i) * s.r(j);
            expected += q;
            variance += q * (1.0 - q);
        }
    double edges = s.graph.dense().sum() / 2.0;
    CHECK(std::abs(edges - expected) <= 4.0 * std::sqrt(variance));
}

TEST_CASE("block-model spec validation") {
    SbmSpec bad;
    bad.n = 100;
    bad.q_in = 0.01;
    bad.q_out = 0.05;  // out > in
    CHECK_THROWS_AS(bad.validate(), std::exception);
    bad.q_out = 0.005;
    CHECK_NOTHROW(bad.validate());
    bad.r_values = {0.5, 1.0};
    bad.r_probs = {0.6, 0.6};  // does not sum to 1
    CHECK_THROWS_AS(bad.validate(), std::exception);
    bad.r_probs = {0.5, 0.5};
    CHECK_NOTHROW(bad.validate());
    bad.r_values = {0.5, 1.5};  // outside (0, 1]
    CHECK_THROWS_AS(bad.validate(), std::exception);
}

TEST_CASE("feature CSV round-trips at full precision") {
    MixtureModel model = opposite_means_model(6, 1.0, Eigen::MatrixXd::Identity(6, 6), 1.0, 2.0);
    SplitDataset data = sample_mixture(model, 18, 21);
    const std::string path = "test_datagen_roundtrip.csv";

    write_features_csv(data, path, true);
    SplitDataset back = load_features_csv(path, data.n_l, 6);
    REQUIRE(back.X.rows() == data.X.rows());
    REQUIRE(back.X.cols() == data.X.cols());
    CHECK((back.X - data.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.y == data.y);
    CHECK(back.n_l == data.n_l);

    // Without labels: one fewer column.
    write_features_csv(data, path, false);
    SplitDataset plain = load_features_csv(path, 3);
    CHECK(plain.X.cols() == 6);
    CHECK(plain.y.empty());
    CHECK(plain.n_l == 3);
    std::remove(path.c_str());
}

TEST_CASE("feature CSV loader rejects malformed input with line numbers") {
    const std::string path = "test_datagen_bad.csv";
    {
        std::ofstream out(path);
        out << "1.5,2.5\n3.25\n";  // ragged second row
    }
    try {
        load_features_csv(path, 1);
        FAIL("expected ragged-row error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    {
        std::ofstream out(path);
        out << "1,2\nabc,4\n";
    }
    try {
        load_features_csv(path, 1);
        FAIL("expected non-numeric error");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("abc") != std::string::npos);
        CHECK(msg.find("row 2") != std::string::npos);
    }
    {
        std::ofstream out(path);
        out << "1,2\n3,4\n5,6\n7,8\n";
    }
    try {
        load_features_csv(path, 9);
        FAIL("expected prefix-size error");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("n_l") != std::string::npos);
        CHECK(msg.find("9") != std::string::npos);
    }
    // A seeded shuffle is reproducible.
    SplitDataset s1 = load_features_csv(path, 2, -1, 77);
    SplitDataset s2 = load_features_csv(path, 2, -1, 77);
    SplitDataset s3 = load_features_csv(path, 2, -1, 78);
    CHECK((s1.X - s2.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK(((s1.X - s3.X).cwiseAbs().maxCoeff() > 0.0 ||
           (s1.X - load_features_csv(path, 2).X).cwiseAbs().maxCoeff() > 0.0));
    std::remove(path.c_str());
}

TEST_CASE("graph exports are byte-identical across runs of one seed") {
    MixtureModel model = opposite_means_model(12, 1.0, Eigen::MatrixXd::Identity(12, 12),
                                              1.0, 3.0);
    auto export_once = [&](const std::string& path, uint64_t seed) {
        SplitDataset data = sample_mixture(model, 48, seed);
        WeightedGraph g = build_weight_matrix(data.X, KernelFunction::gaussian());
        export_edge_list_csv(g, path);
    };
    export_once("test_datagen_g1.csv", 3);
    export_once("test_datagen_g2.csv", 3);
    std::ifstream a("test_datagen_g1.csv", std::ios::binary);
    std::ifstream b("test_datagen_g2.csv", std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
    std::remove("test_datagen_g1.csv");
    std::remove("test_datagen_g2.csv");
}
