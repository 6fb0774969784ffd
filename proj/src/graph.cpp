#include "gssl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gssl {

double WeightedGraph::max_abs_weight() const {
    if (n == 0) return 0.0;
    if (sparse) {
        double m = 0.0;
        for (int k = 0; k < Ws.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(Ws, k); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }
    return Wd.cwiseAbs().maxCoeff();
}

namespace {

void check_symmetric(const Eigen::MatrixXd& W) {
    if (W.rows() != W.cols()) throw std::invalid_argument("weight matrix must be square");
    if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, W.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("weight matrix must be symmetric");
}

}  // namespace

WeightedGraph make_graph(const Eigen::MatrixXd& W) {
    check_symmetric(W);
    const int n = static_cast<int>(W.rows());
    const auto zeros = (W.array() == 0.0).count();
    WeightedGraph g;
    g.n = n;
    g.degrees = W.rowwise().sum();
    if (n > 0 && static_cast<double>(zeros) >= 0.9 * n * n) {
        g.sparse = true;
        g.Ws = W.sparseView();
        g.Ws.makeCompressed();
    } else {
        g.Wd = W;
    }
    return g;
}

WeightedGraph make_graph(const Eigen::SparseMatrix<double>& W) {
    if (W.rows() != W.cols()) throw std::invalid_argument("weight matrix must be square");
    WeightedGraph g;
    g.n = static_cast<int>(W.rows());
    g.sparse = true;
    g.Ws = W;
    g.Ws.makeCompressed();
    g.degrees = Eigen::VectorXd(g.Ws * Eigen::VectorXd::Ones(g.n));
    return g;
}

Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (n == 0 || p == 0) throw std::invalid_argument("pairwise_sq_distances: empty input");
    const Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd D = sq.replicate(1, n) + sq.transpose().replicate(n, 1) - 2.0 * (X * X.transpose());
    D /= static_cast<double>(p);
    // Clean up the tiny negative residue Gram-based distances can leave.
    D = D.cwiseMax(0.0);
    D.diagonal().setZero();
    D = 0.5 * (D + D.transpose()).eval();
    return D;
}

WeightedGraph build_weight_matrix(const Eigen::MatrixXd& X, const KernelFunction& kernel) {
    if (!X.allFinite()) throw std::invalid_argument("build_weight_matrix: non-finite feature values");
    Eigen::MatrixXd W = pairwise_sq_distances(X).unaryExpr([&](double t) { return kernel.h(t); });
    W = 0.5 * (W + W.transpose()).eval();
    return make_graph(W);
}

WeightedGraph knn_graph(const Eigen::MatrixXd& X, int k) {
    const int n = static_cast<int>(X.rows());
    if (k < 1 || k >= n) throw std::invalid_argument("knn_graph: need 1 <= k < n");
    const Eigen::MatrixXd D = pairwise_sq_distances(X);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        // self excluded; ties broken by index for determinism
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (a == i) return false;
            if (b == i) return true;
            if (D(i, a) != D(i, b)) return D(i, a) < D(i, b);
            return a < b;
        });
        for (int j = 0; j < k; ++j) {
            W(i, order[j]) = 1.0;
            W(order[j], i) = 1.0;
        }
    }
    return make_graph(W);
}

Eigen::MatrixXd center_weights(const WeightedGraph& g) {
    const int n = g.n;
    const Eigen::VectorXd& v = g.degrees;  // W1
    const double total = v.sum();          // 1^T W 1
    Eigen::MatrixXd What = g.dense();
    What.noalias() -= v * Eigen::RowVectorXd::Constant(n, 1.0 / n);
    What.noalias() -= Eigen::VectorXd::Constant(n, 1.0 / n) * v.transpose();
    What.array() += total / (static_cast<double>(n) * n);
    return What;
}

Eigen::MatrixXd a_normalized_laplacian(const WeightedGraph& g, double a) {
    const int n = g.n;
    for (int i = 0; i < n; ++i)
        if (!(g.degrees(i) > 0.0))
            throw std::runtime_error("a_normalized_laplacian: vertex " + std::to_string(i) +
                                     " has zero degree");
    const Eigen::ArrayXd d = g.degrees.array();
    const Eigen::VectorXd left = d.pow(-1.0 - a).matrix();
    const Eigen::VectorXd right = d.pow(a).matrix();
    Eigen::MatrixXd L = -(left.asDiagonal() * g.dense() * right.asDiagonal());
    L.diagonal().array() += 1.0;
    return L;
}

ConcentrationStats distance_concentration_stats(const Eigen::MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    if (n < 2) throw std::invalid_argument("distance_concentration_stats: need n >= 2");
    const Eigen::MatrixXd D = pairwise_sq_distances(X);
    ConcentrationStats s;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            sum += D(i, j);
            sumsq += D(i, j) * D(i, j);
            ++s.pair_count;
        }
    s.mean = sum / s.pair_count;
    s.stddev = std::sqrt(std::max(0.0, sumsq / s.pair_count - s.mean * s.mean));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            s.max_abs_dev = std::max(s.max_abs_dev, std::abs(D(i, j) - s.mean));
    return s;
}

void export_edge_list_csv(const WeightedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "i,j,w\n";
    out.precision(17);
    if (g.sparse) {
        for (int k = 0; k < g.Ws.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(g.Ws, k); it; ++it)
                if (it.row() <= it.col()) out << it.row() << ',' << it.col() << ',' << it.value() << '\n';
    } else {
        for (int i = 0; i < g.n; ++i)
            for (int j = i; j < g.n; ++j)
                if (g.Wd(i, j) != 0.0) out << i << ',' << j << ',' << g.Wd(i, j) << '\n';
    }
}

}  // namespace gssl
