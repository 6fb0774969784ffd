#include "gssl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

#include "gssl/solvers.hpp"

namespace gssl {

namespace {

constexpr int kDenseLimit = 2000;
constexpr double kGapTol = 1e-10;

void orient_first_nonzero(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) {
            if (v(i) < 0.0) v = -v;
            return;
        }
    }
}

std::vector<int> sign_labels(const Eigen::VectorXd& v) {
    std::vector<int> labels(static_cast<size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) labels[static_cast<size_t>(i)] = v(i) > 0.0 ? 2 : 1;
    return labels;
}

/**
 * Power iteration for the dominant eigenpair of a symmetric PSD operator
 * restricted to the orthogonal complement of the (orthonormal) columns of
 * Q.  Deterministic start vector; converges on the eigenpair residual
 * ||A v - lambda v|| <= tol.
 */
std::pair<double, Eigen::VectorXd> deflated_power(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, int n,
    const Eigen::MatrixXd& Q, double tol, int max_iter) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::sin(static_cast<double>(i) + 1.0);
    const auto project = [&](Eigen::VectorXd& x) {
        if (Q.cols() > 0) x -= Q * (Q.transpose() * x);
    };
    project(v);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = apply(v);
        project(w);
        lambda = v.dot(w);
        const double norm = w.norm();
        if (norm < 1e-300) return {0.0, v};  // complement is in the kernel
        const double resid = (w - lambda * v).norm();
        w /= norm;
        v = w;
        if (resid <= tol) break;
    }
    return {lambda, v};
}

std::function<Eigen::VectorXd(const Eigen::VectorXd&)> centered_apply(const WeightedGraph& g) {
    const double n = static_cast<double>(g.n);
    const double total = g.degrees.sum();
    // What x = W x + [1 v] A [1 v]^T x with v = W 1 (see center_weights)
    return [&g, n, total](const Eigen::VectorXd& x) {
        Eigen::VectorXd y = g.sparse ? Eigen::VectorXd(g.Ws * x) : Eigen::VectorXd(g.Wd * x);
        const double s1 = x.sum();
        const double sv = g.degrees.dot(x);
        const double c1 = (total / (n * n)) * s1 - sv / n;
        const double cv = -s1 / n;
        y.array() += c1;
        y += cv * g.degrees;
        return y;
    };
}

ClusterAssignment finish(Eigen::VectorXd v, double lambda, bool degenerate) {
    orient_first_nonzero(v);
    ClusterAssignment out;
    out.labels = sign_labels(v);
    out.score = std::move(v);
    out.eigenvalue = lambda;
    out.degenerate_gap = degenerate;
    return out;
}

}  // namespace

ClusterAssignment spectral_cluster_laplacian(const WeightedGraph& g) {
    if (g.n < 3) throw std::invalid_argument("spectral clustering: need at least 3 vertices");
    for (int i = 0; i < g.n; ++i)
        if (!(g.degrees(i) > 0.0))
            throw std::runtime_error("vertex " + std::to_string(i) + " has zero degree");

    if (g.n <= kDenseLimit) {
        const Eigen::VectorXd dm_half = g.degrees.array().rsqrt();
        Eigen::MatrixXd Ls = -(dm_half.asDiagonal() * g.dense() * dm_half.asDiagonal());
        Ls.diagonal().array() += 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ls);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("spectral clustering: eigendecomposition failed");
        const Eigen::VectorXd& lam = es.eigenvalues();
        const bool degenerate =
            std::min(lam(1) - lam(0), lam(2) - lam(1)) < kGapTol;
        return finish(es.eigenvectors().col(1), lam(1), degenerate);
    }

    // d^{1/2} is always the eigenvector of L_s with eigenvalue 0; deflate it
    // and power-iterate on 2I - L_s, whose dominant eigenpair in that
    // complement is (2 - lambda_2, v_2).
    const Eigen::VectorXd dm_half = g.degrees.array().rsqrt();
    const Eigen::VectorXd d_half = g.degrees.array().sqrt();
    Eigen::MatrixXd Q(g.n, 1);
    Q.col(0) = d_half.normalized();
    const auto apply_b = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd wx = g.sparse
                                       ? Eigen::VectorXd(g.Ws * dm_half.cwiseProduct(x))
                                       : Eigen::VectorXd(g.Wd * dm_half.cwiseProduct(x));
        return Eigen::VectorXd(x + dm_half.cwiseProduct(wx));
    };
    auto [mu2, v2] = deflated_power(apply_b, g.n, Q, 1e-9, 20000);
    const double lambda2 = 2.0 - mu2;

    // best-effort gap check: one more deflation level
    Eigen::MatrixXd Q2(g.n, 2);
    Q2.col(0) = Q.col(0);
    Q2.col(1) = v2;
    auto [mu3, v3] = deflated_power(apply_b, g.n, Q2, 1e-6, 2000);
    (void)v3;
    const bool degenerate = std::min(lambda2, (2.0 - mu3) - lambda2) < kGapTol;
    return finish(std::move(v2), lambda2, degenerate);
}

ClusterAssignment spectral_cluster_centered(const WeightedGraph& g) {
    if (g.n < 3) throw std::invalid_argument("spectral clustering: need at least 3 vertices");

    if (g.n <= kDenseLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(center_weights(g));
        if (es.info() != Eigen::Success)
            throw std::runtime_error("spectral clustering: eigendecomposition failed");
        const Eigen::VectorXd& lam = es.eigenvalues();
        const int top = g.n - 1;
        const bool degenerate = lam(top) - lam(top - 1) < kGapTol;
        return finish(es.eigenvectors().col(top), lam(top), degenerate);
    }

    // shift by the operator norm so the largest algebraic eigenvalue becomes
    // the dominant one of the PSD operator What + nu I
    const auto apply_w = centered_apply(g);
    const double nu = sym_operator_norm(apply_w, g.n, 1e-10, 20000);
    const auto apply_shifted = [&](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(apply_w(x) + nu * x);
    };
    auto [mu, v] = deflated_power(apply_shifted, g.n, Eigen::MatrixXd(g.n, 0),
                                  1e-9 * std::max(1.0, nu), 20000);
    const double lambda = mu - nu;

    Eigen::MatrixXd Q(g.n, 1);
    Q.col(0) = v;
    auto [mu2, v2] = deflated_power(apply_shifted, g.n, Q, 1e-6 * std::max(1.0, nu), 2000);
    (void)v2;
    const bool degenerate = std::abs(mu - mu2) < kGapTol;
    return finish(std::move(v), lambda, degenerate);
}

ClusterQuality cluster_quality(const Eigen::VectorXd& v, const std::vector<int>& truth) {
    const Eigen::Index n = v.size();
    if (static_cast<Eigen::Index>(truth.size()) != n)
        throw std::invalid_argument("cluster quality: score and truth lengths differ");
    std::set<int> distinct(truth.begin(), truth.end());
    if (distinct.size() != 2)
        throw std::invalid_argument("cluster quality: ground truth must contain exactly 2 classes");
    const int lab1 = *distinct.begin();

    double sum1 = 0.0, sum2 = 0.0;
    Eigen::Index n1 = 0, n2 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (truth[static_cast<size_t>(i)] == lab1) {
            sum1 += v(i);
            ++n1;
        } else {
            sum2 += v(i);
            ++n2;
        }
    }
    const double m1 = sum1 / static_cast<double>(n1);
    const double m2 = sum2 / static_cast<double>(n2);

    double resid_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mean = truth[static_cast<size_t>(i)] == lab1 ? m1 : m2;
        const double r = v(i) - mean;
        resid_sq += r * r;
    }
    ClusterQuality q;
    q.d_inter = std::abs(m1 - m2);
    q.d_intra = std::sqrt(resid_sq / static_cast<double>(n));
    q.ratio = q.d_intra > 0.0 ? q.d_inter / q.d_intra
                              : std::numeric_limits<double>::infinity();
    return q;
}

void export_assignment_csv(const ClusterAssignment& assignment, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.precision(17);
    out << "index,label,score\n";
    for (size_t i = 0; i < assignment.labels.size(); ++i)
        out << i << ',' << assignment.labels[i] << ','
            << assignment.score(static_cast<Eigen::Index>(i)) << '\n';
    if (!out) throw std::runtime_error("write failure on " + path);
}

}  // namespace gssl
