#include "gssl/solvers.hpp"

#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <stdexcept>

namespace gssl {

namespace {

void require_prefix_split(const WeightedGraph& g, Eigen::Index n_l) {
    if (n_l < 1 || n_l >= g.n)
        throw std::invalid_argument("labeled prefix size must satisfy 1 <= n_l < n");
}

void require_positive_degrees(const WeightedGraph& g) {
    for (int i = 0; i < g.n; ++i)
        if (!(g.degrees(i) > 0.0))
            throw std::runtime_error("vertex " + std::to_string(i) + " has zero degree");
}

}  // namespace

Eigen::MatrixXd balanced_label_scores(const std::vector<int>& y_l) {
    const int n_l = static_cast<int>(y_l.size());
    if (n_l < 1) throw std::invalid_argument("balanced_label_scores: empty label set");
    std::set<int> distinct(y_l.begin(), y_l.end());
    if (distinct.size() < 2)
        throw std::invalid_argument("balanced_label_scores: labels contain a single class");

    const bool binary_pm = distinct.size() == 2 && distinct.count(-1) && distinct.count(1);
    if (binary_pm) {
        Eigen::MatrixXd f(n_l, 1);
        for (int i = 0; i < n_l; ++i) f(i, 0) = y_l[i];
        f.array() -= f.mean();
        return f;
    }
    const int K = *distinct.rbegin();
    if (*distinct.begin() < 1)
        throw std::invalid_argument("balanced_label_scores: labels must be {-1,+1} or 1..K");
    Eigen::MatrixXd f(n_l, K);
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < n_l; ++i) f(i, k) = (y_l[i] == k + 1) ? 1.0 : -1.0;
        f.col(k).array() -= f.col(k).mean();
    }
    return f;
}

Eigen::MatrixXd laplacian_regularization(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                         double a) {
    if (a < -2.0 || a > 0.0)
        std::cerr << "laplacian_regularization: a = " << a
                  << " lies outside the usual [-2, 0] range\n";
    LaplacianGridSolver solver(g, static_cast<int>(f_l.rows()));
    return solver.solve(f_l, a);
}

LaplacianGridSolver::LaplacianGridSolver(const WeightedGraph& g, int n_l) {
    require_prefix_split(g, n_l);
    require_positive_degrees(g);
    const int n_u = g.n - n_l;
    const Eigen::MatrixXd W = g.dense();
    d_l_ = g.degrees.head(n_l);
    d_u_ = g.degrees.tail(n_u);
    Wul_ = W.bottomLeftCorner(n_u, n_l);
    Eigen::MatrixXd M = -W.bottomRightCorner(n_u, n_u);
    M.diagonal() += d_u_;
    llt_.compute(M);
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error(
            "laplacian_regularization: L_uu is singular (unlabeled subgraph disconnected from "
            "the labeled points)");
}

Eigen::MatrixXd LaplacianGridSolver::solve(const Eigen::MatrixXd& f_l, double a) const {
    if (f_l.rows() != d_l_.size())
        throw std::invalid_argument("laplacian grid solver: f_l rows disagree with n_l");
    const Eigen::MatrixXd rhs = Wul_ * (d_l_.array().pow(a).matrix().asDiagonal() * f_l);
    Eigen::MatrixXd g_sol = llt_.solve(rhs);
    return d_u_.array().pow(-a).matrix().asDiagonal() * g_sol;
}

Eigen::MatrixXd centered_regularization_alpha(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                              double alpha, CenteredSolveReport* report) {
    const int n_l = static_cast<int>(f_l.rows());
    require_prefix_split(g, n_l);
    const int n_u = g.n - n_l;
    const Eigen::MatrixXd What = center_weights(g);
    const Eigen::MatrixXd Wuu = What.bottomRightCorner(n_u, n_u);
    const double bound = sym_operator_norm(Wuu);
    if (!(alpha > bound))
        throw std::invalid_argument("centered regularization: alpha = " + std::to_string(alpha) +
                                    " must exceed ||What_uu|| ~= " + std::to_string(bound));
    Eigen::MatrixXd M = -Wuu;
    M.diagonal().array() += alpha;
    Eigen::MatrixXd f_u = Eigen::LLT<Eigen::MatrixXd>(M).solve(
        What.bottomLeftCorner(n_u, n_l) * f_l);
    if (report) {
        report->alpha = alpha;
        report->wuu_norm = bound;
        report->achieved_norm_sq = f_u.squaredNorm();
    }
    return f_u;
}

CenteredEigenSweep::CenteredEigenSweep(const WeightedGraph& g, const Eigen::MatrixXd& f_l) {
    const int n_l = static_cast<int>(f_l.rows());
    require_prefix_split(g, n_l);
    const int n_u = g.n - n_l;
    const Eigen::MatrixXd What = center_weights(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(What.bottomRightCorner(n_u, n_u));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("centered sweep: eigendecomposition failed");
    lam_ = es.eigenvalues();
    U_ = es.eigenvectors();
    Utb_ = U_.transpose() * (What.bottomLeftCorner(n_u, n_l) * f_l);
    wuu_norm_ = std::max(std::abs(lam_(0)), std::abs(lam_(n_u - 1)));
}

Eigen::MatrixXd CenteredEigenSweep::solve(double alpha) const {
    if (!(alpha > wuu_norm_))
        throw std::invalid_argument("centered sweep: alpha must exceed ||What_uu|| ~= " +
                                    std::to_string(wuu_norm_));
    const Eigen::ArrayXd inv = 1.0 / (alpha - lam_.array());
    return U_ * (inv.matrix().asDiagonal() * Utb_);
}

double CenteredEigenSweep::solution_norm_sq(double alpha) const {
    const Eigen::ArrayXd inv = 1.0 / (alpha - lam_.array());
    return (Utb_.array().colwise() * inv).square().sum();
}

double solve_alpha_for_norm(const CenteredEigenSweep& sweep, double e) {
    if (!(e > 0.0)) throw std::invalid_argument("solve_alpha_for_norm: need e > 0");
    const double target = static_cast<double>(sweep.n_u()) * e * e;
    const double nu = sweep.wuu_norm();
    if (!(nu > 0.0))
        throw std::runtime_error("solve_alpha_for_norm: centered block has zero norm");
    const auto norm_at = [&](double t) { return sweep.solution_norm_sq(nu * (1.0 + std::pow(10.0, t))); };

    double t_lo = -12.0, t_hi = 12.0;
    if (norm_at(t_lo) < target)
        throw std::runtime_error(
            "solve_alpha_for_norm: requested norm is unreachable for alpha > ||What_uu||; the "
            "target lies in the spectral (top-eigenvector) limit");
    while (norm_at(t_hi) > target) {
        t_hi += 6.0;
        if (t_hi > 60.0)
            throw std::runtime_error("solve_alpha_for_norm: bisection bracket expansion failed");
    }
    for (int it = 0; it < 300; ++it) {
        const double t = 0.5 * (t_lo + t_hi);
        const double v = norm_at(t);
        if (v > target)
            t_lo = t;
        else
            t_hi = t;
        if (std::abs(std::sqrt(v) - std::sqrt(target)) <= 1e-9 * std::sqrt(target)) break;
    }
    const double alpha = nu * (1.0 + std::pow(10.0, 0.5 * (t_lo + t_hi)));
    const double achieved = std::sqrt(sweep.solution_norm_sq(alpha));
    if (std::abs(achieved - std::sqrt(target)) > 1e-8 * std::sqrt(target))
        throw std::runtime_error("solve_alpha_for_norm: did not reach the target norm (residual " +
                                 std::to_string(achieved / std::sqrt(target) - 1.0) + ")");
    return alpha;
}

Eigen::MatrixXd centered_regularization_e(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                          double e, CenteredSolveReport* report) {
    if (f_l.cols() != 1)
        throw std::invalid_argument("centered_regularization_e: single score column expected");
    CenteredEigenSweep sweep(g, f_l);
    const double alpha = solve_alpha_for_norm(sweep, e);
    Eigen::MatrixXd f_u = sweep.solve(alpha);
    if (report) {
        report->alpha = alpha;
        report->wuu_norm = sweep.wuu_norm();
        report->achieved_norm_sq = f_u.squaredNorm();
    }
    return f_u;
}

Eigen::MatrixXd label_propagation_iterate(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                          double alpha, double tol, int max_iter) {
    const int n_l = static_cast<int>(f_l.rows());
    require_prefix_split(g, n_l);
    const int n_u = g.n - n_l;
    const Eigen::MatrixXd What = center_weights(g);
    const Eigen::MatrixXd Wuu = What.bottomRightCorner(n_u, n_u);
    const Eigen::MatrixXd b = What.bottomLeftCorner(n_u, n_l) * f_l;
    Eigen::MatrixXd f = b / alpha;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd next = (b + Wuu * f) / alpha;
        const double delta = (next - f).cwiseAbs().maxCoeff();
        f.swap(next);
        if (delta < tol) return f;
    }
    const double residual = ((alpha * f - Wuu * f) - b).cwiseAbs().maxCoeff();
    throw std::runtime_error("label propagation: no convergence after " +
                             std::to_string(max_iter) +
                             " iterations (residual " + std::to_string(residual) + ")");
}

SymLaplacianEigen::SymLaplacianEigen(const WeightedGraph& g) {
    require_positive_degrees(g);
    d_ = g.degrees;
    const Eigen::VectorXd dm_half = d_.array().rsqrt();
    Eigen::MatrixXd Ls = -(dm_half.asDiagonal() * g.dense() * dm_half.asDiagonal());
    Ls.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ls);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symmetric laplacian: eigendecomposition failed");
    lam_ = es.eigenvalues();
    V_ = es.eigenvectors();
}

Eigen::MatrixXd SymLaplacianEigen::iterated_scores(const Eigen::MatrixXd& f_l, int m,
                                                   double a) const {
    if (m < 1) throw std::invalid_argument("iterated laplacian: need m >= 1");
    const int n = static_cast<int>(d_.size());
    const int n_l = static_cast<int>(f_l.rows());
    if (n_l < 1 || n_l >= n)
        throw std::invalid_argument("iterated laplacian: f_l rows must satisfy 1 <= n_l < n");
    const int n_u = n - n_l;

    // L^(a) = D^{-1/2-a} L_s D^{1/2+a}, so with g = D^{1/2+a} f the system
    // (L^m)_uu f_u = -(L^m)_ul f_l becomes (L_s^m)_uu g_u = -(L_s^m)_ul g_l.
    const Eigen::ArrayXd d_pow = d_.array().pow(0.5 + a);
    const Eigen::MatrixXd h = d_pow.head(n_l).matrix().asDiagonal() * f_l;

    const Eigen::ArrayXd lam_m = lam_.array().pow(m);
    const Eigen::MatrixXd Vu = V_.bottomRows(n_u);
    const Eigen::MatrixXd Vl = V_.topRows(n_l);
    const Eigen::MatrixXd Muu = Vu * lam_m.matrix().asDiagonal() * Vu.transpose();
    const Eigen::MatrixXd rhs = -(Vu * (lam_m.matrix().asDiagonal() * (Vl.transpose() * h)));
    Eigen::LLT<Eigen::MatrixXd> llt(Muu);
    Eigen::MatrixXd g_u;
    if (llt.info() == Eigen::Success) {
        g_u = llt.solve(rhs);
    } else {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Muu);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("iterated laplacian: (L^m)_uu solve failed");
        g_u = ldlt.solve(rhs);
    }
    return d_pow.tail(n_u).inverse().matrix().asDiagonal() * g_u;
}

Eigen::MatrixXd SymLaplacianEigen::eigenbasis_scores(const Eigen::MatrixXd& y_l, int s) const {
    const int n = static_cast<int>(d_.size());
    const int n_l = static_cast<int>(y_l.rows());
    if (n_l < 1 || n_l >= n)
        throw std::invalid_argument("eigenbasis scores: y_l rows must satisfy 1 <= n_l < n");
    if (s < 1 || s > n)
        throw std::invalid_argument("eigenbasis scores: subspace dimension must lie in [1, n]");
    const Eigen::MatrixXd E = V_.leftCols(s);
    const Eigen::MatrixXd El = E.topRows(n_l);
    Eigen::MatrixXd gram = El.transpose() * El;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        gram.diagonal().array() += 1e-10;  // rank-deficient fit: ridge regularize
        llt.compute(gram);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("eigenbasis scores: normal equations not solvable");
    }
    const Eigen::MatrixXd coef = llt.solve(El.transpose() * y_l);
    return E * coef;
}

Eigen::MatrixXd iterated_laplacian(const WeightedGraph& g, const Eigen::MatrixXd& f_l, int m,
                                   double a) {
    if (m < 1) throw std::invalid_argument("iterated_laplacian: need m >= 1");
    SymLaplacianEigen shared(g);
    return shared.iterated_scores(f_l, m, a);
}

Eigen::MatrixXd eigenvector_ssl(const WeightedGraph& g, const Eigen::MatrixXd& y_l, int s) {
    SymLaplacianEigen shared(g);
    return shared.eigenbasis_scores(y_l, s);
}

std::vector<int> classify(const Eigen::MatrixXd& scores) {
    if (!scores.allFinite()) throw std::invalid_argument("classify: non-finite scores");
    const int n = static_cast<int>(scores.rows());
    std::vector<int> labels(n);
    if (scores.cols() == 1) {
        for (int i = 0; i < n; ++i) labels[i] = scores(i, 0) > 0.0 ? 2 : 1;
    } else {
        for (int i = 0; i < n; ++i) {
            int best = 0;
            for (int k = 1; k < scores.cols(); ++k)
                if (scores(i, k) > scores(i, best)) best = k;
            labels[i] = best + 1;
        }
    }
    return labels;
}

double sym_operator_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                         int n, double tol, int max_iter) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = apply(v);
        const double norm = w.norm();
        if (norm < 1e-300) {
            // start vector happened to lie in the kernel; perturb deterministically
            v.setZero();
            v(it % n) = 1.0;
            continue;
        }
        const double change = std::abs(norm - estimate);
        estimate = norm;
        v = w / norm;
        if (it > 0 && change <= tol * std::max(estimate, 1e-300)) return estimate;
    }
    return estimate;  // best available estimate after max_iter
}

double sym_operator_norm(const Eigen::MatrixXd& M, double tol, int max_iter) {
    return sym_operator_norm([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(M * x); },
                             static_cast<int>(M.rows()), tol, max_iter);
}

Eigen::MatrixXd sparse_centered_solve(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                      double alpha, CenteredSolveReport* report) {
    const int n_l = static_cast<int>(f_l.rows());
    require_prefix_split(g, n_l);
    const int n = g.n, n_u = n - n_l;
    const Eigen::SparseMatrix<double> W = g.sparse ? g.Ws : g.Wd.sparseView();
    const Eigen::SparseMatrix<double> Wuu = W.block(n_l, n_l, n_u, n_u);
    const Eigen::SparseMatrix<double> Wul = W.block(n_l, 0, n_u, n_l);

    const Eigen::VectorXd v = g.degrees;  // W 1
    const double total = v.sum();         // 1^T W 1
    Eigen::MatrixXd U_u(n_u, 2), U_l(n_l, 2);
    U_u.col(0).setOnes();
    U_u.col(1) = v.tail(n_u);
    U_l.col(0).setOnes();
    U_l.col(1) = v.head(n_l);
    Eigen::Matrix2d A;
    A << total / (static_cast<double>(n) * n), -1.0 / n, -1.0 / n, 0.0;
    Eigen::Matrix2d A_inv;
    A_inv << 0.0, -static_cast<double>(n), -static_cast<double>(n), -total;

    // right-hand side What_ul f_l without forming What
    Eigen::MatrixXd b = Wul * f_l + U_u * (A * (U_l.transpose() * f_l));

    Eigen::SparseMatrix<double> M(n_u, n_u);
    M.setIdentity();
    M = alpha * M - Wuu;

    // alpha I - W_uu may be indefinite even when alpha I - What_uu is positive
    // definite, hence MINRES rather than CG.
    Eigen::MINRES<Eigen::SparseMatrix<double>> solver;
    solver.setTolerance(1e-12);
    solver.setMaxIterations(40 * n_u);
    solver.compute(M);

    const auto krylov = [&](const Eigen::VectorXd& rhs) {
        Eigen::VectorXd x = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("sparse centered solve: MINRES did not converge (error " +
                                     std::to_string(solver.error()) + ")");
        return x;
    };

    Eigen::MatrixXd x0(n_u, b.cols());
    for (int c = 0; c < b.cols(); ++c) x0.col(c) = krylov(b.col(c));
    Eigen::MatrixXd T(n_u, 2);
    T.col(0) = krylov(U_u.col(0));
    T.col(1) = krylov(U_u.col(1));

    const Eigen::Matrix2d cap = A_inv - U_u.transpose() * T;
    Eigen::MatrixXd f_u = x0 + T * cap.inverse() * (U_u.transpose() * x0);

    // verify against the defining linear system
    Eigen::MatrixXd what_uu_f = Wuu * f_u + U_u * (A * (U_u.transpose() * f_u));
    const double resid = (alpha * f_u - what_uu_f - b).norm();
    const double scale = std::max(1.0, b.norm());
    if (!(resid <= 1e-7 * scale))
        throw std::runtime_error("sparse centered solve: residual " + std::to_string(resid) +
                                 " exceeds tolerance");
    if (report) {
        report->alpha = alpha;
        report->achieved_norm_sq = f_u.squaredNorm();
        report->iterations = static_cast<int>(solver.iterations());
    }
    return f_u;
}

}  // namespace gssl
