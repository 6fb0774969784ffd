#pragma once
#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gssl/graph.hpp"

namespace gssl {

struct CenteredSolveReport {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double wuu_norm = std::numeric_limits<double>::quiet_NaN();  // operator-norm estimate of What_uu
    double achieved_norm_sq = std::numeric_limits<double>::quiet_NaN();  // ||f_u||^2
    int iterations = 0;
};

/**
 * Class-balanced labeled scores.  Binary labels in {-1,+1} give the centered
 * column (I - 11^T/n_l) y_l; labels in {1..K} give one centered +/-1
 * one-vs-rest column per class (argmax decision), which reduces to the
 * binary rule at K = 2.
 */
Eigen::MatrixXd balanced_label_scores(const std::vector<int>& y_l);

/// f_u = -(L^(a)_uu)^{-1} L^(a)_ul f_l with the labeled prefix convention.
Eigen::MatrixXd laplacian_regularization(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                         double a);

/**
 * Solves the Laplacian regularization for many values of a with a single
 * factorization: (L^(a))_uu f_u = -(L^(a))_ul f_l is equivalent to
 * (D_u - W_uu) g = W_ul D_l^a f_l with f_u = D_u^{-a} g, and the left-hand
 * matrix does not depend on a.
 */
class LaplacianGridSolver {
public:
    LaplacianGridSolver(const WeightedGraph& g, int n_l);
    Eigen::MatrixXd solve(const Eigen::MatrixXd& f_l, double a) const;

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::MatrixXd Wul_;
    Eigen::VectorXd d_l_, d_u_;
};

/// f_u = (alpha I - What_uu)^{-1} What_ul f_l, requires alpha > ||What_uu||.
Eigen::MatrixXd centered_regularization_alpha(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                              double alpha, CenteredSolveReport* report = nullptr);

/**
 * Eigendecomposition of What_uu done once so that score vectors, solution
 * norms, and the norm-constraint bisection are O(n_u) per alpha; used by the
 * alpha grids of the Monte Carlo harness and by the norm-targeted solvers.
 */
class CenteredEigenSweep {
public:
    CenteredEigenSweep(const WeightedGraph& g, const Eigen::MatrixXd& f_l);
    double wuu_norm() const { return wuu_norm_; }
    Eigen::MatrixXd solve(double alpha) const;
    double solution_norm_sq(double alpha) const;
    int n_u() const { return static_cast<int>(lam_.size()); }

private:
    Eigen::VectorXd lam_;
    Eigen::MatrixXd U_;
    Eigen::MatrixXd Utb_;  // U^T What_ul f_l
    double wuu_norm_ = 0.0;
};

/// The unique alpha > ||What_uu|| with ||f_u(alpha)||^2 = n_u e^2 (binary
/// scores only).  Bisection on log10(alpha/||What_uu|| - 1).
double solve_alpha_for_norm(const CenteredEigenSweep& sweep, double e);

/// Norm-constrained centered regularization: composition of the two above.
Eigen::MatrixXd centered_regularization_e(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                          double e, CenteredSolveReport* report = nullptr);

/// Fixed-point iteration f_u <- alpha^{-1}(What_ul f_l + What_uu f_u) from
/// f_u = alpha^{-1} What_ul f_l; converges to the direct solution for
/// alpha > ||What_uu||.
Eigen::MatrixXd label_propagation_iterate(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                          double alpha, double tol = 1e-10, int max_iter = 100000);

/// f_u = -((L^m)_uu)^{-1} (L^m)_ul f_l, power of the whole matrix taken
/// before block extraction.  a = -1/2 gives the symmetric normalization.
Eigen::MatrixXd iterated_laplacian(const WeightedGraph& g, const Eigen::MatrixXd& f_l, int m,
                                   double a = -0.5);

/**
 * Shared eigendecomposition of L_s = I - D^{-1/2} W D^{-1/2} serving both
 * the iterated-Laplacian m-grid and the eigenvector-basis s-grid.
 */
class SymLaplacianEigen {
public:
    explicit SymLaplacianEigen(const WeightedGraph& g);
    /// Iterated-Laplacian scores at power m for the a-normalized family.
    Eigen::MatrixXd iterated_scores(const Eigen::MatrixXd& f_l, int m, double a = -0.5) const;
    /// Least-squares fit of y_l on the s lowest-frequency eigenvectors,
    /// evaluated at every node (n x K).
    Eigen::MatrixXd eigenbasis_scores(const Eigen::MatrixXd& y_l, int s) const;
    const Eigen::VectorXd& eigenvalues() const { return lam_; }
    const Eigen::MatrixXd& eigenvectors() const { return V_; }

private:
    Eigen::VectorXd lam_;  // ascending
    Eigen::MatrixXd V_;
    Eigen::VectorXd d_;    // degrees
};

/// Least-squares scores on the s eigenvectors of L_s with smallest
/// eigenvalues; rows 0..n_l-1 of y are the fitted labels.  Returns scores
/// for all n points.
Eigen::MatrixXd eigenvector_ssl(const WeightedGraph& g, const Eigen::MatrixXd& y_l, int s);

/**
 * Centered regularization on a sparse graph without densifying: What is W
 * plus a rank-2 term [1 v] A [1 v]^T (v = W1), so (alpha I - What_uu)^{-1}
 * is computed from Krylov solves with alpha I - W_uu plus an explicit 2x2
 * correction.  Matches the dense path to 1e-7 relative.
 */
Eigen::MatrixXd sparse_centered_solve(const WeightedGraph& g, const Eigen::MatrixXd& f_l,
                                      double alpha, CenteredSolveReport* report = nullptr);

/// Binary: class 1 iff score <= 0; multiclass: argmax, ties to the lowest
/// class index.  Classes are reported as 1..K.
std::vector<int> classify(const Eigen::MatrixXd& scores);

/// Operator norm of a symmetric matrix by power iteration with a
/// deterministic start vector.
double sym_operator_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                         int n, double tol = 1e-8, int max_iter = 10000);
double sym_operator_norm(const Eigen::MatrixXd& M, double tol = 1e-8, int max_iter = 10000);

}  // namespace gssl
