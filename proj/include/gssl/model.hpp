#pragma once
#include <Eigen/Dense>
#include <stdexcept>

namespace gssl {

/**
 * Two-class Gaussian mixture: x ~ N(mu_k, C_k) with prior rho_k, in dimension
 * p, observed with n_l = round(c_l*p) labeled and n_u = round(c_u*p)
 * unlabeled samples.
 */
struct MixtureModel {
    int p = 0;
    double rho1 = 0.5, rho2 = 0.5;
    Eigen::VectorXd mu1, mu2;
    Eigen::MatrixXd C1, C2;
    double c_l = 0.0, c_u = 0.0;

    double c0() const { return c_l + c_u; }
    double tau() const { return (C1.trace() + C2.trace()) / p; }
    int n_labeled() const { return static_cast<int>(std::lround(c_l * p)); }
    int n_unlabeled() const { return static_cast<int>(std::lround(c_u * p)); }

    bool homoscedastic(double tol = 1e-12) const {
        return (C1 - C2).cwiseAbs().maxCoeff() <= tol * C1.cwiseAbs().maxCoeff();
    }

    void validate() const {
        if (p < 1) throw std::invalid_argument("mixture model: p must be >= 1");
        if (!(rho1 > 0.0 && rho1 < 1.0) || std::abs(rho1 + rho2 - 1.0) > 1e-12)
            throw std::invalid_argument("mixture model: priors must lie in (0,1) and sum to 1");
        if (mu1.size() != p || mu2.size() != p || C1.rows() != p || C1.cols() != p ||
            C2.rows() != p || C2.cols() != p)
            throw std::invalid_argument("mixture model: parameter dimensions disagree with p");
        if (c_l <= 0.0 || c_u < 0.0)
            throw std::invalid_argument("mixture model: need c_l > 0 and c_u >= 0");
        for (const Eigen::MatrixXd* C : {&C1, &C2}) {
            if ((*C - C->transpose()).cwiseAbs().maxCoeff() > 1e-10)
                throw std::invalid_argument("mixture model: covariance not symmetric");
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*C, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() <= 0.0)
                throw std::invalid_argument("mixture model: covariance not positive definite");
        }
    }
};

/// C_ij = r^|i-j|.
inline Eigen::MatrixXd toeplitz_covariance(int p, double r) {
    Eigen::MatrixXd C(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) C(i, j) = std::pow(r, std::abs(i - j));
    return C;
}

/// Balanced model with mu2 = -mu1 = norm*e_1 and shared covariance C.
inline MixtureModel opposite_means_model(int p, double mu_entry, Eigen::MatrixXd C,
                                         double c_l, double c_u) {
    MixtureModel m;
    m.p = p;
    m.mu1 = Eigen::VectorXd::Zero(p);
    m.mu1(0) = -mu_entry;
    m.mu2 = -m.mu1;
    m.C1 = C;
    m.C2 = std::move(C);
    m.c_l = c_l;
    m.c_u = c_u;
    return m;
}

}  // namespace gssl
