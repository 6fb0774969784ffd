#pragma once
#include <Eigen/Dense>

#include "gssl/kernel.hpp"
#include "gssl/model.hpp"

namespace gssl {

/// Standard Gaussian CDF and tail function; normal_cdf(x) + normal_q(x) = 1.
double normal_cdf(double x);
double normal_q(double x);

/**
 * Per-class limiting score law of a graph regularizer in the
 * high-dimensional regime and the classification accuracy it implies.
 * Class-k scores are asymptotically N((-1)^k (1-rho_k) m_hat, sigma_k^2),
 * so accuracy = sum_k rho_k Phi((1-rho_k) m_hat / sigma_k).
 */
struct AsymptoticPrediction {
    double mean1 = 0.0, mean2 = 0.0;  // per-class score means
    double sigma1 = 0.0, sigma2 = 0.0;  // per-class score standard deviations
    double accuracy = 0.5;
    double r = 0.0;      // variance over squared mean (homoscedastic figure of merit)
    double theta = 0.0;  // centered predictor only; 0 for the Laplacian one
    double xi = 0.0;     // centered predictor only
    double e = 0.0;      // centered predictor only (norm level)
};

/**
 * (p+1)-dimensional lift of the mixture statistics carrying the kernel
 * derivatives: nu_k = [sqrt(-2h'(tau)) mu_k ; sqrt(h''(tau)) tr(C_k)/sqrt(p)],
 * Sigma_k = blockdiag(-2h'(tau) C_k, 2h''(tau) tr(C_k^2)/p), and the mixture
 * average Sigma_bar = rho1 Sigma1 + rho2 Sigma2.
 */
struct LiftedStatistics {
    Eigen::VectorXd nu1, nu2;
    Eigen::MatrixXd Sigma1, Sigma2, Sigma_bar;
};

/// Requires h'(tau) < 0 and h''(tau) >= 0 (otherwise the limiting theory
/// does not apply and an exception is thrown).
LiftedStatistics lift_statistics(const MixtureModel& model, const KernelFunction& kernel);

struct ThetaQS {
    double theta = 0.0, q = 0.0, s = 0.0, s1 = 0.0, s2 = 0.0;
};

struct XiDomain {
    double xi_m = 0.0;     // theta(xi_m) = 1
    double xi_sigma = 0.0;  // q(xi_sigma) = c_u
    double xi_sup = 0.0;   // min of the two
};

/// Everything the centered predictor knows at one resolvent parameter xi.
struct XiState {
    double xi = 0.0;
    double theta = 0.0, q = 0.0, s = 0.0, s1 = 0.0, s2 = 0.0;
    double m = 0.0;
    double sigma_sq = 0.0, sigma1_sq = 0.0, sigma2_sq = 0.0;
    double xi_m = 0.0, xi_sigma = 0.0, xi_sup = 0.0;
    double e = 0.0;  // sqrt(rho1 rho2 m^2 + sigma^2)
};

/**
 * Centered-regularization theory engine.  The resolvent (I - xi Sigma_bar)^{-1}
 * is diagonalized once at construction; every xi-dependent scalar is then
 * O(p) per evaluation (O(p^2) for per-class terms of heteroscedastic models),
 * which the root finders and grid sweeps rely on.
 */
class CenteredTheoryEngine {
public:
    CenteredTheoryEngine(const MixtureModel& model, const KernelFunction& kernel);
    /// From precomputed lifted statistics; predict_theta(0) (the Laplacian
    /// limit) is unavailable through this constructor.
    CenteredTheoryEngine(const LiftedStatistics& lifted, const MixtureModel& model);

    const LiftedStatistics& lifted() const { return lifted_; }
    const MixtureModel& model() const { return model_; }
    const XiDomain& domain() const { return domain_; }

    ThetaQS theta_q_s(double xi) const;
    XiState at_xi(double xi) const;

    /// Unique xi with rho1 rho2 m(xi)^2 + sigma^2(xi) = e^2.
    double xi_for_e(double e) const;
    /// Unique xi with theta(xi) = theta, theta in (0, theta(xi_sup)).
    double xi_for_theta(double theta) const;
    /// Largest theta reachable inside the validity domain.
    double theta_sup() const;

    AsymptoticPrediction predict_at_xi(double xi) const;
    AsymptoticPrediction predict_e(double e) const;
    /// theta = 0 returns the norm->0 limit, which is the Laplacian predictor.
    AsymptoticPrediction predict_theta(double theta) const;

    /// max over e of predicted accuracy (coarse theta grid + golden-section
    /// refinement); e_star receives the argmax when non-null.
    AsymptoticPrediction max_over_e(double* e_star = nullptr) const;

    /// Norm level selected by the fixed-norm/Lagrangian matching condition
    /// m = m^2 / (m^2 + sigma^2).
    double condition_e() const;

    /// e -> infinity limit of the predicted accuracy with the unlabeled
    /// ratio replaced by c_eff (pass model.c_u for the norm-constrained
    /// solver's own limit, c_l + c_u for clustering on the full graph).
    double spectral_limit_accuracy(double c_eff) const;

private:
    MixtureModel model_;
    LiftedStatistics lifted_;
    Eigen::VectorXd delta_;  // eigenvalues of Sigma_bar, ascending
    Eigen::VectorXd w_;      // eigenbasis coordinates of nu1 - nu2
    bool homoscedastic_ = true;
    Eigen::MatrixXd B1_, B2_;  // eigenbasis forms of Sigma_k (heteroscedastic only)
    double xi_max_ = 0.0;      // 1 / lambda_max(Sigma_bar)
    XiDomain domain_;
    bool has_laplacian_limit_ = false;
    AsymptoticPrediction laplacian_limit_;  // predictor at theta = 0

    void init();
    double theta_at(double xi) const;
    double q_at(double xi) const;
};

/// Single-shot free functions mirroring the engine (each factors the
/// resolvent on entry; use the engine for repeated evaluation).
ThetaQS theta_q_s(double xi, const LiftedStatistics& lifted, const MixtureModel& model);
XiDomain xi_domain(const LiftedStatistics& lifted, const MixtureModel& model);
XiState centered_theory_at_xi(double xi, const LiftedStatistics& lifted,
                              const MixtureModel& model);
double solve_xi_for_e(double e, const LiftedStatistics& lifted, const MixtureModel& model);
AsymptoticPrediction centered_theory(double e, const MixtureModel& model,
                                     const KernelFunction& kernel);
AsymptoticPrediction centered_theory_max_e(const MixtureModel& model,
                                           const KernelFunction& kernel,
                                           double* e_star = nullptr);
AsymptoticPrediction centered_theory_at_theta(double theta, const MixtureModel& model,
                                              const KernelFunction& kernel);
double spectral_limit_theory(const MixtureModel& model, const KernelFunction& kernel,
                             double c_eff);

/// Laplacian-regularization limiting law (random-walk normalization); the
/// accuracy does not depend on c_u.
AsymptoticPrediction laplacian_theory(const MixtureModel& model, const KernelFunction& kernel);

/// Residual of the self-consistency identity tying r = sigma^2/m^2 to
/// (theta, q, s, c_l, c_u); an algebraic identity of the computed
/// quantities, so the residual must vanish to numerical precision.
double r_ctr_consistency_check(double e, const MixtureModel& model,
                               const KernelFunction& kernel);

/// Small-norm limit of r for the homoscedastic model:
/// dmu^T C dmu/||dmu||^4 + tr(C^2)/(p ||dmu||^4 rho1 rho2 c_l).
double r_lap(const MixtureModel& model);

struct IsotropicFixedPoint {
    double q = 0.0;
    double accuracy = 0.5;
    int iterations = 0;
};

/// Isotropic-model fixed points (C = I, mu2 = -mu1): information-theoretic
/// optimum and the centered regularizer's own limit.  Accuracy = Phi(sqrt(q)).
IsotropicFixedPoint bayes_optimal_isotropic(double mu_norm_sq, double c_l, double c_u);
IsotropicFixedPoint centered_isotropic(double mu_norm_sq, double c_l, double c_u);

/// E_{z ~ N(q,q)}[tanh z] * (q+1)/q, the efficiency ratio of unlabeled data;
/// -> 1 as q -> 0+, peaks near 1.168 around q = 3.
double g_of_q(double q);

}  // namespace gssl
