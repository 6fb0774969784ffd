#include "gssl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gssl {

namespace {

// 64-node Gauss-Hermite rule (weight e^{-t^2}); quadrature error for the
// E tanh expectations below is under 1e-10 for q <= 50.
constexpr int kGhN = 64;
constexpr double kGhNodes[kGhN] = {
    -1.05261231679605469e+01, -9.89528758682953935e+00, -9.37315954964672216e+00,
    -8.90724909996476910e+00, -8.47752908337986355e+00, -8.07368728501022481e+00,
    -7.68954016404049678e+00, -7.32101303278094928e+00, -6.96524112055110756e+00,
    -6.62011226263602737e+00, -6.28401122877482798e+00, -5.95566632679948604e+00,
    -5.63405216434997236e+00, -5.31832522463327084e+00, -5.00777960219876839e+00,
    -4.70181564740749991e+00, -4.39991716822813750e+00, -4.10163447456665686e+00,
    -3.80657151394536042e+00, -3.51437593574090634e+00, -3.22473129199203568e+00,
    -2.93735082300462169e+00, -2.65197243543063488e+00, -2.36835458863240156e+00,
    -2.08627287988176180e+00, -1.80551717146554491e+00, -1.52588914020986355e+00,
    -1.24720015694311792e+00, -9.69269423071178027e-01, -6.91922305810044547e-01,
    -4.14988824121078681e-01, -1.38302244987009715e-01, 1.38302244987009715e-01,
    4.14988824121078681e-01, 6.91922305810044547e-01, 9.69269423071178027e-01,
    1.24720015694311792e+00, 1.52588914020986355e+00, 1.80551717146554491e+00,
    2.08627287988176180e+00, 2.36835458863240156e+00, 2.65197243543063488e+00,
    2.93735082300462169e+00, 3.22473129199203568e+00, 3.51437593574090634e+00,
    3.80657151394536042e+00, 4.10163447456665686e+00, 4.39991716822813750e+00,
    4.70181564740749991e+00, 5.00777960219876839e+00, 5.31832522463327084e+00,
    5.63405216434997236e+00, 5.95566632679948604e+00, 6.28401122877482798e+00,
    6.62011226263602737e+00, 6.96524112055110756e+00, 7.32101303278094928e+00,
    7.68954016404049678e+00, 8.07368728501022481e+00, 8.47752908337986355e+00,
    8.90724909996476910e+00, 9.37315954964672216e+00, 9.89528758682953935e+00,
    1.05261231679605469e+01};
constexpr double kGhWeights[kGhN] = {
    5.53570653585670235e-49, 1.67974799010812651e-43, 3.42113801125560060e-39,
    1.55739062462980566e-35, 2.54966089911293405e-32, 1.92910359546499477e-29,
    7.86179778892592019e-27, 1.91170688330063649e-24, 2.98286278427984379e-22,
    3.15225456650376834e-20, 2.35188471067583268e-18, 1.28009339132243320e-16,
    5.21862372659081109e-15, 1.62834073070971825e-13, 3.95917776694771059e-12,
    7.61521725014539772e-11, 1.17361674232155589e-09, 1.46512531647610567e-08,
    1.49553293672724677e-07, 1.25834025103118171e-06, 8.78849923085035900e-06,
    5.12592913578627409e-05, 2.50983698513062583e-04, 1.03632909950757460e-03,
    3.62258697853445845e-03, 1.07560405098791299e-02, 2.72031289536889091e-02,
    5.87399819640994428e-02, 1.08498349306186723e-01, 1.71685842349083656e-01,
    2.32994786062678177e-01, 2.71377424941303902e-01, 2.71377424941303902e-01,
    2.32994786062678177e-01, 1.71685842349083656e-01, 1.08498349306186723e-01,
    5.87399819640994428e-02, 2.72031289536889091e-02, 1.07560405098791299e-02,
    3.62258697853445845e-03, 1.03632909950757460e-03, 2.50983698513062583e-04,
    5.12592913578627409e-05, 8.78849923085035900e-06, 1.25834025103118171e-06,
    1.49553293672724677e-07, 1.46512531647610567e-08, 1.17361674232155589e-09,
    7.61521725014539772e-11, 3.95917776694771059e-12, 1.62834073070971825e-13,
    5.21862372659081109e-15, 1.28009339132243320e-16, 2.35188471067583268e-18,
    3.15225456650376834e-20, 2.98286278427984379e-22, 1.91170688330063649e-24,
    7.86179778892592019e-27, 1.92910359546499477e-29, 2.54966089911293405e-32,
    1.55739062462980566e-35, 3.42113801125560060e-39, 1.67974799010812651e-43,
    5.53570653585670235e-49};

const double kInvSqrtPi = 1.0 / std::sqrt(M_PI);

/// E_{z ~ N(q, q)}[tanh z] by Gauss-Hermite substitution z = q + sqrt(2q) t.
double expected_tanh(double q) {
    if (q <= 0.0) return 0.0;
    const double spread = std::sqrt(2.0 * q);
    double acc = 0.0;
    for (int i = 0; i < kGhN; ++i) acc += kGhWeights[i] * std::tanh(q + spread * kGhNodes[i]);
    return kInvSqrtPi * acc;
}

/// Damped fixed point q <- (q + map(q))/2 from q0, to |dq| <= 1e-10.
template <typename Map>
IsotropicFixedPoint damped_fixed_point(double q0, const Map& map) {
    IsotropicFixedPoint out;
    double q = q0;
    for (int it = 1; it <= 10000; ++it) {
        const double next = 0.5 * (q + map(q));
        const double dq = std::abs(next - q);
        q = next;
        if (dq <= 1e-10) {
            out.q = q;
            out.accuracy = normal_cdf(std::sqrt(std::max(q, 0.0)));
            out.iterations = it;
            return out;
        }
    }
    throw std::runtime_error("isotropic fixed point: no convergence after 10000 iterations");
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol_rel) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > tol_rel * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

LiftedStatistics lift_statistics(const MixtureModel& model, const KernelFunction& kernel) {
    model.validate();
    const double tau = model.tau();
    const double hp = kernel.hp(tau);
    const double hpp = kernel.hpp(tau);
    if (!(hp < 0.0))
        throw std::invalid_argument("lifted statistics require h'(tau) < 0; got h'(" +
                                    std::to_string(tau) + ") = " + std::to_string(hp));
    if (hpp < 0.0)
        throw std::invalid_argument("lifted statistics require h''(tau) >= 0; got h''(" +
                                    std::to_string(tau) + ") = " + std::to_string(hpp));
    const int p = model.p;
    const double sq_hp = std::sqrt(-2.0 * hp);
    const double sq_hpp = std::sqrt(hpp);

    LiftedStatistics lifted;
    lifted.nu1.resize(p + 1);
    lifted.nu2.resize(p + 1);
    lifted.nu1 << sq_hp * model.mu1, sq_hpp * model.C1.trace() / std::sqrt(double(p));
    lifted.nu2 << sq_hp * model.mu2, sq_hpp * model.C2.trace() / std::sqrt(double(p));

    const auto lift_cov = [&](const Eigen::MatrixXd& C) {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p + 1, p + 1);
        S.topLeftCorner(p, p) = -2.0 * hp * C;
        S(p, p) = 2.0 * hpp * (C * C).trace() / double(p);
        return S;
    };
    lifted.Sigma1 = lift_cov(model.C1);
    lifted.Sigma2 = lift_cov(model.C2);
    lifted.Sigma_bar = model.rho1 * lifted.Sigma1 + model.rho2 * lifted.Sigma2;
    return lifted;
}

CenteredTheoryEngine::CenteredTheoryEngine(const MixtureModel& model,
                                           const KernelFunction& kernel)
    : model_(model), lifted_(lift_statistics(model, kernel)) {
    init();
    // theta -> 0 limit: the normalized score moments of the centered method
    // approach the Laplacian ones, so the theta = 0 sweep row is the
    // Laplacian predictor itself (continuous extension).
    laplacian_limit_ = laplacian_theory(model, kernel);
    has_laplacian_limit_ = true;
}

CenteredTheoryEngine::CenteredTheoryEngine(const LiftedStatistics& lifted,
                                           const MixtureModel& model)
    : model_(model), lifted_(lifted) {
    init();
}

void CenteredTheoryEngine::init() {
    model_.validate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lifted_.Sigma_bar);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("centered theory: eigendecomposition of Sigma_bar failed");
    delta_ = es.eigenvalues();
    w_ = es.eigenvectors().transpose() * (lifted_.nu1 - lifted_.nu2);
    homoscedastic_ = model_.homoscedastic(1e-12);
    if (!homoscedastic_) {
        B1_ = es.eigenvectors().transpose() * lifted_.Sigma1 * es.eigenvectors();
        B2_ = es.eigenvectors().transpose() * lifted_.Sigma2 * es.eigenvectors();
    }
    const double dmax = delta_(delta_.size() - 1);
    if (!(dmax > 0.0))
        throw std::runtime_error("centered theory: Sigma_bar has no positive eigenvalue");
    xi_max_ = 1.0 / dmax;

    // theta and q increase strictly from 0 and diverge at xi_max, so their
    // level sets are simple bisection problems.
    const double hi = xi_max_ * (1.0 - 1e-14);
    if (theta_at(hi) <= 1.0)
        throw std::runtime_error(
            "centered theory: theta stays below 1 on the domain (classes carry no "
            "first-order signal)");
    const auto bisect = [&](const std::function<double(double)>& f, double target) {
        double lo = 0.0, up = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + up);
            (f(mid) < target ? lo : up) = mid;
            if (up - lo <= 1e-12 * up) break;
        }
        return 0.5 * (lo + up);
    };
    domain_.xi_m = bisect([&](double x) { return theta_at(x); }, 1.0);
    domain_.xi_sigma = bisect([&](double x) { return q_at(x); }, model_.c_u);
    domain_.xi_sup = std::min(domain_.xi_m, domain_.xi_sigma);
}

double CenteredTheoryEngine::theta_at(double xi) const {
    const Eigen::ArrayXd resolvent = 1.0 - xi * delta_.array();
    return model_.rho1 * model_.rho2 * xi * (w_.array().square() / resolvent).sum();
}

double CenteredTheoryEngine::q_at(double xi) const {
    const Eigen::ArrayXd frac = delta_.array() / (1.0 - xi * delta_.array());
    return xi * xi * frac.square().sum() / double(model_.p);
}

ThetaQS CenteredTheoryEngine::theta_q_s(double xi) const {
    if (!(xi > 0.0) || !(xi < xi_max_))
        throw std::invalid_argument("theta_q_s: xi must lie in (0, 1/lambda_max(Sigma_bar))");
    const double rr = model_.rho1 * model_.rho2;
    const Eigen::ArrayXd resolvent = 1.0 - xi * delta_.array();
    ThetaQS out;
    out.theta = rr * xi * (w_.array().square() / resolvent).sum();
    out.q = q_at(xi);
    out.s = rr * xi * xi * (delta_.array() * w_.array().square() / resolvent.square()).sum();
    if (homoscedastic_) {
        out.s1 = out.s2 = out.s;
    } else {
        const Eigen::VectorXd y = (w_.array() / resolvent).matrix();
        out.s1 = rr * xi * xi * y.dot(B1_ * y);
        out.s2 = rr * xi * xi * y.dot(B2_ * y);
    }
    return out;
}

XiState CenteredTheoryEngine::at_xi(double xi) const {
    if (!(xi > 0.0) || !(xi < domain_.xi_sup))
        throw std::invalid_argument("centered theory: xi = " + std::to_string(xi) +
                                    " outside the validity domain (0, " +
                                    std::to_string(domain_.xi_sup) + ")");
    const ThetaQS t = theta_q_s(xi);
    const double rr = model_.rho1 * model_.rho2;
    const double cl = model_.c_l, cu = model_.c_u;

    XiState st;
    st.xi = xi;
    st.theta = t.theta;
    st.q = t.q;
    st.s = t.s;
    st.s1 = t.s1;
    st.s2 = t.s2;
    st.xi_m = domain_.xi_m;
    st.xi_sigma = domain_.xi_sigma;
    st.xi_sup = domain_.xi_sup;

    st.m = 2.0 * cl * t.theta / (cu * (1.0 - t.theta));
    const double lin = 2.0 * cl + st.m * cu;
    const double quad = 4.0 * cl + st.m * st.m * cu;
    st.sigma_sq = (rr * lin * lin * t.s + rr * quad * t.q) / (cu * (cu - t.q));
    // per-class variances; the aggregate sigma^2 enters un-weighted by
    // rho1 rho2 (the weighted average of these recovers sigma^2 exactly)
    const auto per_class = [&](double sk) {
        return (rr * (lin * lin * sk + quad * t.q) + st.sigma_sq * cu * t.q) / (cu * cu);
    };
    st.sigma1_sq = per_class(t.s1);
    st.sigma2_sq = per_class(t.s2);
    st.e = std::sqrt(rr * st.m * st.m + st.sigma_sq);
    return st;
}

double CenteredTheoryEngine::xi_for_e(double e) const {
    if (!(e > 0.0)) throw std::invalid_argument("xi_for_e: need e > 0");
    const double target = e * e;
    const double hi_cap = domain_.xi_sup * (1.0 - 1e-15);
    const auto value = [&](double xi) {
        const XiState st = at_xi(xi);
        return model_.rho1 * model_.rho2 * st.m * st.m + st.sigma_sq;
    };
    double lo = 0.0, hi = hi_cap;
    double mid = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        if (value(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-16 * hi) break;
    }
    const double xi = 0.5 * (lo + hi);
    const double resid = std::abs(value(xi) - target);
    if (resid > 1e-10 * target && resid > 1e-12)
        throw std::runtime_error("xi_for_e: bisection left residual " + std::to_string(resid) +
                                 " after 200 steps at e = " + std::to_string(e));
    return xi;
}

double CenteredTheoryEngine::theta_sup() const {
    return theta_at(domain_.xi_sup * (1.0 - 1e-12));
}

double CenteredTheoryEngine::xi_for_theta(double theta) const {
    if (!(theta > 0.0) || !(theta < 1.0))
        throw std::invalid_argument("xi_for_theta: theta must lie in (0, 1)");
    double lo = 0.0, hi = domain_.xi_m * (1.0 - 1e-15);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (theta_at(mid) < theta ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

AsymptoticPrediction CenteredTheoryEngine::predict_at_xi(double xi) const {
    const XiState st = at_xi(xi);
    AsymptoticPrediction out;
    out.theta = st.theta;
    out.xi = xi;
    out.e = st.e;
    out.mean1 = -(1.0 - model_.rho1) * st.m;
    out.mean2 = (1.0 - model_.rho2) * st.m;
    out.sigma1 = std::sqrt(st.sigma1_sq);
    out.sigma2 = std::sqrt(st.sigma2_sq);
    out.accuracy = model_.rho1 * normal_cdf((1.0 - model_.rho1) * st.m / out.sigma1) +
                   model_.rho2 * normal_cdf((1.0 - model_.rho2) * st.m / out.sigma2);
    out.r = st.sigma_sq / (st.m * st.m);
    return out;
}

AsymptoticPrediction CenteredTheoryEngine::predict_e(double e) const {
    return predict_at_xi(xi_for_e(e));
}

AsymptoticPrediction CenteredTheoryEngine::predict_theta(double theta) const {
    if (theta == 0.0) {
        if (!has_laplacian_limit_)
            throw std::runtime_error(
                "predict_theta(0): the small-norm limit needs the kernel-based constructor");
        return laplacian_limit_;
    }
    return predict_at_xi(xi_for_theta(theta));
}

AsymptoticPrediction CenteredTheoryEngine::max_over_e(double* e_star) const {
    const double t_sup = theta_sup();
    const double xi_hi = domain_.xi_sup * (1.0 - 1e-12);

    // coarse unimodal scan over theta, then golden-section refinement in xi
    int best = -1;
    double best_acc = -1.0;
    const int grid = 199;
    std::vector<double> xis(grid);
    for (int i = 0; i < grid; ++i) {
        const double theta = t_sup * (i + 1) / double(grid + 1);
        xis[i] = xi_for_theta(theta);
        const double acc = predict_at_xi(xis[i]).accuracy;
        if (acc > best_acc) {
            best_acc = acc;
            best = i;
        }
    }
    const double lo = best > 0 ? xis[best - 1] : xis[0] * 1e-3;
    const double hi = best + 1 < grid ? xis[best + 1] : xi_hi;
    const double xi_opt = golden_section_max(
        [&](double xi) { return predict_at_xi(xi).accuracy; }, lo, hi, 1e-12);
    AsymptoticPrediction out = predict_at_xi(xi_opt);
    if (e_star) *e_star = out.e;
    return out;
}

double CenteredTheoryEngine::condition_e() const {
    // matching condition m = m^2/(m^2 + sigma^2), i.e. sigma^2 = m - m^2;
    // the gap sigma^2 - m + m^2 is negative near xi = 0 and diverges at the
    // domain edge, with a single sign change.
    const auto gap = [&](double xi) {
        const XiState st = at_xi(xi);
        return st.sigma_sq - st.m + st.m * st.m;
    };
    double lo_xi = domain_.xi_sup * 1e-12;
    if (gap(lo_xi) >= 0.0)
        throw std::runtime_error("condition_e: no sign change on the domain");
    double lo = lo_xi, hi = domain_.xi_sup * (1.0 - 1e-15);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return at_xi(0.5 * (lo + hi)).e;
}

double CenteredTheoryEngine::spectral_limit_accuracy(double c_eff) const {
    // e -> infinity sends xi to xi_m; the per-class signal-to-noise ratio of
    // the scores converges to (1-rho_k)^2 / (rho1 rho2 (s_k + q(1+s)/(c-q)))
    // provided q(xi_m) < c, and degenerates to coin-flipping otherwise.
    const ThetaQS t = theta_q_s(domain_.xi_m);
    if (t.q >= c_eff) return 0.5;
    const double rr = model_.rho1 * model_.rho2;
    const auto acc_k = [&](double rho_k, double s_k) {
        const double bracket = s_k + t.q * (1.0 + t.s) / (c_eff - t.q);
        return normal_cdf((1.0 - rho_k) / std::sqrt(rr * bracket));
    };
    return model_.rho1 * acc_k(model_.rho1, t.s1) + model_.rho2 * acc_k(model_.rho2, t.s2);
}

ThetaQS theta_q_s(double xi, const LiftedStatistics& lifted, const MixtureModel& model) {
    return CenteredTheoryEngine(lifted, model).theta_q_s(xi);
}

XiDomain xi_domain(const LiftedStatistics& lifted, const MixtureModel& model) {
    return CenteredTheoryEngine(lifted, model).domain();
}

XiState centered_theory_at_xi(double xi, const LiftedStatistics& lifted,
                              const MixtureModel& model) {
    return CenteredTheoryEngine(lifted, model).at_xi(xi);
}

double solve_xi_for_e(double e, const LiftedStatistics& lifted, const MixtureModel& model) {
    return CenteredTheoryEngine(lifted, model).xi_for_e(e);
}

AsymptoticPrediction centered_theory(double e, const MixtureModel& model,
                                     const KernelFunction& kernel) {
    return CenteredTheoryEngine(model, kernel).predict_e(e);
}

AsymptoticPrediction centered_theory_max_e(const MixtureModel& model,
                                           const KernelFunction& kernel, double* e_star) {
    return CenteredTheoryEngine(model, kernel).max_over_e(e_star);
}

AsymptoticPrediction centered_theory_at_theta(double theta, const MixtureModel& model,
                                              const KernelFunction& kernel) {
    return CenteredTheoryEngine(model, kernel).predict_theta(theta);
}

double spectral_limit_theory(const MixtureModel& model, const KernelFunction& kernel,
                             double c_eff) {
    return CenteredTheoryEngine(model, kernel).spectral_limit_accuracy(c_eff);
}

AsymptoticPrediction laplacian_theory(const MixtureModel& model, const KernelFunction& kernel) {
    model.validate();
    const double tau = model.tau();
    const double h = kernel.h(tau);
    if (std::abs(h) < 1e-300)
        throw std::invalid_argument("laplacian theory: h(tau) = 0 at tau = " +
                                    std::to_string(tau));
    const double hp = kernel.hp(tau);
    const double hpp = kernel.hpp(tau);
    const int p = model.p;

    const Eigen::VectorXd dmu = model.mu1 - model.mu2;
    const double tr_gap = (model.C1.trace() - model.C2.trace());
    const double curv = hpp / h - (hp * hp) / (h * h);
    const double m_hat = -2.0 * hp / h * dmu.squaredNorm() + curv * tr_gap * tr_gap / double(p);

    const auto var_k = [&](const Eigen::MatrixXd& Ck) {
        const double cross =
            (model.C1 * Ck).trace() / model.rho1 + (model.C2 * Ck).trace() / model.rho2;
        const double first =
            4.0 * hp * hp / (h * h) * (dmu.dot(Ck * dmu) + cross / (model.c_l * double(p)));
        const double second =
            curv * curv * 2.0 * (Ck * Ck).trace() * tr_gap * tr_gap / (double(p) * double(p));
        return first + second;
    };

    AsymptoticPrediction out;
    out.mean1 = -(1.0 - model.rho1) * m_hat;
    out.mean2 = (1.0 - model.rho2) * m_hat;
    out.sigma1 = std::sqrt(var_k(model.C1));
    out.sigma2 = std::sqrt(var_k(model.C2));
    out.accuracy =
        model.rho1 * normal_cdf(std::sqrt(out.mean1 * out.mean1 / (out.sigma1 * out.sigma1))) +
        model.rho2 * normal_cdf(std::sqrt(out.mean2 * out.mean2 / (out.sigma2 * out.sigma2)));
    out.r = model.homoscedastic(1e-12) && m_hat != 0.0
                ? out.sigma1 * out.sigma1 / (m_hat * m_hat)
                : std::numeric_limits<double>::quiet_NaN();
    out.theta = 0.0;
    out.xi = 0.0;
    out.e = 0.0;
    return out;
}

double r_ctr_consistency_check(double e, const MixtureModel& model,
                               const KernelFunction& kernel) {
    if (!model.homoscedastic(1e-12))
        throw std::invalid_argument("consistency identity stated for homoscedastic models");
    CenteredTheoryEngine engine(model, kernel);
    const XiState st = engine.at_xi(engine.xi_for_e(e));
    const double rr = model.rho1 * model.rho2;
    const double r_over = st.sigma_sq / (st.m * st.m) / rr;
    const double th2 = st.theta * st.theta;
    const double rhs = st.s / th2 + (st.q / th2) * (th2 * (1.0 + r_over) / model.c_u +
                                                    (1.0 - st.theta) * (1.0 - st.theta) /
                                                        model.c_l);
    return std::abs(r_over - rhs);
}

double r_lap(const MixtureModel& model) {
    if (!model.homoscedastic(1e-12))
        throw std::invalid_argument("r_lap requires C1 = C2");
    const Eigen::VectorXd dmu = model.mu1 - model.mu2;
    const double d4 = dmu.squaredNorm() * dmu.squaredNorm();
    if (d4 == 0.0) throw std::invalid_argument("r_lap: identical class means");
    const double tr_c2 = (model.C1 * model.C1).trace();
    return dmu.dot(model.C1 * dmu) / d4 +
           tr_c2 / (double(model.p) * d4 * model.rho1 * model.rho2 * model.c_l);
}

IsotropicFixedPoint bayes_optimal_isotropic(double mu_norm_sq, double c_l, double c_u) {
    if (!(mu_norm_sq > 0.0)) throw std::invalid_argument("need ||mu||^2 > 0");
    const double M = mu_norm_sq;
    return damped_fixed_point(M, [&](double q) {
        return M - M / (1.0 + M * (c_l + expected_tanh(q) * c_u));
    });
}

IsotropicFixedPoint centered_isotropic(double mu_norm_sq, double c_l, double c_u) {
    if (!(mu_norm_sq > 0.0)) throw std::invalid_argument("need ||mu||^2 > 0");
    const double M = mu_norm_sq;
    return damped_fixed_point(M, [&](double q) {
        return M - M / (1.0 + M * (c_l + q / (q + 1.0) * c_u));
    });
}

double g_of_q(double q) {
    if (!(q > 0.0)) throw std::invalid_argument("g_of_q: need q > 0");
    return expected_tanh(q) * (q + 1.0) / q;
}

}  // namespace gssl
