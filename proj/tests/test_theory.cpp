#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "gssl/model.hpp"
#include "gssl/presets.hpp"
#include "gssl/theory.hpp"

using namespace gssl;

namespace {

MixtureModel identity_model(double c_l, double c_u, double mu_entry = 1.0, int p = 100) {
    return opposite_means_model(p, mu_entry, Eigen::MatrixXd::Identity(p, p), c_l, c_u);
}

MixtureModel toeplitz_model(double c_l, double c_u, int p = 100) {
    return opposite_means_model(p, 1.0, toeplitz_covariance(p, 0.1), c_l, c_u);
}

const KernelFunction kGauss = KernelFunction::gaussian();

}  // namespace

TEST_CASE("normal CDF and tail function") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5, 6.0})
        CHECK(std::abs(normal_cdf(x) + normal_q(x) - 1.0) <= 1e-14);
    CHECK(normal_cdf(-40.0) >= 0.0);
    CHECK(normal_cdf(40.0) <= 1.0);
}

TEST_CASE("lifted statistics carry the kernel derivatives as specified") {
    MixtureModel m = toeplitz_model(2.0, 4.0);
    LiftedStatistics lift = lift_statistics(m, kGauss);
    const int p = m.p;
    const double tau = m.tau();
    const double hp = kGauss.d1(tau), hpp = kGauss.d2(tau);

    REQUIRE(lift.nu1.size() == p + 1);
    CHECK((lift.nu1.head(p) - std::sqrt(-2.0 * hp) * m.mu1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(lift.nu1(p) - std::sqrt(hpp) * m.C1.trace() / std::sqrt(p)) <= 1e-12);
    CHECK((lift.Sigma1.topLeftCorner(p, p) + 2.0 * hp * m.C1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(lift.Sigma1(p, p) - 2.0 * hpp * (m.C1 * m.C1).trace() / p) <= 1e-10);
    CHECK(lift.Sigma1.topRightCorner(p, 1).cwiseAbs().maxCoeff() == 0.0);
    CHECK((lift.Sigma_bar - 0.5 * (lift.Sigma1 + lift.Sigma2)).cwiseAbs().maxCoeff() <= 1e-12);

    // Positive semidefinite by construction here; a similarity whose slope
    // increases with distance violates the applicability conditions.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lift.Sigma1, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);

    KernelFunction bad;
    bad.name = "increasing";
    bad.eval = [](double t) { return t; };
    bad.d1 = [](double) { return 1.0; };
    bad.d2 = [](double) { return 0.0; };
    CHECK_THROWS_AS((void)lift_statistics(m, bad), std::exception);
}

TEST_CASE("vanishing-norm predictor: value and unlabeled-ratio invariance") {
    // Identity covariance, |mean gap|^2 = 4, half/half priors, c_l = 2:
    // accuracy has the closed form Phi(sqrt(2/3)).
    const double hand_value = 0.7928919108787374;
    CHECK(normal_cdf(std::sqrt(2.0 / 3.0)) == doctest::Approx(hand_value).epsilon(1e-15));

    double first = 0.0;
    for (double cu : {2.0, 4.0, 6.0, 8.0, 10.0}) {
        AsymptoticPrediction pred = laplacian_theory(identity_model(2.0, cu), kGauss);
        CHECK(std::abs(pred.accuracy - hand_value) <= 1e-9);
        if (cu == 2.0)
            first = pred.accuracy;
        else
            CHECK(std::abs(pred.accuracy - first) <= 1e-12);
    }

    // Toeplitz(0.1) covariance pin.
    CHECK(laplacian_theory(toeplitz_model(2.0, 10.0), kGauss).accuracy ==
          doctest::Approx(0.7921170048239593).epsilon(1e-10));

    // Small-norm inverse performance measure for the identity model:
    // dmu'C dmu/|dmu|^4 + tr(C^2)/(p |dmu|^4 rho1 rho2 c_l)
    // = 4/16 + 100/(100*16*0.25*2) = 0.25 + 0.125.
    CHECK(r_lap(identity_model(2.0, 10.0)) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("norm-tuned predictor reproduces the frozen accuracy curve") {
    const double expected[] = {0.80489779673110184, 0.81270928681081667, 0.81790747180316337,
                               0.82156404772563385, 0.82425820047410292};
    const double cu_grid[] = {2.0, 4.0, 6.0, 8.0, 10.0};
    for (int i = 0; i < 5; ++i) {
        AsymptoticPrediction pred = centered_theory_max_e(identity_model(2.0, cu_grid[i]), kGauss);
        CHECK(pred.accuracy == doctest::Approx(expected[i]).epsilon(1e-9));
        CHECK(pred.theta > 0.0);
        CHECK(pred.theta < 1.0);
    }

    // Toeplitz pin at c_u = 10.
    CHECK(centered_theory_max_e(toeplitz_model(2.0, 10.0), kGauss).accuracy ==
          doctest::Approx(0.82061116466907802).epsilon(1e-9));
}

TEST_CASE("optimal operating points of the labeled/unlabeled trade-off") {
    CenteredTheoryEngine low(toeplitz_model(1.0, 8.0), kGauss);
    double e1 = 0.0;
    AsymptoticPrediction p1 = low.max_over_e(&e1);
    CHECK(p1.accuracy == doctest::Approx(0.81255260835665144).epsilon(1e-9));
    CHECK(p1.theta == doctest::Approx(0.75357030341567077).epsilon(1e-6));
    CHECK(e1 == doctest::Approx(0.57591400457918618).epsilon(1e-6));

    CenteredTheoryEngine high(toeplitz_model(4.0, 8.0), kGauss);
    AsymptoticPrediction p2 = high.max_over_e();
    CHECK(p2.accuracy == doctest::Approx(0.82432393857257691).epsilon(1e-9));
    CHECK(p2.theta == doctest::Approx(0.44034523908856404).epsilon(1e-6));
}

TEST_CASE("clustering-limit accuracy values") {
    MixtureModel m2 = identity_model(2.0, 2.0);
    CHECK(spectral_limit_theory(m2, kGauss, m2.c0()) ==
          doctest::Approx(0.78010043256668005).epsilon(1e-9));
    CHECK(spectral_limit_theory(m2, kGauss, m2.c_u) ==
          doctest::Approx(0.71684731487115871).epsilon(1e-9));
    MixtureModel m10 = identity_model(2.0, 10.0);
    CHECK(spectral_limit_theory(m10, kGauss, m10.c0()) ==
          doctest::Approx(0.82097694408744881).epsilon(1e-9));
}

TEST_CASE("equal covariances collapse the two class variances") {
    AsymptoticPrediction pred = centered_theory(0.5, toeplitz_model(2.0, 4.0), kGauss);
    CHECK(std::abs(pred.sigma1 - pred.sigma2) <= 1e-10);

    // Distinct covariances must not.
    MixtureModel hetero = toeplitz_model(2.0, 4.0);
    hetero.C2 = Eigen::MatrixXd::Identity(hetero.p, hetero.p) * 1.5;
    AsymptoticPrediction hp = centered_theory(0.5, hetero, kGauss);
    CHECK(std::abs(hp.sigma1 - hp.sigma2) > 1e-6);
    CHECK(hp.accuracy > 0.5);
    CHECK(hp.accuracy < 1.0);
}

TEST_CASE("resolvent-parameter inversions round-trip") {
    MixtureModel m = identity_model(2.0, 4.0);
    CenteredTheoryEngine engine(m, kGauss);

    for (double e : {0.05, 0.2, 0.5, 0.8}) {
        double xi = engine.xi_for_e(e);
        CHECK(std::abs(engine.at_xi(xi).e - e) <= 1e-8 * e);
        // Free-function form factors the resolvent from scratch.
        double xi2 = solve_xi_for_e(e, engine.lifted(), m);
        CHECK(std::abs(xi2 - xi) <= 1e-10 * xi);
    }
    for (double theta : {0.05, 0.3, 0.6, 0.9}) {
        double xi = engine.xi_for_theta(theta);
        CHECK(std::abs(engine.at_xi(xi).theta - theta) <= 1e-8);
    }
    CHECK(engine.theta_sup() > 0.9);
    CHECK(engine.theta_sup() <= 1.0);

    // The norm profile is strictly increasing in xi (uniqueness of xi_e).
    double prev = 0.0;
    for (int i = 1; i <= 8; ++i) {
        double xi = engine.domain().xi_sup * i / 9.0;
        double e = engine.at_xi(xi).e;
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("self-consistency identity of the score statistics holds exactly") {
    for (const MixtureModel& m : {identity_model(2.0, 2.0), identity_model(2.0, 10.0),
                                  toeplitz_model(2.0, 10.0), toeplitz_model(1.0, 8.0)}) {
        for (double e : {0.1, 0.4, 0.7})
            CHECK(std::abs(r_ctr_consistency_check(e, m, kGauss)) <= 1e-8);
    }
}

TEST_CASE("more data never hurts the tuned predictor") {
    double prev = 0.0;
    for (double cu = 1.0; cu <= 10.0; cu += 1.0) {
        double acc = centered_theory_max_e(toeplitz_model(1.0, cu), kGauss).accuracy;
        CHECK(acc >= prev - 1e-12);
        prev = acc;
    }
    prev = 0.0;
    for (double cl : {0.5, 1.0, 2.0, 4.0}) {
        double acc = centered_theory_max_e(toeplitz_model(cl, 8.0), kGauss).accuracy;
        CHECK(acc >= prev - 1e-12);
        prev = acc;
    }
}

TEST_CASE("shrinking the norm recovers the vanishing-norm prediction") {
    for (const MixtureModel& m : {identity_model(2.0, 4.0), toeplitz_model(1.0, 8.0)}) {
        CenteredTheoryEngine engine(m, kGauss);
        double lap = laplacian_theory(m, kGauss).accuracy;
        CHECK(std::abs(engine.predict_e(1e-4).accuracy - lap) <= 1e-3);
        // theta = 0 is the exact limit by construction.
        CHECK(std::abs(engine.predict_theta(0.0).accuracy - lap) <= 1e-12);
    }
}

TEST_CASE("isotropic fixed points: frozen values and tolerance bands") {
    struct Row {
        double M, bayes, centered;
    };
    const Row rows[] = {
        {2.0, 0.91497386918810508, 0.91408344046311563},
        {4.0 / 3.0, 0.86302710044724418, 0.86166839847371168},
        {1.0, 0.82111612945571455, 0.8195411255481786},
    };
    for (const Row& r : rows) {
        IsotropicFixedPoint b = bayes_optimal_isotropic(r.M, 0.5, 10.0);
        IsotropicFixedPoint c = centered_isotropic(r.M, 0.5, 10.0);
        CHECK(b.accuracy == doctest::Approx(r.bayes).epsilon(1e-9));
        CHECK(c.accuracy == doctest::Approx(r.centered).epsilon(1e-9));
        CHECK(b.accuracy >= c.accuracy);
        CHECK(b.q > 0.0);
        CHECK(b.iterations > 0);
        CHECK(normal_cdf(std::sqrt(b.q)) == doctest::Approx(b.accuracy).epsilon(1e-12));
    }
}

TEST_CASE("ordering: best achievable >= tuned similarity >= vanishing-norm") {
    for (double M : {2.0, 1.0}) {
        for (double cu : {2.0, 6.0, 10.0}) {
            double bayes = bayes_optimal_isotropic(M, 0.5, cu).accuracy;
            double ctr = centered_isotropic(M, 0.5, cu).accuracy;
            MixtureModel m = identity_model(0.5, cu, std::sqrt(M));
            double lap = laplacian_theory(m, kGauss).accuracy;
            CHECK(bayes >= ctr - 1e-12);
            CHECK(ctr >= lap - 1e-9);
        }
    }
}

TEST_CASE("the scalar fixed point agrees with the matrix-route predictor") {
    // Same limit computed along two fully independent routes: the isotropic
    // scalar recursion vs. the resolvent-based engine maximized over e.
    for (double M : {2.0, 4.0 / 3.0, 1.0}) {
        double scalar = centered_isotropic(M, 0.5, 10.0).accuracy;
        MixtureModel m = identity_model(0.5, 10.0, std::sqrt(M));
        double matrix = centered_theory_max_e(m, kGauss).accuracy;
        CHECK(std::abs(scalar - matrix) <= 1e-3);
    }
}

TEST_CASE("unlabeled-data efficiency ratio") {
    CHECK(g_of_q(0.2) == doctest::Approx(1.0145640868166348).epsilon(1e-9));
    CHECK(g_of_q(3.0) == doctest::Approx(1.167575537956498).epsilon(1e-9));
    CHECK(std::abs(g_of_q(3.0) - 1.168) <= 0.003);
    CHECK(g_of_q(1e-4) >= 0.99);
    CHECK(g_of_q(1e-4) <= 1.01);
    // Unimodal-looking profile: rises from 1, peaks near q ~ 3.
    CHECK(g_of_q(3.0) > g_of_q(0.5));
    CHECK(g_of_q(3.0) > g_of_q(30.0));
}

TEST_CASE("matching-condition norm level") {
    CenteredTheoryEngine engine(identity_model(0.5, 10.0), kGauss);
    double e = engine.condition_e();
    CHECK(e == doctest::Approx(0.57049306955722157).epsilon(1e-8));
    CHECK(engine.predict_e(e).accuracy == doctest::Approx(0.81926319383516844).epsilon(1e-8));
    // Close to, and never above, the tuned optimum.
    double best = engine.max_over_e().accuracy;
    CHECK(engine.predict_e(e).accuracy <= best + 1e-12);
    CHECK(best - engine.predict_e(e).accuracy <= 1e-3);
}

TEST_CASE("engine and free-function forms agree") {
    MixtureModel m = toeplitz_model(2.0, 6.0);
    CenteredTheoryEngine engine(m, kGauss);
    for (double e : {0.2, 0.6}) {
        AsymptoticPrediction a = engine.predict_e(e);
        AsymptoticPrediction b = centered_theory(e, m, kGauss);
        CHECK(std::abs(a.accuracy - b.accuracy) <= 1e-12);
        CHECK(std::abs(a.xi - b.xi) <= 1e-10);
    }
    AsymptoticPrediction t1 = engine.predict_theta(0.5);
    AsymptoticPrediction t2 = centered_theory_at_theta(0.5, m, kGauss);
    CHECK(std::abs(t1.accuracy - t2.accuracy) <= 1e-12);
}
