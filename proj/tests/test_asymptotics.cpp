/*
   Copyright 2026 The sslr Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include "catch_amalgamated.hpp"
#include "fixtures.hpp"

#include <sslr/asymptotics.hpp>
#include <sslr/error.hpp>
#include <sslr/special_functions.hpp>

#include <cmath>

using Catch::Approx;
using fixture::vec;
using sslr::GaussianDesignModel;
using Eigen::MatrixXd;

namespace {

GaussianDesignModel unit_model(double mu, double beta = 1.0) {
    GaussianDesignModel g;
    g.beta0 = vec({beta});
    g.mu_x = vec({mu});
    g.sigma_x = MatrixXd::Identity(1, 1);
    g.sigma_eps = 1.0;
    return g;
}

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

GaussianDesignModel random_model(sslr::Rng& rng, int p, bool centered) {
    GaussianDesignModel g;
    g.beta0 = Eigen::VectorXd::NullaryExpr(p, [&] { return rng.uniform(-2, 2); });
    g.mu_x = Eigen::VectorXd::Zero(p);
    if (!centered) g.mu_x = Eigen::VectorXd::NullaryExpr(p, [&] { return rng.uniform(-1.5, 1.5); });
    MatrixXd a = MatrixXd::NullaryExpr(p, p, [&] { return rng.normal(); });
    g.sigma_x = a * a.transpose() / p + 0.5 * MatrixXd::Identity(p, p);
    g.sigma_eps = rng.uniform(0.5, 2.0);
    return g;
}

sslr::ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const sslr::Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return sslr::ErrorCode::InvalidArgument;
}

double min_eigen(const MatrixXd& m) { return Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues()(0); }

} // namespace

TEST_CASE("Fisher-type matrix", "[asymptotics]") {
    const auto noise = sslr::NoiseDensity::gaussian(1.0);
    CHECK(sslr::sigma2(noise, scalar(1.0))(0, 0) == Approx(1.0).epsilon(1e-14));
    CHECK(sslr::sigma2(noise, scalar(2.0))(0, 0) == Approx(2.0).epsilon(1e-14));
    CHECK(sslr::sigma2(noise, MatrixXd::Zero(2, 2)).isZero(0.0));
    CHECK(sslr::sigma2(sslr::NoiseDensity::gaussian(2.0), scalar(1.0))(0, 0) == Approx(0.25).epsilon(1e-14));
}

TEST_CASE("closed-form gamma matrices", "[asymptotics][gamma]") {
    const auto g0 = sslr::gammas_gaussian(unit_model(0.0));
    CHECK(g0.gamma1(0, 0) == Approx(0.5).epsilon(1e-14));
    CHECK(g0.gamma2(0, 0) == Approx(0.125).epsilon(1e-14));
    const auto g1 = sslr::gammas_gaussian(unit_model(1.0));
    CHECK(g1.gamma1(0, 0) == Approx(1.0).epsilon(1e-14));
    CHECK(g1.gamma2(0, 0) == Approx(0.375).epsilon(1e-14));

    GaussianDesignModel zero = unit_model(0.0, 0.0);
    zero.beta0 = Eigen::VectorXd::Zero(3);
    zero.mu_x = Eigen::VectorXd::Zero(3);
    zero.sigma_x = MatrixXd::Identity(3, 3);
    const auto gz = sslr::gammas_gaussian(zero);
    CHECK(gz.gamma1.isZero(0.0));
    CHECK(gz.gamma2.isZero(0.0));

    GaussianDesignModel laplace = unit_model(0.0);
    laplace.alpha = 1;
    CHECK(code_of([&] { (void)sslr::gammas_gaussian(laplace); }) == sslr::ErrorCode::Unsupported);
}

TEST_CASE("closed forms have rank at most two", "[asymptotics][gamma]") {
    sslr::Rng rng(5);
    const auto g = sslr::gammas_gaussian(random_model(rng, 4, false));
    for (const MatrixXd* m : {&g.gamma1, &g.gamma2}) {
        const auto ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(*m).eigenvalues();
        CHECK(std::abs(ev(0)) < 1e-12 * ev(3));
        CHECK(std::abs(ev(1)) < 1e-12 * ev(3));
        CHECK(ev(0) >= -1e-10);
    }
}

TEST_CASE("quadrature matches the closed form", "[asymptotics][gamma]") {
    const auto closed = sslr::gammas_gaussian(unit_model(0.0));
    const auto quad = sslr::gammas_numeric(unit_model(0.0));
    CHECK(std::abs(quad.gamma1(0, 0) - 0.5) < 1e-3);
    CHECK(std::abs(quad.gamma2(0, 0) - 0.125) < 1e-3);

    sslr::Rng rng(9);
    const auto model = random_model(rng, 2, false);
    const auto c2 = sslr::gammas_gaussian(model);
    const auto q2 = sslr::gammas_numeric(model);
    CHECK((c2.gamma1 - q2.gamma1).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((c2.gamma2 - q2.gamma2).cwiseAbs().maxCoeff() < 1e-3);
    (void)closed;
}

TEST_CASE("quadrature matrices are symmetric and PSD", "[asymptotics][gamma]") {
    sslr::UniformDesignModel u;
    u.beta0 = vec({1.0, -0.5});
    u.lower = vec({-1.0, 0.0});
    u.upper = vec({2.0, 1.0});
    u.sigma_eps = 0.9;
    u.alpha = 3;
    const auto g = sslr::gammas_numeric(u);
    for (const MatrixXd* m : {&g.gamma1, &g.gamma2}) {
        CHECK((*m - m->transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(min_eigen(*m) >= -1e-8);
    }
}

TEST_CASE("uniform influence variance against Monte Carlo", "[asymptotics][gamma]") {
    sslr::UniformDesignModel u;
    u.beta0 = vec({1.0});
    u.lower = vec({-std::sqrt(3.0)});
    u.upper = vec({std::sqrt(3.0)});
    u.sigma_eps = 1.0;
    const auto g = sslr::gammas_numeric(u);
    const sslr::InfluenceFunction psi(u);
    std::mt19937_64 engine(17);
    std::uniform_real_distribution<double> draw(-std::sqrt(3.0), std::sqrt(3.0));
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = psi(vec({draw(engine)}))(0);
        s1 += v * v;
        s2 += v * v * v * v;
    }
    const double mean = s1 / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(g.gamma2(0, 0) - mean) < 3.0 * se);
}

TEST_CASE("doubling the quadrature budget changes little", "[asymptotics][gamma]") {
    sslr::QuadratureBudget budget;
    const auto a = sslr::gammas_numeric(unit_model(0.5), budget);
    const auto b = sslr::gammas_numeric(unit_model(0.5), budget.doubled());
    CHECK((a.gamma1 - b.gamma1).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a.gamma2 - b.gamma2).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("sandwich covariance", "[asymptotics][sigma]") {
    const auto cov = sslr::covariances_gaussian(unit_model(0.0), 0.2);
    CHECK(cov.sigma_ssl_tilde(0, 0) == Approx(4.125 / (3.5 * 3.5)).epsilon(1e-12));
    CHECK(std::abs(cov.sigma_ssl_tilde(0, 0) - 0.33673) < 1e-5);
    CHECK((cov.sigma_ssl_tilde - (0.2 / 1.2) * cov.sigma_ssl).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((cov.sigma_mmle * cov.sigma2 - MatrixXd::Identity(1, 1)).cwiseAbs().maxCoeff() < 1e-10);

    const auto none = sslr::sigma_ssl(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2), 2.0 * MatrixXd::Identity(2, 2), 0.3);
    CHECK((none.sigma_ssl_tilde - none.sigma_mmle).cwiseAbs().maxCoeff() < 1e-12);

    const MatrixXd g1 = scalar(0.5), g2 = scalar(0.125), s2 = scalar(1.0);
    const double near = sslr::sigma_ssl(g1, g2, s2, 0.999).sigma_ssl_tilde(0, 0);
    const double nearer = sslr::sigma_ssl(g1, g2, s2, 1.0 - 1e-6).sigma_ssl_tilde(0, 0);
    CHECK(std::abs(near - nearer) < 1e-3);

    CHECK(code_of([] { (void)sslr::sigma_ssl(scalar(0.0), scalar(0.0), scalar(0.0), 0.2); }) ==
          sslr::ErrorCode::NotPositiveDefinite);
}

TEST_CASE("covariance invariants on random models", "[asymptotics][sigma]") {
    sslr::Rng rng(31);
    for (int k = 0; k < 10; ++k) {
        const auto model = random_model(rng, 1 + k % 3, k % 2 == 0);
        const auto cov = sslr::covariances_gaussian(model, 0.1 + 0.05 * k);
        const auto p = model.beta0.size();
        CHECK((cov.sigma_mmle * cov.sigma2 - MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(min_eigen(cov.gamma1) >= -1e-10);
        CHECK(min_eigen(cov.gamma2) >= -1e-10);
        CHECK(min_eigen(cov.sigma_ssl) > 0.0);
    }
}

TEST_CASE("gain examples", "[asymptotics][gain]") {
    const auto centered = sslr::gain_closed_form(unit_model(0.0), 0.2);
    CHECK(centered.gain == Approx(3.5 / std::sqrt(4.125)).epsilon(1e-12));
    CHECK(std::abs(centered.gain - 1.72328) < 1e-5);
    CHECK(centered.centered);
    CHECK(centered.eta == Approx(1.0));
    CHECK(std::isinf(centered.rho));

    const auto shifted = sslr::gain_closed_form(unit_model(1.0), 0.2);
    CHECK(shifted.gain == Approx(3.5 / std::sqrt(4.4375)).epsilon(1e-12));
    CHECK(std::abs(shifted.gain - 1.66149) < 1e-5);
    CHECK(shifted.zeta == Approx(1.0));
    CHECK(shifted.rho == Approx(1.0));

    CHECK(sslr::gain_closed_form(unit_model(0.0, 0.0), 0.2).gain == 1.0);

    for (const auto& model : {unit_model(0.0), unit_model(1.0)}) {
        const double matrix = sslr::gain_generic(sslr::covariances_gaussian(model, 0.2)).gain;
        CHECK(std::abs(matrix - sslr::gain_closed_form(model, 0.2).gain) < 1e-9);
    }
}

TEST_CASE("matrix path identities", "[asymptotics][gain]") {
    sslr::AsymptoticCovariances same;
    same.sigma_mmle = MatrixXd::Identity(2, 2) * 3.0;
    same.sigma_ssl_tilde = same.sigma_mmle;
    CHECK(sslr::gain_generic(same).gain == Approx(1.0).epsilon(1e-14));

    auto cov = sslr::covariances_gaussian(unit_model(0.7, 1.3), 0.4);
    const double g = sslr::gain_generic(cov).gain;
    cov.sigma_mmle *= 7.5;
    cov.sigma_ssl_tilde *= 7.5;
    CHECK(sslr::gain_generic(cov).gain == Approx(g).epsilon(1e-12));
}

TEST_CASE("formula and matrix paths agree on random models", "[asymptotics][gain]") {
    sslr::Rng rng(2020);
    for (int k = 0; k < 20; ++k) {
        const auto model = random_model(rng, 1 + k % 3, k % 4 == 0);
        for (double lambda : {0.1, 0.2, 0.6}) {
            const double closed = sslr::gain_closed_form(model, lambda).gain;
            const double matrix = sslr::gain_generic(sslr::covariances_gaussian(model, lambda)).gain;
            CHECK(std::abs(closed - matrix) < 1e-8);
        }
    }
}

TEST_CASE("gain limits", "[asymptotics][gain]") {
    CHECK(std::abs(sslr::gain_centered(1e6, 0.2) - 1.0) < 1e-4);
    CHECK(std::abs(sslr::gain_general(1e6, 0.5, 2.0, 0.2) - 1.0) < 1e-4);

    GaussianDesignModel model = unit_model(0.0, 0.0);
    model.beta0 = Eigen::VectorXd::Zero(2);
    model.mu_x = vec({1.0, -0.5});
    model.sigma_x = MatrixXd::Identity(2, 2);
    model.sigma_x(0, 1) = model.sigma_x(1, 0) = 0.2;
    const double rho = 1.0 / model.mu_x.dot(model.sigma_x.ldlt().solve(model.mu_x));
    for (double lambda : {0.1, 0.5}) {
        const double want = std::sqrt(1.0 + (1.0 / lambda) / (1.0 + rho));
        CHECK(std::abs(sslr::gain_closed_form(model, lambda).gain - want) < 1e-8);
        CHECK(std::abs(sslr::gain_generic(sslr::covariances_gaussian(model, lambda)).gain - want) < 1e-8);
    }
}

TEST_CASE("gain falls as the mean aligns with the coefficients", "[asymptotics][gain]") {
    double prev = std::numeric_limits<double>::infinity();
    for (double zeta : {0.0, 0.3, 0.6, 0.9}) {
        const double g = sslr::gain_general(1.0, zeta, 1.0, 0.01);
        CHECK(g < prev);
        prev = g;
        CHECK(sslr::gain_general(1.0, -zeta, 1.0, 0.01) == Approx(g).epsilon(1e-14));
    }
}

TEST_CASE("unimodality analysis", "[asymptotics][unimodal]") {
    const double roots[] = {0.6965197603117099, 0.6887661947222169, 0.671413313859597};
    const double lambdas[] = {0.1, 0.2, 0.6};
    for (int i = 0; i < 3; ++i) {
        const auto rep = sslr::gain_analysis(lambdas[i]);
        CHECK(std::abs(rep.eta_root - roots[i]) < 1e-10);
        CHECK(std::abs(sslr::unimodality_polynomial(rep.eta_root, lambdas[i])) < 1e-10);
        CHECK(rep.sign_pattern_ok);
        CHECK(rep.sign_violations == 0);
        CHECK(rep.samples >= 200);
        const double argmax = oracle::scan_maximize([&](double e) { return sslr::gain_centered(e, lambdas[i]); }, 0.01, 5.0);
        CHECK(std::abs(argmax - rep.eta_root) < 1e-6);
        CHECK(rep.gain_at_root == Approx(sslr::gain_centered(rep.eta_root, lambdas[i])).epsilon(1e-14));
    }
    const auto rep = sslr::gain_analysis(0.2);
    CHECK(std::abs(rep.small_lambda_eta_star - 1.0 / std::sqrt(2.0)) < 1e-6);
    CHECK(std::abs(rep.small_lambda_coefficient - 0.643) < 1e-3);
    CHECK(sslr::gain_centered(1.0, 0.2) > sslr::gain_centered(1.0, 0.6));
    // The small-lambda form approximates the exact gain as lambda shrinks.
    CHECK(sslr::small_lambda_gain_centered(1.0, 1e-4) / sslr::gain_centered(1.0, 1e-4) == Approx(1.0).epsilon(1e-2));
    CHECK(sslr::small_lambda_gain_general(1.0, 0.3, 1.0, 1e-4) / sslr::gain_general(1.0, 0.3, 1.0, 1e-4) ==
          Approx(1.0).epsilon(1e-2));
}

TEST_CASE("confidence ellipsoids", "[asymptotics][region]") {
    const auto unit = sslr::confidence_region(vec({0.0, 0.0}), MatrixXd::Identity(2, 2), 0.95, 1.0);
    CHECK(unit.volume == Approx(M_PI * unit.quantile).epsilon(1e-12));
    CHECK(unit.quantile == Approx(-2.0 * std::log(0.05)).epsilon(1e-12));
    const auto one = sslr::confidence_region(vec({1.0}), scalar(4.0), 0.95, 100.0);
    CHECK(std::abs(one.quantile - 3.841459) < 1e-5);
    CHECK(one.semi_axes(0) == Approx(std::sqrt(4.0 * one.quantile / 100.0)).epsilon(1e-12));
    CHECK(one.contains(vec({1.0 + 0.99 * one.semi_axes(0)})));
    CHECK_FALSE(one.contains(vec({1.0 + 1.01 * one.semi_axes(0)})));

    MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK(code_of([&] { (void)sslr::confidence_region(vec({0.0, 0.0}), bad, 0.95, 10.0); }) ==
          sslr::ErrorCode::NotPositiveDefinite);
    CHECK_THROWS_AS(sslr::confidence_region(vec({0.0}), scalar(1.0), 1.0, 10.0), sslr::Error);

    sslr::Rng rng(8);
    for (int k = 0; k < 5; ++k) {
        const auto model = random_model(rng, 1 + k % 3, k % 2 == 0);
        const auto cov = sslr::covariances_gaussian(model, 0.3);
        const Eigen::VectorXd c = Eigen::VectorXd::Zero(model.beta0.size());
        const double ssl = sslr::confidence_region(c, cov.sigma_ssl_tilde, 0.95, 50).volume;
        const double ref = sslr::confidence_region(c, cov.sigma_mmle, 0.95, 50).volume;
        CHECK(std::abs(ssl / ref - 1.0 / sslr::gain_generic(cov).gain) < 1e-10);
    }
}

TEST_CASE("plug-in covariances approach the model values", "[asymptotics][plugin]") {
    fixture::Recipe r;
    r.m = 4000;
    r.n = 20000;
    r.beta0 = vec({1.0, -0.5});
    r.mu_x = 0.5;
    r.seed = 4;
    const auto s = fixture::make_sample(r);
    const auto plug = sslr::plugin_covariances(s, r.beta0, sslr::NoiseDensity::gaussian(1.0));
    GaussianDesignModel model;
    model.beta0 = r.beta0;
    model.mu_x = vec({0.5, 0.5});
    model.sigma_x = MatrixXd::Identity(2, 2);
    const auto exact = sslr::covariances_gaussian(model, 0.2);
    CHECK(plug.lambda == Approx(0.2));
    CHECK((plug.sigma_ssl_tilde - exact.sigma_ssl_tilde).cwiseAbs().maxCoeff() < 0.05);
}
