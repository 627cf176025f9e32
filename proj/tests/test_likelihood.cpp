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

#include <sslr/error.hpp>
#include <sslr/likelihood.hpp>
#include <sslr/models.hpp>

#include <cmath>
#include <vector>

using Catch::Approx;
using sslr::LikelihoodContext;
using sslr::NoiseDensity;
using fixture::vec;

namespace {

sslr::SemiSupervisedSample single_point(double x, double y, double ux, double uy) {
    return sslr::SemiSupervisedSample(Eigen::MatrixXd::Constant(1, 1, x), Eigen::VectorXd::Constant(1, y),
                                      Eigen::MatrixXd::Constant(1, 1, ux), Eigen::VectorXd::Constant(1, uy));
}

sslr::SemiSupervisedSample matched_only(const sslr::SemiSupervisedSample& s) {
    return sslr::SemiSupervisedSample(s.matched_x, s.matched_y, Eigen::MatrixXd(0, s.p()), Eigen::VectorXd(0));
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

} // namespace

TEST_CASE("hand-evaluated likelihood", "[likelihood]") {
    const LikelihoodContext ctx(single_point(1, 1, 1, 1), NoiseDensity(2, std::sqrt(2.0)));
    CHECK(sslr::loglik(ctx, vec({0.0})) == Approx(-1.418939).margin(1e-6));
    CHECK(ctx.weight() == Approx(0.5));
}

TEST_CASE("likelihood agrees with a naive double loop", "[likelihood]") {
    for (int alpha : {1, 2, 3}) {
        fixture::Recipe r;
        r.m = 15;
        r.n = 40;
        r.beta0 = vec({0.8, -1.2});
        r.alpha = alpha;
        r.seed = 30 + alpha;
        const auto s = fixture::make_sample(r);
        const auto noise = NoiseDensity::with_sd(alpha, 1.0);
        const LikelihoodContext ctx(s, noise);
        for (const auto& beta : {vec({0.8, -1.2}), vec({0.0, 0.0}), vec({2.0, 1.0})}) {
            const double want = oracle::naive_loglik(
                s.matched_x, s.matched_y, s.unmatched_x, s.unmatched_y,
                [&](double t) { return oracle::power_pdf(alpha, noise.d(), t); }, beta);
            CHECK(sslr::loglik(ctx, beta) == Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("log-sum-exp survives huge residuals", "[likelihood]") {
    const LikelihoodContext ctx(single_point(1, 1, 1, 1e4), NoiseDensity::gaussian(1.0));
    const double v = sslr::loglik(ctx, vec({0.0}));
    CHECK(std::isfinite(v));
    // log f(1e4) = log c - 0.5e8 for the unit normal.
    CHECK(v == Approx(0.5 * (2 * std::log(1 / std::sqrt(2 * M_PI)) - 0.5 - 0.5e8)).epsilon(1e-12));
}

TEST_CASE("degenerate weights", "[likelihood]") {
    fixture::Recipe r;
    r.beta0 = vec({1.0, 0.5});
    const auto s = fixture::make_sample(r);
    const sslr::SemiSupervisedSample unmatched_only(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), s.unmatched_x,
                                                    s.unmatched_y);
    const LikelihoodContext ctx(unmatched_only, NoiseDensity::gaussian(1.0));
    const Eigen::VectorXd beta = vec({0.3, 1.4});
    CHECK(ctx.weight() == 1.0);
    CHECK(sslr::loglik(ctx, beta) == Approx(sslr::unmatched_mean_term(ctx, beta)).epsilon(1e-14));
    CHECK(code_of([&] { (void)sslr::matched_mean_term(ctx, beta); }) == sslr::ErrorCode::InvalidArgument);
}

TEST_CASE("weight decomposition", "[likelihood]") {
    fixture::Recipe r;
    r.m = 37;
    r.n = 120;
    r.beta0 = vec({1.0, -1.0, 0.5});
    const auto s = fixture::make_sample(r);
    const LikelihoodContext ctx(s, NoiseDensity::with_sd(3, 1.2));
    const double w = ctx.weight();
    CHECK(w == Approx(120.0 / 157.0));
    for (const auto& beta : {vec({1.0, -1.0, 0.5}), vec({0.2, 0.2, 0.2})}) {
        const double parts = w * sslr::unmatched_mean_term(ctx, beta) + (1 - w) * sslr::matched_mean_term(ctx, beta);
        CHECK(std::abs(sslr::loglik(ctx, beta) - parts) < 1e-12);
    }
}

TEST_CASE("shape errors", "[likelihood]") {
    fixture::Recipe r;
    r.beta0 = vec({1.0, 0.5});
    auto s = fixture::make_sample(r);
    const LikelihoodContext ctx(s, NoiseDensity::gaussian(1.0));
    CHECK(code_of([&] { (void)sslr::loglik(ctx, vec({1.0})); }) == sslr::ErrorCode::Shape);
    s.unmatched_y.conservativeResize(s.unmatched_y.size() - 1);
    CHECK(code_of([&] { LikelihoodContext bad(s, NoiseDensity::gaussian(1.0)); }) == sslr::ErrorCode::Shape);
}

TEST_CASE("single Gaussian point score", "[likelihood][score]") {
    const double sigma = 0.7, x = 1.3, y = -0.4;
    const sslr::SemiSupervisedSample s(Eigen::MatrixXd::Constant(1, 1, x), Eigen::VectorXd::Constant(1, y),
                                       Eigen::MatrixXd(0, 1), Eigen::VectorXd(0));
    const LikelihoodContext ctx(s, NoiseDensity::gaussian(sigma));
    for (double beta : {-1.0, 0.0, 0.4, 2.0})
        CHECK(sslr::score(ctx, vec({beta}))(0) == Approx(x * (y - beta * x) / (sigma * sigma)).epsilon(1e-13));
}

TEST_CASE("score and Hessian match finite differences", "[likelihood][score]") {
    sslr::Rng rng(77);
    int instance = 0;
    for (int alpha : {2, 3})
        for (int p : {1, 3})
            for (int k = 0; k < 6; ++k, ++instance) {
                fixture::Recipe r;
                r.m = 20 + 10 * k;
                r.n = 30 + 15 * k;
                r.beta0 = Eigen::VectorXd::NullaryExpr(p, [&] { return rng.uniform(-2, 2); });
                r.alpha = alpha;
                r.noise_sd = rng.uniform(0.5, 2.0);
                r.seed = 1000 + instance;
                const auto s = fixture::make_sample(r);
                const LikelihoodContext ctx(s, NoiseDensity::with_sd(alpha, r.noise_sd));
                const Eigen::VectorXd beta =
                    r.beta0 + Eigen::VectorXd::NullaryExpr(p, [&] { return rng.uniform(-0.5, 0.5); });
                const auto f = [&](const Eigen::VectorXd& b) { return sslr::loglik(ctx, b); };
                const auto g = [&](const Eigen::VectorXd& b) { return sslr::score(ctx, b); };
                CHECK(oracle::relative_error(sslr::score(ctx, beta), oracle::gradient(f, beta)) < 1e-5);
                const Eigen::MatrixXd h = sslr::hessian(ctx, beta);
                CHECK((h - h.transpose()).norm() == 0.0);
                CHECK(oracle::relative_error(h, oracle::jacobian(g, beta)) < 1e-4);
                const auto all = sslr::evaluate(ctx, beta, sslr::Derivatives::Hessian);
                CHECK(all.value == Approx(f(beta)).epsilon(1e-14));
                CHECK((all.gradient - g(beta)).norm() < 1e-12 * (1 + all.gradient.norm()));
            }
}

TEST_CASE("mean score at the truth is near zero", "[likelihood][score]") {
    const int reps = 200;
    Eigen::MatrixXd scores(reps, 2);
    const Eigen::VectorXd beta0 = vec({1.0, -0.5});
    for (int rep = 0; rep < reps; ++rep) {
        fixture::Recipe r;
        r.m = 200;
        r.n = 200;
        r.beta0 = beta0;
        r.seed = 5000 + rep;
        const LikelihoodContext ctx(fixture::make_sample(r), NoiseDensity::gaussian(1.0));
        scores.row(rep) = sslr::score(ctx, beta0).transpose();
    }
    const Eigen::RowVectorXd mean = scores.colwise().mean();
    for (int j = 0; j < 2; ++j) {
        const double sd = std::sqrt((scores.col(j).array() - mean(j)).square().sum() / (reps - 1));
        CHECK(std::abs(mean(j)) < 3.0 * sd / std::sqrt(static_cast<double>(reps)));
    }
}

TEST_CASE("Hessian of the Gaussian matched likelihood", "[likelihood][hessian]") {
    fixture::Recipe r;
    r.m = 40;
    r.beta0 = vec({1.0, 2.0, -1.0});
    const auto s = matched_only(fixture::make_sample(r));
    const double sigma = 1.7;
    const LikelihoodContext ctx(s, NoiseDensity::gaussian(sigma));
    const Eigen::MatrixXd want = -(s.matched_x.transpose() * s.matched_x) / (sigma * sigma * 40.0);
    CHECK((sslr::hessian(ctx, vec({0.3, -2.0, 5.0})) - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Laplace derivatives are unsupported where they fail", "[likelihood][hessian]") {
    fixture::Recipe r;
    r.alpha = 1;
    const auto s = fixture::make_sample(r);
    const LikelihoodContext ctx(s, NoiseDensity::laplace(1.0));
    CHECK(code_of([&] { (void)sslr::hessian(ctx, vec({1.0})); }) == sslr::ErrorCode::Unsupported);
    // A residual of exactly zero in the matched part sits on the kink.
    const sslr::SemiSupervisedSample kink(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Constant(1, 2.0),
                                          Eigen::MatrixXd(0, 1), Eigen::VectorXd(0));
    const LikelihoodContext kctx(kink, NoiseDensity::laplace(1.0));
    CHECK(code_of([&] { (void)sslr::score(kctx, vec({2.0})); }) == sslr::ErrorCode::NonDifferentiable);
    CHECK(std::isfinite(sslr::loglik(kctx, vec({2.0}))));
}

TEST_CASE("intercept model", "[likelihood][intercept]") {
    fixture::Recipe r;
    r.beta0 = vec({1.0, -2.0});
    const auto s = fixture::make_sample(r);
    const auto noise = NoiseDensity::with_sd(3, 1.0);
    const LikelihoodContext ctx(s, noise);
    const Eigen::VectorXd beta = vec({0.9, -1.8});
    CHECK(sslr::loglik_intercept(ctx, 0.0, beta) == sslr::loglik(ctx, beta));

    const double c = 3.25;
    auto shifted = s;
    shifted.matched_y.array() += c;
    shifted.unmatched_y.array() += c;
    const LikelihoodContext sctx(shifted, noise);
    CHECK(sslr::loglik_intercept(sctx, c, beta) == Approx(sslr::loglik(ctx, beta)).epsilon(1e-12));

    const auto eval = sslr::evaluate_intercept(ctx, 0.4, beta, sslr::Derivatives::Hessian);
    Eigen::VectorXd theta(3);
    theta << 0.4, beta;
    const auto f = [&](const Eigen::VectorXd& t) { return sslr::loglik_intercept(ctx, t(0), t.tail(2)); };
    const auto g = [&](const Eigen::VectorXd& t) {
        return sslr::evaluate_intercept(ctx, t(0), t.tail(2), sslr::Derivatives::Gradient).gradient;
    };
    CHECK(oracle::relative_error(eval.gradient, oracle::gradient(f, theta)) < 1e-5);
    CHECK(oracle::relative_error(eval.hessian, oracle::jacobian(g, theta)) < 1e-4);
}

TEST_CASE("profile likelihood in the noise scale", "[likelihood][profile]") {
    fixture::Recipe r;
    r.m = 60;
    r.beta0 = vec({1.0, 0.5});
    const auto s = fixture::make_sample(r);
    CHECK(code_of([&] { (void)sslr::loglik_profile_sigma(s, 2, r.beta0, 0.0); }) == sslr::ErrorCode::Domain);
    CHECK(code_of([&] { (void)sslr::loglik_profile_sigma(s, 2, r.beta0, -1.0); }) == sslr::ErrorCode::Domain);

    double prev = sslr::loglik_profile_sigma(s, 2, r.beta0, 1e6);
    for (double sigma : {2e6, 4e6, 8e6}) {
        const double v = sslr::loglik_profile_sigma(s, 2, r.beta0, sigma);
        CHECK(v < prev);
        CHECK(v + std::log(sigma) == Approx(prev + std::log(sigma / 2)).epsilon(1e-9));
        prev = v;
    }

    const auto m_only = matched_only(s);
    const Eigen::VectorXd ols = oracle::normal_equations(m_only.matched_x, m_only.matched_y);
    const double rms = std::sqrt((m_only.matched_y - m_only.matched_x * ols).squaredNorm() / 60.0);
    const double best = oracle::scan_maximize(
        [&](double sigma) { return sslr::loglik_profile_sigma(m_only, 2, ols, sigma); }, 0.2, 5.0);
    CHECK(best == Approx(rms).epsilon(1e-6));
}

TEST_CASE("profile maximizer concentrates as the sample grows", "[likelihood][profile]") {
    const double sigma = 1.5;
    const auto spread = [&](Eigen::Index n) {
        double total = 0.0;
        for (int rep = 0; rep < 12; ++rep) {
            fixture::Recipe r;
            r.n = n;
            r.m = n / 5;
            r.beta0 = vec({1.0});
            r.noise_sd = sigma;
            r.seed = 700 + rep + 100 * n;
            const auto s = fixture::make_sample(r);
            const double hat = oracle::scan_maximize(
                [&](double t) { return sslr::loglik_profile_sigma(s, 2, r.beta0, t); }, 0.3, 6.0, 2001);
            total += std::abs(hat - sigma);
        }
        return total / 12.0;
    };
    CHECK(spread(500) < spread(50));
}

TEST_CASE("existence radius", "[likelihood][existence]") {
    const LikelihoodContext hand(single_point(1, 1, 1, 1), NoiseDensity::gaussian(1.0));
    const auto cert = sslr::existence_radius(hand);
    CHECK(cert.a_star == Approx(1.0).epsilon(1e-14));
    CHECK(cert.radius == Approx(std::sqrt(6.0)).epsilon(1e-14));

    for (int alpha : {1, 2, 3}) {
        fixture::Recipe r;
        r.m = 25;
        r.alpha = alpha;
        r.seed = 40 + alpha;
        const auto s = fixture::make_sample(r);
        const LikelihoodContext ctx(s, NoiseDensity::with_sd(alpha, 1.0));
        const auto c = sslr::existence_radius(ctx);
        CHECK(c.a_star == Approx(s.matched_x.col(0).array().abs().pow(alpha).sum()).epsilon(1e-12));
        const double want = std::pow(std::pow(2.0, alpha - 1) / c.a_star * s.unmatched_y.array().abs().pow(alpha).sum() +
                                         std::pow(2.0, alpha) / c.a_star * s.matched_y.array().abs().pow(alpha).sum(),
                                     1.0 / alpha);
        CHECK(std::abs(c.radius - want) < 1e-10 * want);
    }
}

TEST_CASE("sphere minimum beats random directions", "[likelihood][existence]") {
    for (int alpha : {1, 2, 3}) {
        oracle::Gaussian g(60 + alpha);
        Eigen::MatrixXd x = g.matrix(30, 2);
        x.col(1) += 0.9 * x.col(0);
        const auto best = sslr::sphere_minimum(x, alpha);
        CHECK(best.direction.norm() == Approx(1.0).epsilon(1e-12));
        CHECK(best.value == Approx((x * best.direction).array().abs().pow(alpha).sum()).epsilon(1e-10));
        for (int k = 0; k < 10000; ++k) {
            Eigen::Vector2d u(g(), g());
            u.normalize();
            const double v = (x * u).array().abs().pow(alpha).sum();
            if (v < best.value - 1e-9 * best.value) {
                FAIL("random direction " << k << " beats the sphere minimum: " << v << " < " << best.value);
            }
        }
    }
}

TEST_CASE("rank deficient matched design is rejected", "[likelihood][existence]") {
    fixture::Recipe r;
    r.m = 10;
    r.beta0 = vec({1.0, 1.0});
    auto s = fixture::make_sample(r);
    s.matched_x.col(1) = 2.0 * s.matched_x.col(0);
    const LikelihoodContext ctx(s, NoiseDensity::gaussian(1.0));
    CHECK(code_of([&] { (void)sslr::existence_radius(ctx); }) == sslr::ErrorCode::Rank);
}

TEST_CASE("outside the ball the likelihood is below its value at zero", "[likelihood][existence]") {
    sslr::Rng rng(123);
    for (int inst = 0; inst < 4; ++inst) {
        fixture::Recipe r;
        r.m = 15;
        r.n = 60;
        r.beta0 = vec({1.0, -1.0});
        r.alpha = 2 + inst % 2;
        r.seed = 900 + inst;
        const auto s = fixture::make_sample(r);
        const LikelihoodContext ctx(s, NoiseDensity::with_sd(r.alpha, 1.0));
        const double radius = sslr::existence_radius(ctx).radius;
        const double at_zero = sslr::loglik(ctx, Eigen::VectorXd::Zero(2));
        for (int k = 0; k < 20; ++k) {
            Eigen::VectorXd dir(2);
            dir << rng.normal(), rng.normal();
            const Eigen::VectorXd beta = dir.normalized() * radius * rng.uniform(1.0001, 3.0);
            CHECK(sslr::loglik(ctx, beta) < at_zero);
        }
    }
}

TEST_CASE("population criterion", "[likelihood][population]") {
    sslr::GaussianDesignModel g;
    g.beta0 = vec({1.0});
    g.mu_x = vec({0.0});
    g.sigma_x = Eigen::MatrixXd::Identity(1, 1);
    g.sigma_eps = 1.3;

    const auto at_truth = sslr::population_terms(g, g.beta0);
    CHECK(at_truth.matched == Approx(-0.5 * std::log(2 * M_PI * 1.3 * 1.3) - 0.5).epsilon(1e-9));
    CHECK(sslr::population_loglik(g, 1.0, g.beta0) ==
          Approx(0.5 * at_truth.unmatched + 0.5 * at_truth.matched).epsilon(1e-12));

    // Gaussian unmatched term: expected log of the N(beta mu, beta^2 + s^2) density under Y.
    for (double b : {-2.0, -1.0, 0.5, 1.0, 1.7}) {
        const double s2 = b * b + 1.69;
        const double want = -0.5 * std::log(2 * M_PI * s2) - (1.0 + 1.69) / (2 * s2);
        CHECK(std::abs(sslr::population_terms(g, vec({b})).unmatched - want) < 1e-6);
    }
    CHECK(std::abs(sslr::population_terms(g, vec({-1.0})).unmatched - at_truth.unmatched) < 1e-9);
}

TEST_CASE("population criterion peaks at the truth", "[likelihood][population]") {
    sslr::Rng rng(321);
    sslr::GaussianDesignModel g;
    g.beta0 = vec({1.0, -0.5});
    g.mu_x = vec({0.5, 1.0});
    g.sigma_x = Eigen::MatrixXd::Identity(2, 2);
    g.sigma_x(0, 1) = g.sigma_x(1, 0) = 0.3;
    g.sigma_eps = 1.0;
    sslr::UniformDesignModel u;
    u.beta0 = vec({1.0, 0.5});
    u.lower = vec({-1.0, 0.0});
    u.upper = vec({1.0, 2.0});
    u.sigma_eps = 0.8;
    u.alpha = 3;
    for (const sslr::DesignModel& model : {sslr::DesignModel(g), sslr::DesignModel(u)}) {
        const Eigen::VectorXd b0 = sslr::design_beta0(model);
        const double top = sslr::population_loglik(model, 0.4, b0);
        for (int k = 0; k < 50; ++k) {
            Eigen::VectorXd delta(2);
            delta << rng.normal(), rng.normal();
            delta *= rng.uniform(0.01, 1.5) / delta.norm();
            const double v = sslr::population_loglik(model, 0.4, b0 + delta);
            CHECK(v <= top);
            if (delta.norm() >= 0.1) CHECK(v <= top - 1e-6);
        }
    }
}
