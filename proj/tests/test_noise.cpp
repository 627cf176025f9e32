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
#include "oracles.hpp"

#include <sslr/error.hpp>
#include <sslr/noise.hpp>
#include <sslr/quadrature.hpp>
#include <sslr/random.hpp>
#include <sslr/special_functions.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using Catch::Approx;
using sslr::NoiseDensity;

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

} // namespace

TEST_CASE("density values at the origin", "[noise]") {
    CHECK(NoiseDensity(1, 1.0).pdf(0.0) == Approx(0.5).epsilon(1e-14));
    CHECK(NoiseDensity(2, std::sqrt(2.0)).pdf(0.0) == Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(NoiseDensity::gaussian(1.0).d() == Approx(std::sqrt(2.0)));
    CHECK(NoiseDensity::laplace(0.7).alpha() == 1);
}

TEST_CASE("constructor rejects bad parameters", "[noise]") {
    CHECK_THROWS_AS(NoiseDensity(0, 1.0), sslr::Error);
    CHECK_THROWS_AS(NoiseDensity(2, 0.0), sslr::Error);
    CHECK_THROWS_AS(NoiseDensity(2, -1.0), sslr::Error);
    CHECK_THROWS_AS(NoiseDensity::with_sd(2, 0.0), sslr::Error);
}

TEST_CASE("density matches the direct formula", "[noise]") {
    for (int alpha : {1, 2, 3, 4})
        for (double d : {0.5, 1.0, 2.53})
            for (double t : {-3.1, -0.4, 0.0, 0.25, 1.7, 5.0})
                CHECK(NoiseDensity(alpha, d).pdf(t) ==
                      Approx(oracle::power_pdf(alpha, d, t)).epsilon(1e-12).margin(1e-300));
}

TEST_CASE("density integrates to one", "[noise]") {
    for (int alpha : {1, 2, 3, 4})
        for (double d : {0.5, 1.0, 2.53}) {
            const NoiseDensity f(alpha, d);
            const double total = oracle::simpson_line([&](double t) { return f.pdf(t); }, 60.0 * d);
            CHECK(std::abs(total - 1.0) < 1e-8);
        }
}

TEST_CASE("derivatives agree with finite differences", "[noise]") {
    sslr::Rng rng(7);
    for (int alpha : {1, 2, 3, 4}) {
        const NoiseDensity f(alpha, 1.3);
        int checked = 0;
        while (checked < 50) {
            const double t = rng.uniform(-4.0, 4.0);
            if (alpha == 1 && std::abs(t) < 1e-3) continue;
            const double h = 1e-5;
            const double d1 = oracle::central_difference([&](double s) { return f.evaluate(s, 0); }, t, h);
            CHECK(f.evaluate(t, 1) == Approx(d1).epsilon(1e-6).margin(1e-10));
            if (alpha >= 2) {
                const double d2 = oracle::central_difference([&](double s) { return f.evaluate(s, 1); }, t, h);
                CHECK(f.evaluate(t, 2) == Approx(d2).epsilon(1e-6).margin(1e-9));
            }
            ++checked;
        }
    }
}

TEST_CASE("Laplace kink is reported, not smoothed over", "[noise]") {
    const NoiseDensity f(1, 1.0);
    try {
        (void)f.evaluate(0.0, 1);
        FAIL("expected a non-differentiable error");
    } catch (const sslr::Error& e) {
        CHECK(e.code() == sslr::ErrorCode::NonDifferentiable);
    }
    CHECK_THROWS_AS(f.evaluate(1.0, 3), sslr::Error);
}

TEST_CASE("cdf values", "[noise]") {
    CHECK(NoiseDensity(1, 1.0).cdf(std::log(2.0)) == Approx(0.75).epsilon(1e-14));
    const NoiseDensity f3(3, 1.0);
    const double want = 0.5 + oracle::simpson([&](double t) { return f3.pdf(t); }, 0.0, 1.0);
    CHECK(f3.cdf(1.0) == Approx(want).epsilon(1e-10));
    CHECK(f3.cdf(-1.0) == Approx(1.0 - want).epsilon(1e-10));
}

TEST_CASE("cdf derivative is the density", "[noise]") {
    sslr::Rng rng(11);
    for (int alpha : {1, 2, 3, 4}) {
        const NoiseDensity f(alpha, 0.9);
        for (int i = 0; i < 30; ++i) {
            const double t = rng.uniform(-3.0, 3.0);
            if (alpha == 1 && std::abs(t) < 1e-3) continue;
            const double d = oracle::central_difference([&](double s) { return f.cdf(s); }, t, 1e-5);
            CHECK(std::abs(d - f.pdf(t)) < 1e-6);
        }
    }
}

TEST_CASE("alpha 2 is the normal law", "[noise]") {
    for (double sigma : {0.3, 1.0, 2.5}) {
        const NoiseDensity f = NoiseDensity::gaussian(sigma);
        for (double t = -6.0; t <= 6.0; t += 0.37) {
            CHECK(std::abs(f.pdf(t) - oracle::normal_pdf(t, sigma)) < 1e-10);
            CHECK(std::abs(f.cdf(t) - oracle::normal_cdf(t, sigma)) < 1e-10);
        }
        CHECK(f.sd() == Approx(sigma).epsilon(1e-14));
    }
}

TEST_CASE("Fisher integral", "[noise]") {
    CHECK(NoiseDensity::gaussian(2.0).fisher_integral() == Approx(0.25).epsilon(1e-14));
    CHECK(NoiseDensity(1, 1.0).fisher_integral() == Approx(1.0).epsilon(1e-14));
    for (int alpha : {2, 3, 4}) {
        const NoiseDensity f(alpha, 1.5);
        const double quad = oracle::simpson_line(
            [&](double t) {
                const double fp = f.evaluate(t, 1);
                const double v = f.pdf(t);
                return v > 0.0 ? fp * fp / v : 0.0;
            },
            40.0);
        CHECK(std::abs(f.fisher_integral() - quad) < 1e-8);
    }
}

TEST_CASE("variance formula", "[noise]") {
    for (int alpha : {1, 2, 3, 4}) {
        const NoiseDensity f(alpha, 1.1);
        const double quad = oracle::simpson_line([&](double t) { return t * t * f.pdf(t); }, 60.0);
        CHECK(f.variance() == Approx(quad).epsilon(1e-9));
        CHECK(NoiseDensity::with_sd(alpha, 2.0).sd() == Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("sampling moments", "[noise][sampling]") {
    const std::size_t n = 100000;
    {
        sslr::Rng rng(2024);
        const auto x = NoiseDensity(2, std::sqrt(2.0)).sample(rng, n);
        // Var of the sample variance for a normal law is 2 sigma^4 / (n - 1).
        const double se = std::sqrt(2.0 / (n - 1.0));
        CHECK(std::abs(variance_of(x) - 1.0) < 3.0 * se);
    }
    for (int alpha : {1, 2, 3, 4}) {
        sslr::Rng rng(99 + alpha);
        const NoiseDensity f(alpha, 0.8);
        const auto x = f.sample(rng, n);
        CHECK(std::abs(mean_of(x)) < 3.0 * f.sd() / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("Laplace sample passes Kolmogorov-Smirnov", "[noise][sampling]") {
    const std::size_t n = 100000;
    sslr::Rng rng(5);
    const NoiseDensity f(1, 1.0);
    auto x = f.sample(rng, n);
    std::sort(x.begin(), x.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Closed-form Laplace cdf, independent of the library's.
        const double c = x[i] < 0 ? 0.5 * std::exp(x[i]) : 1.0 - 0.5 * std::exp(-x[i]);
        ks = std::max({ks, std::abs(c - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - c)});
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampling is deterministic given the seed", "[noise][sampling]") {
    const NoiseDensity f(3, 1.0);
    sslr::Rng a(42), b(42);
    CHECK(f.sample(a, 64) == f.sample(b, 64));
    sslr::Rng c(42);
    CHECK_THROWS_AS(f.sample(c, 0), sslr::Error);
}

TEST_CASE("regularized incomplete gamma", "[special]") {
    for (double a : {0.25, 0.5, 1.0, 3.0, 7.5})
        for (double x : {0.01, 0.5, 1.0, 4.0, 12.0}) {
            // Below a = 1 substitute t = u^(1/a) to remove the singularity at 0.
            const double integral =
                a < 1.0 ? oracle::simpson([&](double u) { return std::exp(-std::pow(u, 1.0 / a)) / a; }, 0.0,
                                          std::pow(x, a), 1e-13)
                        : oracle::simpson([&](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, 0.0, x,
                                          1e-13 * std::tgamma(a));
            const double want = integral / std::tgamma(a);
            CHECK(sslr::gamma_p(a, x) == Approx(want).epsilon(1e-10));
            CHECK(sslr::gamma_p(a, x) + sslr::gamma_q(a, x) == Approx(1.0).epsilon(1e-13));
            const double p = sslr::gamma_p(a, x);
            if (p > 1e-12 && p < 1.0 - 1e-12)
                CHECK(sslr::gamma_p_inverse(a, p) == Approx(x).epsilon(1e-9));
        }
    CHECK_THROWS_AS(sslr::gamma_p(-1.0, 1.0), sslr::Error);
    CHECK_THROWS_AS(sslr::gamma_p(1.0, -1.0), sslr::Error);
}

TEST_CASE("chi-square quantiles and ball volumes", "[special]") {
    CHECK(std::abs(sslr::chi_square_quantile(0.95, 1.0) - 3.841459) < 1e-5);
    CHECK(sslr::chi_square_quantile(0.95, 2.0) == Approx(-2.0 * std::log(0.05)).epsilon(1e-12));
    CHECK(sslr::chi_square_quantile(0.95, 3.0) == Approx(7.814727903251178).epsilon(1e-10));
    CHECK(sslr::unit_ball_volume(1) == Approx(2.0));
    CHECK(sslr::unit_ball_volume(2) == Approx(M_PI).epsilon(1e-15));
    CHECK(sslr::unit_ball_volume(3) == Approx(4.0 * M_PI / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(sslr::chi_square_quantile(1.0, 1.0), sslr::Error);
}

TEST_CASE("quadrature rules", "[quadrature]") {
    const auto gh = sslr::normal_expectation_rule(1.5, 2.0, 40);
    double m1 = 0, m2 = 0, m4 = 0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        m1 += gh.weights[i] * gh.nodes[i];
        m2 += gh.weights[i] * (gh.nodes[i] - 1.5) * (gh.nodes[i] - 1.5);
        m4 += gh.weights[i] * std::pow(gh.nodes[i] - 1.5, 4);
    }
    CHECK(m1 == Approx(1.5).epsilon(1e-13));
    CHECK(m2 == Approx(4.0).epsilon(1e-13));
    CHECK(m4 == Approx(48.0).epsilon(1e-12));

    const auto gl = sslr::composite_legendre(-1.0, 2.0, 7, 9);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::exp(gl.nodes[i]);
    CHECK(s == Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-14));

    CHECK(sslr::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0) == Approx(2.0 / 3.0).epsilon(1e-9));
    const Eigen::VectorXd v = sslr::integrate(
        [](double x, Eigen::Ref<Eigen::VectorXd> out) {
            out(0) = std::cos(x);
            out(1) = x * x;
        },
        2, 0.0, M_PI);
    CHECK(std::abs(v(0)) < 1e-10);
    CHECK(v(1) == Approx(std::pow(M_PI, 3) / 3.0).epsilon(1e-11));
}

TEST_CASE("seed derivation and partial shuffles", "[random]") {
    CHECK(sslr::derive_seed(1, 2, 3) == sslr::derive_seed(1, 2, 3));
    CHECK(sslr::derive_seed(1, 2, 3) != sslr::derive_seed(1, 3, 2));
    CHECK(sslr::derive_seed(1, 0) != sslr::derive_seed(2, 0));
    sslr::Rng a(3), b(3);
    const auto pa = sslr::partial_shuffle(50, 20, a);
    CHECK(pa == sslr::partial_shuffle(50, 20, b));
    auto sorted = pa;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(sorted.back() < 50);
}
