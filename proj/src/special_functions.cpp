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

#include "sslr/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "sslr/error.hpp"

namespace sslr {
namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 100000;

double log_prefactor(double a, double x) {
    return -x + a * std::log(x) - std::lgamma(a);
}

// Power series for P, good for x < a + 1.
double p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxTerms; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(log_prefactor(a, x));
}

// Modified Lentz continued fraction for Q, good for x >= a + 1.
double q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(log_prefactor(a, x)) * h;
}

void check_args(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a))
        fail(ErrorCode::Domain, "incomplete gamma: shape must be positive and finite");
    if (!(x >= 0.0)) fail(ErrorCode::Domain, "incomplete gamma: argument must be non-negative");
}

} // namespace

double gamma_p(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return p_series(a, x);
    return 1.0 - q_fraction(a, x);
}

double gamma_q(double a, double x) {
    check_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - p_series(a, x);
    return q_fraction(a, x);
}

double gamma_p_inverse(double a, double p) {
    if (!(a > 0.0)) fail(ErrorCode::Domain, "inverse incomplete gamma: shape must be positive");
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::Domain, "inverse incomplete gamma: p outside [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    // Work on whichever tail keeps the target away from 1.
    const bool upper = p > 0.5;
    const double target = upper ? 1.0 - p : p;
    auto residual = [&](double x) {
        return upper ? target - gamma_q(a, x) : gamma_p(a, x) - target;
    };

    double lo = 0.0;
    double hi = std::max(1.0, a);
    while (residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double dens = std::exp(-x + (a - 1.0) * std::log(x) - std::lgamma(a));
        if (!(dens > 0.0)) break;
        const double next = x - residual(x) / dens;
        if (!(next > lo && next < hi)) break;
        x = next;
    }
    return x;
}

double chi_square_quantile(double probability, double dof) {
    if (!(probability > 0.0 && probability < 1.0))
        fail(ErrorCode::Domain, "chi-square quantile: probability must lie in (0, 1)");
    if (!(dof > 0.0)) fail(ErrorCode::Domain, "chi-square quantile: dof must be positive");
    return 2.0 * gamma_p_inverse(0.5 * dof, probability);
}

double unit_ball_volume(int p) {
    if (p < 1) fail(ErrorCode::Domain, "unit ball volume: dimension must be positive");
    const double h = 0.5 * p;
    return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0));
}

} // namespace sslr
