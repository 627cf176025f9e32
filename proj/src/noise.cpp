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

#include "sslr/noise.hpp"

#include <cmath>

#include "sslr/error.hpp"
#include "sslr/special_functions.hpp"

namespace sslr {
namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

} // namespace

NoiseDensity::NoiseDensity(int alpha, double d) : alpha_(alpha), d_(d) {
    if (alpha < 1) fail(ErrorCode::Domain, "noise exponent alpha must be a positive integer");
    if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorCode::Domain, "noise scale d must be positive and finite");
    const double inv_alpha = 1.0 / alpha;
    log_c_ = std::log(static_cast<double>(alpha)) - std::log(2.0 * d) - std::lgamma(inv_alpha);
    c_ = std::exp(log_c_);
    inv_d_alpha_ = std::pow(d, -alpha);
}

NoiseDensity NoiseDensity::gaussian(double sigma) { return NoiseDensity(2, std::sqrt(2.0) * sigma); }

NoiseDensity NoiseDensity::laplace(double scale) { return NoiseDensity(1, scale); }

NoiseDensity NoiseDensity::with_sd(int alpha, double sd) {
    if (alpha < 1) fail(ErrorCode::Domain, "noise exponent alpha must be a positive integer");
    if (!(sd > 0.0)) fail(ErrorCode::Domain, "noise standard deviation must be positive");
    const double a = 1.0 / alpha;
    return NoiseDensity(alpha, sd * std::exp(0.5 * (std::lgamma(a) - std::lgamma(3.0 * a))));
}

double NoiseDensity::log_pdf(double t) const {
    return log_c_ - ipow(std::fabs(t), alpha_) * inv_d_alpha_;
}

double NoiseDensity::pdf(double t) const { return std::exp(log_pdf(t)); }

double NoiseDensity::score_ratio(double t) const {
    if (t == 0.0) {
        if (alpha_ == 1) fail(ErrorCode::NonDifferentiable, "noise density is not differentiable at 0 for alpha = 1");
        return 0.0;
    }
    const double s = t > 0.0 ? 1.0 : -1.0;
    return -alpha_ * inv_d_alpha_ * ipow(std::fabs(t), alpha_ - 1) * s;
}

double NoiseDensity::curvature_ratio(double t) const {
    const double psi = score_ratio(t);
    if (alpha_ == 1) return psi * psi;
    return -alpha_ * (alpha_ - 1) * inv_d_alpha_ * ipow(std::fabs(t), alpha_ - 2) + psi * psi;
}

double NoiseDensity::evaluate(double t, int order) const {
    switch (order) {
    case 0: return pdf(t);
    case 1: return score_ratio(t) * pdf(t);
    case 2: return curvature_ratio(t) * pdf(t);
    default: fail(ErrorCode::InvalidArgument, "derivative order must be 0, 1 or 2");
    }
}

double NoiseDensity::cdf(double t) const {
    if (t == 0.0) return 0.5;
    if (alpha_ == 2) return 0.5 * std::erfc(-t / d_);
    if (alpha_ == 1) return t < 0.0 ? 0.5 * std::exp(t / d_) : 1.0 - 0.5 * std::exp(-t / d_);
    const double z = ipow(std::fabs(t) / d_, alpha_);
    const double a = 1.0 / alpha_;
    // The far tail goes through Q so small probabilities keep their digits.
    if (t < 0.0) return 0.5 * gamma_q(a, z);
    return 0.5 + 0.5 * gamma_p(a, z);
}

double NoiseDensity::draw(Rng& rng) const {
    const double g = rng.gamma(1.0 / alpha_);
    const double magnitude = d_ * std::pow(g, 1.0 / alpha_);
    return rng.sign() * magnitude;
}

std::vector<double> NoiseDensity::sample(Rng& rng, std::size_t count) const {
    if (count == 0) fail(ErrorCode::InvalidArgument, "sample count must be positive");
    std::vector<double> out(count);
    for (auto& v : out) v = draw(rng);
    return out;
}

double NoiseDensity::fisher_integral() const {
    const double a = 1.0 / alpha_;
    return (static_cast<double>(alpha_) * alpha_) / (d_ * d_) *
           std::exp(std::lgamma(2.0 - a) - std::lgamma(a));
}

double NoiseDensity::variance() const {
    const double a = 1.0 / alpha_;
    return d_ * d_ * std::exp(std::lgamma(3.0 * a) - std::lgamma(a));
}

double NoiseDensity::sd() const { return std::sqrt(variance()); }

} // namespace sslr
