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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sslr/error.hpp"
#include "sslr/likelihood.hpp"
#include "sslr/quadrature.hpp"

namespace sslr {
namespace {

double log_mixture(const ProjectedNodes& nodes, const NoiseDensity& noise, double y) {
    double hi = -std::numeric_limits<double>::infinity();
    const std::size_t k = nodes.s.size();
    std::vector<double> terms(k);
    for (std::size_t q = 0; q < k; ++q) {
        terms[q] = std::log(nodes.w[q]) + noise.log_pdf(y - nodes.s[q]);
        hi = std::max(hi, terms[q]);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - hi);
    return hi + std::log(sum);
}

// E|eps + u|^alpha under the noise law.
double abs_moment(const NoiseDensity& noise, double u) {
    const int alpha = noise.alpha();
    if (alpha == 2) return noise.variance() + u * u;
    const double reach = noise.d() * std::pow(60.0, 1.0 / alpha) + std::fabs(u);
    auto integrand = [&](double e) { return std::pow(std::fabs(e + u), alpha) * noise.pdf(e); };
    AdaptiveOptions opt;
    opt.abs_tol = 1e-12;
    const double kink = std::clamp(-u, -reach, reach);
    return integrate(integrand, -reach, kink, opt) + integrate(integrand, kink, reach, opt);
}

} // namespace

PopulationTerms population_terms(const DesignModel& model, const Vector& beta,
                                 const QuadratureBudget& budget) {
    design_validate(model);
    const Vector& beta0 = design_beta0(model);
    if (beta.size() != beta0.size()) fail(ErrorCode::Shape, "coefficient vector has the wrong dimension");
    const NoiseDensity noise = design_noise(model);

    const ProjectedNodes truth = project_design(model, beta0, budget);
    const ProjectedNodes trial = project_design(model, beta, budget);
    const double center = beta0.dot(design_mean(model));
    const double sd_y = std::sqrt(beta0.dot(design_covariance(model) * beta0) + noise.variance());
    const double lo = center - budget.truncation_sds * sd_y;
    const double hi = center + budget.truncation_sds * sd_y;

    AdaptiveOptions opt;
    opt.abs_tol = budget.abs_tol;
    auto integrand = [&](double y) {
        return std::exp(log_mixture(truth, noise, y)) * log_mixture(trial, noise, y);
    };
    PopulationTerms out;
    out.unmatched = integrate(integrand, lo, hi, opt);

    const Vector delta = beta0 - beta;
    const ProjectedNodes shift = project_design(model, delta, budget);
    const double inv_da = std::pow(noise.d(), -noise.alpha());
    double moment = 0.0;
    for (std::size_t q = 0; q < shift.s.size(); ++q) moment += shift.w[q] * abs_moment(noise, shift.s[q]);
    out.matched = noise.log_c_alpha() - inv_da * moment;
    return out;
}

double population_loglik(const DesignModel& model, double lambda, const Vector& beta,
                         const QuadratureBudget& budget) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::Domain, "lambda must be positive");
    const PopulationTerms t = population_terms(model, beta, budget);
    return (t.unmatched + lambda * t.matched) / (1.0 + lambda);
}

} // namespace sslr
