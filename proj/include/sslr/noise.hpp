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

#pragma once

#include <vector>

#include "sslr/random.hpp"

namespace sslr {

// Generalized Gaussian (exponential power) noise density
//   f(t) = c * exp(-|t/d|^alpha),  c = alpha / (2 d Gamma(1/alpha)).
class NoiseDensity {
public:
    NoiseDensity(int alpha, double d);

    static NoiseDensity gaussian(double sigma);
    static NoiseDensity laplace(double scale);
    // Member of the family with the given standard deviation.
    static NoiseDensity with_sd(int alpha, double sd);

    int alpha() const { return alpha_; }
    double d() const { return d_; }
    double c_alpha() const { return c_; }
    double log_c_alpha() const { return log_c_; }

    double pdf(double t) const;
    double log_pdf(double t) const;
    // order 0, 1 or 2; order >= 1 at t = 0 with alpha = 1 throws NonDifferentiable.
    double evaluate(double t, int order) const;
    // f'(t)/f(t) and f''(t)/f(t).
    double score_ratio(double t) const;
    double curvature_ratio(double t) const;

    double cdf(double t) const;
    std::vector<double> sample(Rng& rng, std::size_t count) const;
    double draw(Rng& rng) const;

    // Closed form of the integral of f'^2 / f.
    double fisher_integral() const;
    double variance() const;
    double sd() const;

private:
    int alpha_;
    double d_;
    double c_;
    double log_c_;
    double inv_d_alpha_;
};

} // namespace sslr
