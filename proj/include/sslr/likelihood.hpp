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

#include <Eigen/Dense>

#include "sslr/data.hpp"
#include "sslr/models.hpp"
#include "sslr/noise.hpp"

namespace sslr {

// Sample plus noise density: everything the empirical log-likelihood needs.
class LikelihoodContext {
public:
    LikelihoodContext(SemiSupervisedSample sample, NoiseDensity noise);

    const SemiSupervisedSample& sample() const { return sample_; }
    const NoiseDensity& noise() const { return noise_; }
    Eigen::Index p() const { return p_; }
    Eigen::Index n() const { return sample_.n_y(); }
    Eigen::Index m() const { return sample_.m(); }
    // n / (n + m).
    double weight() const;

    // Covariates with a leading column of ones.
    const Matrix& matched_design() const { return matched_design_; }
    const Matrix& unmatched_design() const { return unmatched_design_; }

private:
    SemiSupervisedSample sample_;
    NoiseDensity noise_;
    Eigen::Index p_;
    Matrix matched_design_;
    Matrix unmatched_design_;
};

enum class Derivatives { None, Gradient, Hessian };

struct LikelihoodEval {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
};

// Value and optionally derivatives of the empirical log-likelihood at beta.
LikelihoodEval evaluate(const LikelihoodContext& ctx, const Vector& beta, Derivatives what);
// Intercept model; derivatives are with respect to (beta1, beta_rest).
LikelihoodEval evaluate_intercept(const LikelihoodContext& ctx, double beta1,
                                  const Vector& beta_rest, Derivatives what);

double loglik(const LikelihoodContext& ctx, const Vector& beta);
Vector score(const LikelihoodContext& ctx, const Vector& beta);
Matrix hessian(const LikelihoodContext& ctx, const Vector& beta);
double loglik_intercept(const LikelihoodContext& ctx, double beta1, const Vector& beta_rest);

// (1/n) sum_j log((1/n) sum_i f(y_j - beta'x_i)) and (1/m) sum_k log f(y_k - beta'x_k).
double unmatched_mean_term(const LikelihoodContext& ctx, const Vector& beta);
double matched_mean_term(const LikelihoodContext& ctx, const Vector& beta);

// Log-likelihood with the unit-variance member of the alpha family scaled by
// sigma, i.e. noise density (1/sigma) f0(t / sigma).
double loglik_profile_sigma(const SemiSupervisedSample& sample, int alpha, const Vector& beta,
                            double sigma);

struct ExistenceCertificate {
    double radius = 0.0;
    double a_star = 0.0;
    Vector direction;
};

// Radius of a ball around the origin that contains a maximizer. With
// with_intercept the matched design is augmented by a column of ones.
ExistenceCertificate existence_radius(const LikelihoodContext& ctx, bool with_intercept = false);

// Minimum of u -> sum_k |u'x_k|^alpha over the unit sphere.
struct SphereMinimum {
    double value;
    Vector direction;
};
SphereMinimum sphere_minimum(const Matrix& x, int alpha, std::uint64_t seed = 0x5eedULL,
                             int restarts = 32);

struct PopulationTerms {
    double unmatched = 0.0; // integral of log f^Y_beta against the law of Y
    double matched = 0.0;   // E log f(Y - beta'X)
};

PopulationTerms population_terms(const DesignModel& model, const Vector& beta,
                                 const QuadratureBudget& budget = {});
// (1/(1+lambda)) unmatched + (lambda/(1+lambda)) matched.
double population_loglik(const DesignModel& model, double lambda, const Vector& beta,
                         const QuadratureBudget& budget = {});

} // namespace sslr
