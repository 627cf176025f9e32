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

#include <Eigen/Dense>

#include "sslr/data.hpp"
#include "sslr/models.hpp"
#include "sslr/noise.hpp"

namespace sslr {

struct Gammas {
    Matrix gamma1;
    Matrix gamma2;
};

struct AsymptoticCovariances {
    Matrix sigma2;
    Matrix gamma1;
    Matrix gamma2;
    Matrix sigma_ssl;
    Matrix sigma_ssl_tilde; // lambda / (1 + lambda) * sigma_ssl
    Matrix sigma_mmle;      // inverse of sigma2
    double lambda = 0.0;
};

struct GainReport {
    double gain = 1.0;
    double lambda = 0.0;
    double eta = 0.0;
    double zeta = 0.0;
    double rho = 0.0; // infinite when the covariate mean is zero
    bool centered = false;
};

struct UnimodalityReport {
    double lambda = 0.0;
    double eta_root = 0.0;       // unique positive root of the derivative polynomial
    double gain_at_root = 0.0;
    double small_lambda_eta_star = 0.0;
    double small_lambda_coefficient = 0.0; // max over eta of sqrt(lambda) * small-lambda gain
    int samples = 0;
    int sign_violations = 0;
    bool sign_pattern_ok = false;
};

struct EllipsoidReport {
    Vector center;
    Matrix covariance;
    double level = 0.0;
    double matched_count = 0.0;
    double quantile = 0.0;   // chi-square quantile q
    Vector semi_axes;        // sqrt(eigenvalue * q / m), ascending
    Matrix axes;             // unit directions, one per column
    double volume = 0.0;

    bool contains(const Vector& beta) const;
};

// Fisher-type matrix (integral of f'^2/f) * E[XX'].
Matrix sigma2(const NoiseDensity& noise, const Matrix& second_moment);

// Closed forms for Gaussian noise and Gaussian covariates.
Gammas gammas_gaussian(const GaussianDesignModel& model);

// Influence of an unmatched covariate on the score, psi(x); it depends on x
// only through beta0'x. Built once on a fixed response grid.
class InfluenceFunction {
public:
    InfluenceFunction(const DesignModel& model, const QuadratureBudget& budget = {});
    Vector at_projection(double s) const;
    Vector operator()(const Vector& x) const { return at_projection(beta0_.dot(x)); }

private:
    Vector beta0_;
    NoiseDensity noise_;
    std::vector<double> y_;
    Matrix weighted_; // row k: weight_k * g(y_k) / f^Y(y_k)
};

// Quadrature evaluation of the two matrices for Gaussian or uniform covariates.
Gammas gammas_numeric(const DesignModel& model, const QuadratureBudget& budget = {});

AsymptoticCovariances sigma_ssl(const Matrix& gamma1, const Matrix& gamma2, const Matrix& sigma2,
                                double lambda);

// All matrices of a Gaussian model with Gaussian noise, from the closed forms.
AsymptoticCovariances covariances_gaussian(const GaussianDesignModel& model, double lambda);

// Plug-in covariances for a fitted sample: Gaussian covariates with the
// sample mean and covariance of every covariate row, beta0 := beta and
// lambda := m / n.
AsymptoticCovariances plugin_covariances(const SemiSupervisedSample& sample, const Vector& beta,
                                         const NoiseDensity& noise);

double gain_centered(double eta, double lambda);
double gain_general(double eta, double zeta, double rho, double lambda);
GainReport gain_closed_form(const GaussianDesignModel& model, double lambda);
GainReport gain_generic(const AsymptoticCovariances& covariances);

// -4(1+l) eta^3 - 3 l eta^2 + 2(1+l) eta + l.
double unimodality_polynomial(double eta, double lambda);
double small_lambda_gain_centered(double eta, double lambda);
double small_lambda_gain_general(double eta, double zeta, double rho, double lambda);
UnimodalityReport gain_analysis(double lambda);

EllipsoidReport confidence_region(const Vector& center, const Matrix& covariance, double level,
                                  double matched_count);

} // namespace sslr
