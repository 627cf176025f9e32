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

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sslr/noise.hpp"

namespace sslr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Linear model y = beta0'x + eps with Gaussian covariates.
struct GaussianDesignModel {
    Vector beta0;
    Vector mu_x;
    Matrix sigma_x;
    double sigma_eps = 1.0;
    int alpha = 2;

    NoiseDensity noise() const { return NoiseDensity::with_sd(alpha, sigma_eps); }
    void validate() const;
    // eta = beta0' Sigma beta0 / sigma^2.
    double eta() const;
    // rho = 1 / (mu' Sigma^-1 mu); infinite when mu = 0.
    double rho() const;
    // Whitened cosine between beta0 and mu; zero when either vanishes.
    double zeta() const;
};

// Same model with independent uniform covariates on an axis-aligned box.
struct UniformDesignModel {
    Vector beta0;
    Vector lower;
    Vector upper;
    double sigma_eps = 1.0;
    int alpha = 2;

    NoiseDensity noise() const { return NoiseDensity::with_sd(alpha, sigma_eps); }
    void validate() const;
};

using DesignModel = std::variant<GaussianDesignModel, UniformDesignModel>;

const Vector& design_beta0(const DesignModel& model);
NoiseDensity design_noise(const DesignModel& model);
Vector design_mean(const DesignModel& model);
Matrix design_covariance(const DesignModel& model);
// E[X X'].
Matrix design_second_moment(const DesignModel& model);
void design_validate(const DesignModel& model);

struct QuadratureBudget {
    int hermite_order = 64;   // Gaussian covariate projections
    int legendre_order = 32;  // per axis, uniform covariates
    double truncation_sds = 10.0;
    double abs_tol = 1e-10;   // adaptive y-integrals
    int panels_per_noise_sd = 4;
    int panel_order = 16;

    QuadratureBudget doubled() const;
};

// Quadrature for expectations of the form E[X h(s'X)] and E[h(s'X)]:
// sum_q w[q] * xbar.row(q) * h(s[q]). For Gaussian covariates xbar holds the
// conditional mean E[X | s'X], for uniform covariates the tensor nodes.
struct ProjectedNodes {
    std::vector<double> s;
    std::vector<double> w;
    Matrix xbar;
};

ProjectedNodes project_design(const DesignModel& model, const Vector& direction,
                              const QuadratureBudget& budget = {});

// Draw n covariate rows from the model's law.
class Rng;
Matrix draw_covariates(const DesignModel& model, Eigen::Index n, Rng& rng);

} // namespace sslr
