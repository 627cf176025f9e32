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


// Synthetic samples shared by the unit tests.

#pragma once

#include "oracles.hpp"

#include <sslr/data.hpp>
#include <sslr/noise.hpp>
#include <sslr/random.hpp>

#include <cstdint>

namespace fixture {

struct Recipe {
    Eigen::Index m = 50;
    Eigen::Index n = 200;
    Eigen::VectorXd beta0 = Eigen::VectorXd::Ones(1);
    double mu_x = 0.0;
    double sd_x = 1.0;
    double noise_sd = 1.0;
    int alpha = 2;
    std::uint64_t seed = 1;
};

// Matched pairs, unmatched covariates and responses built from fresh draws.
inline sslr::SemiSupervisedSample make_sample(const Recipe& r) {
    const Eigen::Index p = r.beta0.size();
    oracle::Gaussian g(r.seed);
    sslr::Rng noise_rng(r.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto noise = sslr::NoiseDensity::with_sd(r.alpha, r.noise_sd);
    const auto draw_y = [&](const Eigen::MatrixXd& x) {
        Eigen::VectorXd y = x * r.beta0;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise.draw(noise_rng);
        return y;
    };
    const Eigen::MatrixXd mx = g.matrix(r.m, p, r.mu_x, r.sd_x);
    const Eigen::VectorXd my = draw_y(mx);
    const Eigen::MatrixXd ux = g.matrix(r.n, p, r.mu_x, r.sd_x);
    const Eigen::MatrixXd other = g.matrix(r.n, p, r.mu_x, r.sd_x);
    const Eigen::VectorXd uy = draw_y(other);
    return sslr::SemiSupervisedSample(mx, my, ux, uy);
}

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

} // namespace fixture
