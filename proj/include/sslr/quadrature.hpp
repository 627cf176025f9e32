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

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace sslr {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
QuadratureRule gauss_hermite(int order);

// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int order);

// Nodes and weights for E[g(Z)], Z ~ N(mean, sd^2); the weights sum to one.
QuadratureRule normal_expectation_rule(double mean, double sd, int order);

// Composite Gauss-Legendre rule on [a, b] with the given number of equal panels.
QuadratureRule composite_legendre(double a, double b, int panels, int order);

struct AdaptiveOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 4000;
};

// Globally adaptive Gauss-Kronrod (7/15) integration over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const AdaptiveOptions& options = {});

// Vector-valued variant; the error estimate is the max-norm over components.
// f writes its value into the supplied vector of length dim.
Eigen::VectorXd integrate(const std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>& f,
                          int dim, double a, double b,
                          const AdaptiveOptions& options = {});

} // namespace sslr
