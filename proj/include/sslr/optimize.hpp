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

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace sslr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct OptimizerConfig {
    double gradient_tolerance = 1e-8;
    int max_iterations = 500;
    int restarts = 8;
    double search_radius = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct OptimResult {
    Vector argmax;
    double value = -std::numeric_limits<double>::infinity();
    // Projected gradient norm (smooth path) or final simplex diameter.
    double gradient_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    int restart_index = 0;
    int evaluations = 0;
    // Accepted objective values of the returned run.
    std::vector<double> trace;
};

struct ValueGradient {
    double value;
    Vector gradient;
};

using SmoothObjective = std::function<ValueGradient(const Vector&)>;
using ValueObjective = std::function<double(const Vector&)>;
// Hessian of the objective; used only to seed the quasi-Newton metric.
using CurvatureFunction = std::function<Matrix(const Vector&)>;

// Start points: the warm start, then config.restarts uniform draws in the
// search ball (or in a ball of radius max(1, 2|warm|) if the radius is infinite).
std::vector<Vector> start_points(const Vector& warm_start, const OptimizerConfig& config);

// BFGS ascent with projected backtracking line search, multi-started.
OptimResult maximize_smooth(const SmoothObjective& objective, const Vector& warm_start,
                            const OptimizerConfig& config, const CurvatureFunction& curvature = {});

// Adaptive Nelder-Mead, restarted from its best vertex, multi-started.
OptimResult maximize_derivative_free(const ValueObjective& objective, const Vector& warm_start,
                                     const OptimizerConfig& config);

struct Box {
    Vector lower;
    Vector upper;
};

// Exhaustive search on a uniform grid (endpoints included) followed by one
// pass at half spacing around the incumbent. Ties keep the lowest index.
OptimResult grid_oracle(const ValueObjective& objective, const Box& box, int resolution);

} // namespace sslr
