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
#include <limits>
#include <string>
#include <vector>

#include "sslr/models.hpp"
#include "sslr/optimize.hpp"

namespace sslr {

enum class NoiseKind { Gaussian, Laplace };
enum class CovariateKind { Gaussian, Uniform };

struct SimulationSetting {
    int index = 1;
    NoiseKind noise = NoiseKind::Gaussian;
    double sigma_eps = 0.8 * 3.1622776601683795;
    CovariateKind covariates = CovariateKind::Gaussian;
    double mu_x = 0.0;      // every covariate has this mean
    double sigma_x = 1.0;   // and this standard deviation
    double lambda = 0.2;
    long n = 5000;
    int replications = 500;
    // 1-based positions in the 15-point beta grid.
    std::vector<int> grid_points{3, 6, 9, 12, 15};
    std::uint64_t seed = 1;
    int threads = 1;
    double perturbation_sd = 0.1;
    int bootstrap_resamples = 200;
    OptimizerConfig optimizer = default_optimizer();

    // One of the six reference settings (noise, covariate law, mean).
    static SimulationSetting table(int index, double lambda, long n);
    static OptimizerConfig default_optimizer();

    long m() const;
    NoiseDensity noise_density() const;
    DesignModel design(const Vector& beta0) const;
    void validate() const;
};

struct GainRow {
    int grid_index = 0;
    Vector beta0;
    double snr = 0.0;
    double gain_theoretical = std::numeric_limits<double>::quiet_NaN();
    double gain_empirical = 0.0;  // against OLSE
    double gain_vs_mmle = 0.0;    // against the matched MLE
    double mc_se = 0.0;           // bootstrap standard error of gain_empirical
    int used = 0;
    int excluded = 0;
};

struct GainCurve {
    SimulationSetting setting;
    long n = 0;
    long m = 0;
    std::vector<GainRow> rows; // ascending snr
};

// 15 regression vectors in R^3 with norms k * 8 / 15, k = 1..15.
std::vector<Vector> beta_grid(std::uint64_t seed, double perturbation_sd = 0.1);

// (sqrt(det S_ssl / det S_ref))^{-1} from sample covariances of the rows.
double empirical_gain(const Matrix& errors_ssl, const Matrix& errors_ref);

GainCurve run_setting(const SimulationSetting& setting);

struct CoverageReport {
    int replications = 0;
    int covered = 0;
    int excluded = 0;
    double fraction = 0.0;
};

// Share of replications whose SSLEMLE ellipsoid, built from the model's
// asymptotic covariance, contains the true vector. Gaussian settings only.
CoverageReport coverage_run(const SimulationSetting& setting, int grid_point, double level);

std::string gain_curve_csv(const GainCurve& curve);
void write_gain_curve_csv(const GainCurve& curve, const std::string& path);

} // namespace sslr
