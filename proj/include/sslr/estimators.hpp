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

#include <optional>
#include <string>

#include "sslr/data.hpp"
#include "sslr/error.hpp"
#include "sslr/likelihood.hpp"
#include "sslr/noise.hpp"
#include "sslr/optimize.hpp"

namespace sslr {

enum class Method { SSLEMLE, MatchedMLE, OLSE, DLSE, LogisticSSLEMLE };

const char* method_name(Method method);

// Raised when no restart converges; carries the best run's diagnostics.
class EstimationError : public Error {
public:
    EstimationError(const std::string& what, OptimResult diagnostics)
        : Error(ErrorCode::Estimation, what), diagnostics_(std::move(diagnostics)) {}
    const OptimResult& diagnostics() const { return diagnostics_; }

private:
    OptimResult diagnostics_;
};

struct RegressionFit {
    Method method = Method::SSLEMLE;
    Vector beta;
    std::optional<double> intercept;
    OptimResult diagnostics;
    double lambda_hat = 0.0;
    // Set by the logistic fit when the matched sample is perfectly separable.
    bool separation_warning = false;
};

// Maximizes the empirical log-likelihood inside the existence ball. Uses the
// smooth path for alpha >= 2 and Nelder-Mead for alpha = 1.
RegressionFit fit_sslemle(const SemiSupervisedSample& sample, const NoiseDensity& noise,
                          const OptimizerConfig& config, bool with_intercept = false);

// Maximizes the matched-only log-likelihood.
RegressionFit fit_matched_mle(const SemiSupervisedSample& sample, const NoiseDensity& noise,
                              const OptimizerConfig& config, bool with_intercept = false);

// Least squares on the matched sample via column-pivoted QR.
RegressionFit fit_olse(const SemiSupervisedSample& sample, bool with_intercept = false);

// Deconvolution least squares from the unmatched sample alone.
double dlse_criterion(const Matrix& unmatched_x, const Vector& sorted_y, const NoiseDensity& noise,
                      const Vector& beta);
RegressionFit fit_dlse(const Matrix& unmatched_x, const Vector& unmatched_y, const NoiseDensity& noise,
                       const OptimizerConfig& config);

// Binary responses with a logistic link. The objective is
//   (1/(n+m)) [sum_j (y_j log pbar + (1 - y_j) log(1 - pbar)) + sum_k log-lik_k],
// where pbar is the mean success probability over the unmatched covariates.
ValueGradient logistic_objective(const SemiSupervisedSample& sample, const Vector& beta);
RegressionFit fit_logistic_sslemle(const SemiSupervisedSample& sample, const OptimizerConfig& config,
                                   double search_radius = 50.0);
// Matched-only logistic MLE inside the same ball.
RegressionFit fit_logistic_matched(const SemiSupervisedSample& sample, const OptimizerConfig& config,
                                   double search_radius = 50.0);

} // namespace sslr
