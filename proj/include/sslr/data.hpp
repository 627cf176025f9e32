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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sslr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Rows of covariates with an optional response column, as read from CSV.
struct DataBlock {
    std::vector<std::string> covariate_names;
    std::string response_name;
    Matrix x;
    Vector y;

    Eigen::Index rows() const { return response_name.empty() ? x.rows() : y.size(); }
    bool has_response() const { return !response_name.empty(); }
    DataBlock select(const std::vector<std::size_t>& index) const;
};

// Reads the named columns from a comma-separated file with a header row.
// An empty response name reads covariates only.
DataBlock load_csv(const std::string& path, const std::string& response_column,
                   const std::vector<std::string>& covariate_columns);

struct SemiSupervisedSample {
    Matrix matched_x;   // m x p
    Vector matched_y;   // m
    Matrix unmatched_x; // n_x x p
    Vector unmatched_y; // n_y

    SemiSupervisedSample() = default;
    SemiSupervisedSample(Matrix mx, Vector my, Matrix ux, Vector uy);

    Eigen::Index p() const;
    Eigen::Index m() const { return matched_y.size(); }
    Eigen::Index n_x() const { return unmatched_x.rows(); }
    Eigen::Index n_y() const { return unmatched_y.size(); }
    // m / n_y; infinite when there are no unmatched responses.
    double lambda_hat() const;
    // Throws a shape error on inconsistent dimensions.
    void validate() const;
};

struct SplitSpec {
    double train_fraction = 0.75;
    std::size_t matched_count = 10;
    std::size_t unmatched_count = 0;
    std::uint64_t seed = 0;
};

struct ProtocolDraw {
    SemiSupervisedSample sample;
    DataBlock test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::vector<std::size_t> matched_rows;
    std::vector<std::size_t> unmatched_rows;
};

// Random train/test split followed by disjoint matched and unmatched draws
// from the training rows. The unmatched responses are stored in an
// independently shuffled order so no pairing survives. For a fixed seed the
// split and the matched rows do not depend on the unmatched count, and the
// unmatched rows for a smaller count are a prefix of those for a larger one.
ProtocolDraw subsample_protocol(const DataBlock& full, const SplitSpec& spec);

// Affine map between original and standardized units.
struct Standardization {
    Vector x_mean;  // zero when not centered
    Vector x_scale;
    double y_shift = 0.0;
    bool centered = true;

    Matrix apply_x(const Matrix& x) const;
    Matrix restore_x(const Matrix& x) const;
    Vector apply_y(const Vector& y) const;
    Vector restore_y(const Vector& y) const;
    // Coefficients (slopes, intercept) between the two parameterizations.
    std::pair<Vector, double> to_original(const Vector& beta, double intercept) const;
    std::pair<Vector, double> to_standard(const Vector& beta, double intercept) const;
};

struct StandardizedSample {
    SemiSupervisedSample sample;
    Standardization map;
};

// Scales every covariate column to unit sample standard deviation over all
// covariate rows. With center = true covariates are also centered and the
// responses shifted by their pooled mean; that map is only coefficient
// preserving for models with an intercept.
StandardizedSample standardize(const SemiSupervisedSample& sample, bool center = true);

// Ordinary least squares residual standard deviation and R^2 of a full data
// block fitted with an intercept.
struct OlsSummary {
    Vector beta;
    double intercept = 0.0;
    double residual_sd = 0.0;
    double r_squared = 0.0;
};
OlsSummary ols_with_intercept(const Matrix& x, const Vector& y);

} // namespace sslr
