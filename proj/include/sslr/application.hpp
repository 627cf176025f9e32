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
#include <optional>
#include <string>
#include <vector>

#include "sslr/data.hpp"
#include "sslr/optimize.hpp"

namespace sslr {

// Repeated train/test protocol on a real data set: a small matched sample,
// growing unmatched samples, SSLEMLE against OLSE on held-out rows.
struct DataAppConfig {
    std::vector<long> unmatched_counts{50, 100, 200, 400, 800, 1600};
    std::size_t matched_count = 10;
    double train_fraction = 0.75;
    int replications = 100;
    std::uint64_t seed = 0;
    // Gaussian noise sd; the full-data OLS residual sd when empty.
    std::optional<double> noise_sd;
    int threads = 1;
    OptimizerConfig optimizer = default_optimizer();

    static OptimizerConfig default_optimizer();
    void validate() const;
};

struct DataAppRow {
    long n = 0;
    long m = 0;
    int used = 0;
    int excluded = 0;
    int wins = 0; // replications with SSLEMLE test MSE below OLSE
    double win_fraction = 0.0;
    double mean_mse_ratio = 0.0; // mean of SSLEMLE MSE / OLSE MSE
    double mean_mse_sslemle = 0.0;
    double mean_mse_olse = 0.0;
};

struct DataAppResult {
    OlsSummary prefit;
    double noise_sd = 0.0;
    long total_rows = 0;
    int replications = 0;
    std::vector<DataAppRow> rows;
};

DataAppResult run_data_app(const DataBlock& full, const DataAppConfig& config);

std::string data_app_csv(const DataAppResult& result);

} // namespace sslr
