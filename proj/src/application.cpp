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

#include "sslr/application.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sslr/error.hpp"
#include "sslr/estimators.hpp"
#include "sslr/random.hpp"
#include "parallel.hpp"

namespace sslr {
namespace {

struct Outcome {
    bool ok = false;
    double mse_ssl = 0.0;
    double mse_ols = 0.0;
};

double test_mse(const DataBlock& test, const Vector& beta, double intercept) {
    const Vector resid = (test.y.array() - intercept).matrix() - test.x * beta;
    return resid.squaredNorm() / static_cast<double>(resid.size());
}

std::string number(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

OptimizerConfig DataAppConfig::default_optimizer() {
    OptimizerConfig c;
    c.gradient_tolerance = 1e-7;
    c.max_iterations = 500;
    // Ten matched rows leave the likelihood fairly flat; a few restarts help.
    c.restarts = 4;
    return c;
}

void DataAppConfig::validate() const {
    if (unmatched_counts.empty()) fail(ErrorCode::InvalidArgument, "unmatched counts must be non-empty");
    for (long n : unmatched_counts)
        if (n < 1) fail(ErrorCode::Domain, "unmatched counts must be positive");
    if (matched_count < 2) fail(ErrorCode::Domain, "matched count must be at least 2");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail(ErrorCode::Domain, "train fraction must lie in (0, 1)");
    if (replications < 1) fail(ErrorCode::Domain, "replications must be positive");
    if (noise_sd && !(*noise_sd > 0.0 && std::isfinite(*noise_sd)))
        fail(ErrorCode::Domain, "noise sd must be positive");
    if (threads < 0) fail(ErrorCode::Domain, "threads must be non-negative");
    optimizer.validate();
}

DataAppResult run_data_app(const DataBlock& full, const DataAppConfig& config) {
    config.validate();
    if (!full.has_response()) fail(ErrorCode::InvalidArgument, "data set has no response column");
    if (static_cast<std::size_t>(full.x.cols()) + 1 > config.matched_count)
        fail(ErrorCode::Sizing, "matched count must exceed the number of covariates");

    DataAppResult result;
    result.prefit = ols_with_intercept(full.x, full.y);
    result.noise_sd = config.noise_sd.value_or(result.prefit.residual_sd);
    result.total_rows = static_cast<long>(full.rows());
    result.replications = config.replications;
    const NoiseDensity noise = NoiseDensity::gaussian(result.noise_sd);

    for (long n : config.unmatched_counts) {
        std::vector<Outcome> outcomes(static_cast<std::size_t>(config.replications));
        parallel_for(config.replications, config.threads, [&](int r) {
            SplitSpec split;
            split.train_fraction = config.train_fraction;
            split.matched_count = config.matched_count;
            split.unmatched_count = static_cast<std::size_t>(n);
            // Shared per replication so unmatched sets are nested across n.
            split.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
            const ProtocolDraw draw = subsample_protocol(full, split);

            Outcome& out = outcomes[static_cast<std::size_t>(r)];
            try {
                const RegressionFit ols = fit_olse(draw.sample, true);
                const StandardizedSample st = standardize(draw.sample, true);
                OptimizerConfig cfg = config.optimizer;
                cfg.seed = derive_seed(split.seed, 0x55);
                cfg.threads = 1;
                const RegressionFit ssl = fit_sslemle(st.sample, noise, cfg, true);
                const auto [beta, intercept] = st.map.to_original(ssl.beta, *ssl.intercept);
                out.mse_ssl = test_mse(draw.test, beta, intercept);
                out.mse_ols = test_mse(draw.test, ols.beta, *ols.intercept);
                out.ok = std::isfinite(out.mse_ssl) && std::isfinite(out.mse_ols) && out.mse_ols > 0.0;
            } catch (const Error&) {
                out.ok = false;
            }
        });

        DataAppRow row;
        row.n = n;
        row.m = static_cast<long>(config.matched_count);
        for (const auto& o : outcomes) {
            if (!o.ok) {
                ++row.excluded;
                continue;
            }
            ++row.used;
            if (o.mse_ssl < o.mse_ols) ++row.wins;
            row.mean_mse_ratio += o.mse_ssl / o.mse_ols;
            row.mean_mse_sslemle += o.mse_ssl;
            row.mean_mse_olse += o.mse_ols;
        }
        if (row.used == 0) fail(ErrorCode::Estimation, "every replication failed at n = " + std::to_string(n));
        const double u = row.used;
        row.win_fraction = row.wins / u;
        row.mean_mse_ratio /= u;
        row.mean_mse_sslemle /= u;
        row.mean_mse_olse /= u;
        result.rows.push_back(row);
    }
    return result;
}

std::string data_app_csv(const DataAppResult& result) {
    std::ostringstream os;
    os << "n,m,replications,used,excluded,wins,win_fraction,mean_mse_ratio,mean_mse_sslemle,mean_mse_olse,"
          "noise_sd,prefit_residual_sd,prefit_r_squared\n";
    for (const auto& r : result.rows)
        os << r.n << ',' << r.m << ',' << result.replications << ',' << r.used << ',' << r.excluded << ','
           << r.wins << ',' << number(r.win_fraction) << ',' << number(r.mean_mse_ratio) << ','
           << number(r.mean_mse_sslemle) << ',' << number(r.mean_mse_olse) << ',' << number(result.noise_sd)
           << ',' << number(result.prefit.residual_sd) << ',' << number(result.prefit.r_squared) << '\n';
    return os.str();
}

} // namespace sslr
