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

#include "sslr/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sslr/asymptotics.hpp"
#include "sslr/data.hpp"
#include "sslr/error.hpp"
#include "sslr/estimators.hpp"
#include "sslr/random.hpp"
#include "parallel.hpp"

namespace sslr {
namespace {

constexpr int kGridSize = 15;
constexpr double kGridMaxNorm = 8.0;

struct Replication {
    bool ok = false;
    Vector ssl;
    Vector ols;
    Vector mmle;
};

Vector responses(const Matrix& x, const Vector& beta0, const NoiseDensity& noise, Rng& rng) {
    Vector y = x * beta0;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise.draw(rng);
    return y;
}

SemiSupervisedSample draw_sample(const DesignModel& model, const NoiseDensity& noise, long n, long m,
                                 Rng& rng) {
    const Vector& beta0 = design_beta0(model);
    Matrix ux = draw_covariates(model, n, rng);
    // Unmatched responses come from fresh covariates, independent of ux.
    const Matrix hidden = draw_covariates(model, n, rng);
    Vector uy = responses(hidden, beta0, noise, rng);
    Matrix mx = draw_covariates(model, m, rng);
    Vector my = responses(mx, beta0, noise, rng);
    return SemiSupervisedSample(std::move(mx), std::move(my), std::move(ux), std::move(uy));
}

Replication replicate(const SimulationSetting& s, const DesignModel& model, const NoiseDensity& noise,
                      std::uint64_t seed) {
    Replication out;
    Rng rng(seed);
    const SemiSupervisedSample sample = draw_sample(model, noise, s.n, s.m(), rng);
    OptimizerConfig cfg = s.optimizer;
    cfg.seed = derive_seed(seed, 7);
    cfg.threads = 1;
    try {
        out.ssl = fit_sslemle(sample, noise, cfg).beta;
        out.ols = fit_olse(sample).beta;
        out.mmle = noise.alpha() == 2 ? out.ols : fit_matched_mle(sample, noise, cfg).beta;
        out.ok = out.ssl.allFinite() && out.ols.allFinite() && out.mmle.allFinite();
    } catch (const Error&) {
        out.ok = false;
    }
    return out;
}

Matrix sample_covariance(const Matrix& e) {
    const Eigen::RowVectorXd mean = e.colwise().mean();
    const Matrix c = e.rowwise() - mean;
    return (c.transpose() * c) / static_cast<double>(e.rows() - 1);
}

double log_det(const Matrix& m) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "error covariance is singular");
    const double v = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    if (!std::isfinite(v)) fail(ErrorCode::NotPositiveDefinite, "error covariance is singular");
    return v;
}

double bootstrap_se(const Matrix& ssl, const Matrix& ref, int resamples, std::uint64_t seed) {
    const Eigen::Index r = ssl.rows();
    Rng rng(seed);
    std::vector<double> gains;
    Matrix bs(r, ssl.cols()), br(r, ref.cols());
    for (int b = 0; b < resamples; ++b) {
        for (Eigen::Index i = 0; i < r; ++i) {
            const auto j = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(r)));
            bs.row(i) = ssl.row(j);
            br.row(i) = ref.row(j);
        }
        try {
            gains.push_back(empirical_gain(bs, br));
        } catch (const Error&) {
        }
    }
    if (gains.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;
    for (double g : gains) mean += g;
    mean /= static_cast<double>(gains.size());
    double ss = 0.0;
    for (double g : gains) ss += (g - mean) * (g - mean);
    return std::sqrt(ss / static_cast<double>(gains.size() - 1));
}

std::string number(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

Matrix model_sigma_tilde(const DesignModel& model, double lambda) {
    if (const auto* g = std::get_if<GaussianDesignModel>(&model); g && g->alpha == 2)
        return covariances_gaussian(*g, lambda).sigma_ssl_tilde;
    const Gammas gm = gammas_numeric(model);
    const Matrix s2 = sigma2(design_noise(model), design_second_moment(model));
    return sigma_ssl(gm.gamma1, gm.gamma2, s2, lambda).sigma_ssl_tilde;
}

} // namespace

SimulationSetting SimulationSetting::table(int index, double lambda, long n) {
    if (index < 1 || index > 6) fail(ErrorCode::InvalidArgument, "setting index must be between 1 and 6");
    SimulationSetting s;
    s.index = index;
    s.lambda = lambda;
    s.n = n;
    s.noise = index >= 5 ? NoiseKind::Laplace : NoiseKind::Gaussian;
    s.covariates = index == 3 || index == 4 ? CovariateKind::Uniform : CovariateKind::Gaussian;
    s.mu_x = index % 2 == 0 ? 5.0 : 0.0;
    return s;
}

OptimizerConfig SimulationSetting::default_optimizer() {
    OptimizerConfig c;
    c.gradient_tolerance = 1e-7;
    c.max_iterations = 300;
    // The OLS warm start is already close; extra random starts only cost time.
    c.restarts = 0;
    return c;
}

long SimulationSetting::m() const { return std::lround(lambda * static_cast<double>(n)); }

NoiseDensity SimulationSetting::noise_density() const {
    return NoiseDensity::with_sd(noise == NoiseKind::Gaussian ? 2 : 1, sigma_eps);
}

DesignModel SimulationSetting::design(const Vector& beta0) const {
    const Eigen::Index p = beta0.size();
    const int alpha = noise == NoiseKind::Gaussian ? 2 : 1;
    if (covariates == CovariateKind::Gaussian) {
        GaussianDesignModel g;
        g.beta0 = beta0;
        g.mu_x = Vector::Constant(p, mu_x);
        g.sigma_x = Matrix::Identity(p, p) * (sigma_x * sigma_x);
        g.sigma_eps = sigma_eps;
        g.alpha = alpha;
        return g;
    }
    UniformDesignModel u;
    u.beta0 = beta0;
    u.lower = Vector::Constant(p, mu_x - std::sqrt(3.0) * sigma_x);
    u.upper = Vector::Constant(p, mu_x + std::sqrt(3.0) * sigma_x);
    u.sigma_eps = sigma_eps;
    u.alpha = alpha;
    return u;
}

void SimulationSetting::validate() const {
    if (index < 1) fail(ErrorCode::InvalidArgument, "setting index must be positive");
    if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps)) fail(ErrorCode::Domain, "noise sd must be positive");
    if (!(sigma_x > 0.0) || !std::isfinite(sigma_x)) fail(ErrorCode::Domain, "covariate sd must be positive");
    if (!std::isfinite(mu_x)) fail(ErrorCode::Domain, "covariate mean must be finite");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::Domain, "lambda must be positive");
    if (n < 4) fail(ErrorCode::Domain, "unmatched sample size must be at least 4");
    if (m() < 4) fail(ErrorCode::Domain, "matched sample size round(lambda n) must be at least p + 1 = 4");
    if (replications < 4) fail(ErrorCode::Domain, "replications must exceed the dimension");
    if (grid_points.empty()) fail(ErrorCode::InvalidArgument, "grid points must be non-empty");
    for (int k : grid_points)
        if (k < 1 || k > kGridSize) fail(ErrorCode::Domain, "grid points must be between 1 and 15");
    if (!(perturbation_sd >= 0.0) || !std::isfinite(perturbation_sd))
        fail(ErrorCode::Domain, "perturbation sd must be non-negative");
    if (bootstrap_resamples < 0) fail(ErrorCode::Domain, "bootstrap resamples must be non-negative");
    if (threads < 0) fail(ErrorCode::Domain, "threads must be non-negative");
    optimizer.validate();
}

std::vector<Vector> beta_grid(std::uint64_t seed, double perturbation_sd) {
    if (!(perturbation_sd >= 0.0) || !std::isfinite(perturbation_sd))
        fail(ErrorCode::Domain, "perturbation sd must be non-negative");
    const Eigen::Vector3d base(2.0, 2.0, 2.0);
    std::vector<Eigen::Vector3d> seeds{base};
    for (int c = 0; c < 8; ++c)
        seeds.push_back(base + Eigen::Vector3d(c & 1 ? 1.0 : -1.0, c & 2 ? 1.0 : -1.0, c & 4 ? 1.0 : -1.0));
    for (int axis = 0; axis < 3; ++axis)
        for (double sign : {-1.0, 1.0}) {
            Eigen::Vector3d face = base;
            face[axis] += sign;
            seeds.push_back(face);
        }

    Rng rng(seed);
    std::vector<Vector> out;
    for (int k = 0; k < kGridSize; ++k) {
        Eigen::Vector3d v = seeds[static_cast<std::size_t>(k)];
        for (int a = 0; a < 3; ++a) v[a] += perturbation_sd * rng.normal();
        out.emplace_back(v.normalized() * ((k + 1) * kGridMaxNorm / kGridSize));
    }
    return out;
}

double empirical_gain(const Matrix& errors_ssl, const Matrix& errors_ref) {
    if (errors_ssl.cols() != errors_ref.cols()) fail(ErrorCode::Shape, "error matrices differ in width");
    if (errors_ssl.rows() <= errors_ssl.cols() || errors_ref.rows() <= errors_ref.cols())
        fail(ErrorCode::Domain, "need more replications than coefficients");
    const double a = log_det(sample_covariance(errors_ssl));
    const double b = log_det(sample_covariance(errors_ref));
    return std::exp(0.5 * (b - a));
}

GainCurve run_setting(const SimulationSetting& s) {
    s.validate();
    const std::vector<Vector> grid = beta_grid(s.seed, s.perturbation_sd);
    const NoiseDensity noise = s.noise_density();
    const double root_m = std::sqrt(static_cast<double>(s.m()));

    GainCurve curve;
    curve.setting = s;
    curve.n = s.n;
    curve.m = s.m();
    for (int k : s.grid_points) {
        const Vector& beta0 = grid[static_cast<std::size_t>(k - 1)];
        const DesignModel model = s.design(beta0);
        std::vector<Replication> reps(static_cast<std::size_t>(s.replications));
        parallel_for(s.replications, s.threads, [&](int r) {
            const auto seed = derive_seed(s.seed, static_cast<std::uint64_t>(s.index),
                                          static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r));
            reps[static_cast<std::size_t>(r)] = replicate(s, model, noise, seed);
        });

        GainRow row;
        row.grid_index = k;
        row.beta0 = beta0;
        for (const auto& rep : reps) (rep.ok ? row.used : row.excluded) += 1;
        if (row.excluded * 100 >= s.replications)
            fail(ErrorCode::Simulation, "grid point " + std::to_string(k) + ": " + std::to_string(row.excluded) +
                                            " of " + std::to_string(s.replications) +
                                            " replications failed (limit is below 1%)");
        Matrix e_ssl(row.used, 3), e_ols(row.used, 3), e_mmle(row.used, 3);
        Eigen::Index i = 0;
        for (const auto& rep : reps) {
            if (!rep.ok) continue;
            e_ssl.row(i) = root_m * (rep.ssl - beta0).transpose();
            e_ols.row(i) = root_m * (rep.ols - beta0).transpose();
            e_mmle.row(i) = root_m * (rep.mmle - beta0).transpose();
            ++i;
        }
        row.gain_empirical = empirical_gain(e_ssl, e_ols);
        row.gain_vs_mmle = noise.alpha() == 2 ? row.gain_empirical : empirical_gain(e_ssl, e_mmle);
        row.mc_se = bootstrap_se(e_ssl, e_ols, s.bootstrap_resamples,
                                 derive_seed(s.seed, static_cast<std::uint64_t>(s.index),
                                             static_cast<std::uint64_t>(k), 0xB0075EEDULL, 1));
        const Matrix cov = design_covariance(model);
        row.snr = std::sqrt(beta0.dot(cov * beta0)) / s.sigma_eps;
        if (const auto* g = std::get_if<GaussianDesignModel>(&model);
            g && g->alpha == 2 && s.lambda > 0.0 && s.lambda < 1.0)
            row.gain_theoretical = gain_closed_form(*g, s.lambda).gain;
        curve.rows.push_back(std::move(row));
    }
    std::stable_sort(curve.rows.begin(), curve.rows.end(),
                     [](const GainRow& a, const GainRow& b) { return a.snr < b.snr; });
    return curve;
}

CoverageReport coverage_run(const SimulationSetting& s, int grid_point, double level) {
    s.validate();
    if (grid_point < 1 || grid_point > kGridSize) fail(ErrorCode::Domain, "grid point must be between 1 and 15");
    const std::vector<Vector> grid = beta_grid(s.seed, s.perturbation_sd);
    const Vector& beta0 = grid[static_cast<std::size_t>(grid_point - 1)];
    const DesignModel model = s.design(beta0);
    const NoiseDensity noise = s.noise_density();
    const double lambda = static_cast<double>(s.m()) / static_cast<double>(s.n);
    const Matrix sigma = model_sigma_tilde(model, lambda);

    std::vector<int> hit(static_cast<std::size_t>(s.replications), -1);
    parallel_for(s.replications, s.threads, [&](int r) {
        const auto seed = derive_seed(s.seed, static_cast<std::uint64_t>(s.index) + 100,
                                      static_cast<std::uint64_t>(grid_point), static_cast<std::uint64_t>(r));
        Rng rng(seed);
        const SemiSupervisedSample sample = draw_sample(model, noise, s.n, s.m(), rng);
        OptimizerConfig cfg = s.optimizer;
        cfg.seed = derive_seed(seed, 7);
        cfg.threads = 1;
        try {
            const RegressionFit fit = fit_sslemle(sample, noise, cfg);
            const EllipsoidReport region =
                confidence_region(fit.beta, sigma, level, static_cast<double>(s.m()));
            hit[static_cast<std::size_t>(r)] = region.contains(beta0) ? 1 : 0;
        } catch (const Error&) {
        }
    });

    CoverageReport out;
    out.replications = s.replications;
    for (int h : hit) {
        if (h < 0) ++out.excluded;
        else out.covered += h;
    }
    if (out.excluded * 100 >= s.replications)
        fail(ErrorCode::Simulation, std::to_string(out.excluded) + " of " + std::to_string(s.replications) +
                                        " coverage replications failed (limit is below 1%)");
    out.fraction = static_cast<double>(out.covered) / static_cast<double>(s.replications - out.excluded);
    return out;
}

std::string gain_curve_csv(const GainCurve& curve) {
    std::ostringstream os;
    os << "snr,gain_theoretical,gain_empirical,gain_vs_mmle,mc_se,n,m,lambda,setting_index\n";
    for (const auto& r : curve.rows)
        os << number(r.snr) << ',' << number(r.gain_theoretical) << ',' << number(r.gain_empirical) << ','
           << number(r.gain_vs_mmle) << ',' << number(r.mc_se) << ',' << curve.n << ',' << curve.m << ','
           << number(curve.setting.lambda) << ',' << curve.setting.index << '\n';
    return os.str();
}

void write_gain_curve_csv(const GainCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << gain_curve_csv(curve);
    if (!out) fail(ErrorCode::Io, "failed writing '" + path + "'");
}

} // namespace sslr
