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

#include "sslr/sslr.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "sslr/application.hpp"
#include "sslr/asymptotics.hpp"
#include "sslr/data.hpp"
#include "sslr/error.hpp"
#include "sslr/estimators.hpp"
#include "sslr/likelihood.hpp"
#include "sslr/montecarlo.hpp"
#include "sslr/noise.hpp"
#include "sslr/random.hpp"

struct sslr_noise {
    sslr::NoiseDensity impl;
};

struct sslr_dataset {
    sslr::DataBlock impl;
};

struct sslr_sample {
    sslr::SemiSupervisedSample impl;
};

struct sslr_fit {
    sslr::RegressionFit impl;
};

struct sslr_ellipsoid {
    sslr::EllipsoidReport impl;
};

struct sslr_gain_curve {
    sslr::GainCurve impl;
    std::string csv;
};

struct sslr_data_app {
    sslr::DataAppResult impl;
    std::string csv;
};

namespace {

thread_local std::string last_error;

struct BufferTooSmall {};

sslr_status set_error(sslr_status status, const char* what) {
    last_error = what;
    return status;
}

template <class F>
sslr_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return SSLR_OK;
    } catch (const sslr::Error& e) {
        return set_error(static_cast<sslr_status>(e.code()), e.what());
    } catch (const BufferTooSmall&) {
        return set_error(SSLR_BUFFER_TOO_SMALL, "output buffer is too small");
    } catch (const std::bad_alloc&) {
        return set_error(SSLR_OUT_OF_MEMORY, "out of memory");
    } catch (const std::exception& e) {
        return set_error(SSLR_INTERNAL, e.what());
    } catch (...) {
        return set_error(SSLR_INTERNAL, "unknown failure");
    }
}

void need(const void* ptr, const char* name) {
    if (ptr == nullptr) sslr::fail(sslr::ErrorCode::InvalidArgument, std::string(name) + " must not be null");
}

sslr::Matrix row_major(const double* data, std::size_t rows, std::size_t cols) {
    sslr::Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
    return out;
}

sslr::Vector vec(const double* data, std::size_t n) {
    sslr::Vector out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = data[i];
    return out;
}

sslr::OptimizerConfig to_config(const sslr_optimizer_options* o) {
    sslr::OptimizerConfig c;
    if (o == nullptr) return c;
    c.gradient_tolerance = o->gradient_tolerance;
    c.max_iterations = o->max_iterations;
    c.restarts = o->restarts;
    c.search_radius = o->search_radius > 0.0 ? o->search_radius : std::numeric_limits<double>::infinity();
    c.seed = o->seed;
    c.threads = o->threads;
    c.validate();
    return c;
}

sslr::GaussianDesignModel to_model(const sslr_gaussian_model* m) {
    need(m, "model");
    if (m->p == 0) sslr::fail(sslr::ErrorCode::Shape, "model dimension must be positive");
    need(m->beta0, "beta0");
    need(m->mu_x, "mu_x");
    need(m->sigma_x, "sigma_x");
    sslr::GaussianDesignModel g;
    g.beta0 = vec(m->beta0, m->p);
    g.mu_x = vec(m->mu_x, m->p);
    g.sigma_x = row_major(m->sigma_x, m->p, m->p);
    g.sigma_eps = m->sigma_eps;
    g.alpha = m->alpha;
    g.validate();
    return g;
}

void fill(const sslr::GainReport& r, sslr_gain_report* out) {
    out->gain = r.gain;
    out->lambda = r.lambda;
    out->eta = r.eta;
    out->zeta = r.zeta;
    out->rho = r.rho;
    out->centered = r.centered ? 1 : 0;
}

sslr::SimulationSetting to_setting(const sslr_simulation_options* o) {
    need(o, "options");
    sslr::SimulationSetting s = sslr::SimulationSetting::table(o->setting_index, o->lambda, o->n);
    s.replications = o->replications;
    if (o->grid_points != nullptr) s.grid_points.assign(o->grid_points, o->grid_points + o->grid_count);
    s.seed = o->seed;
    s.threads = o->threads;
    if (!std::isnan(o->sigma_eps)) s.sigma_eps = o->sigma_eps;
    if (!std::isnan(o->mu_x)) s.mu_x = o->mu_x;
    s.perturbation_sd = o->perturbation_sd;
    s.bootstrap_resamples = o->bootstrap_resamples;
    s.validate();
    return s;
}

void copy_text(const std::string& text, char* buffer, std::size_t capacity, std::size_t* needed) {
    if (needed != nullptr) *needed = text.size() + 1;
    if (buffer == nullptr && capacity == 0) return;
    need(buffer, "buffer");
    if (capacity < text.size() + 1) throw BufferTooSmall{};
    std::memcpy(buffer, text.c_str(), text.size() + 1);
}

} // namespace

extern "C" {

const char* sslr_version(void) { return "0.1.0"; }

const char* sslr_status_name(sslr_status status) {
    switch (status) {
    case SSLR_OK: return "ok";
    case SSLR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case SSLR_OUT_OF_MEMORY: return "out_of_memory";
    case SSLR_INTERNAL: return "internal";
    default: break;
    }
    if (status >= SSLR_INVALID_ARGUMENT && status <= SSLR_SIMULATION)
        return sslr::error_code_name(static_cast<sslr::ErrorCode>(status));
    return "unknown";
}

const char* sslr_last_error(void) { return last_error.c_str(); }

sslr_status sslr_noise_create(int alpha, double d, sslr_noise** out) {
    return guarded([&] {
        need(out, "out");
        *out = new sslr_noise{sslr::NoiseDensity(alpha, d)};
    });
}

sslr_status sslr_noise_create_sd(int alpha, double sd, sslr_noise** out) {
    return guarded([&] {
        need(out, "out");
        *out = new sslr_noise{sslr::NoiseDensity::with_sd(alpha, sd)};
    });
}

void sslr_noise_destroy(sslr_noise* noise) { delete noise; }

sslr_status sslr_noise_params(const sslr_noise* noise, int* alpha, double* d, double* c_alpha) {
    return guarded([&] {
        need(noise, "noise");
        if (alpha) *alpha = noise->impl.alpha();
        if (d) *d = noise->impl.d();
        if (c_alpha) *c_alpha = noise->impl.c_alpha();
    });
}

sslr_status sslr_noise_evaluate(const sslr_noise* noise, double t, int order, double* out) {
    return guarded([&] {
        need(noise, "noise");
        need(out, "out");
        *out = noise->impl.evaluate(t, order);
    });
}

sslr_status sslr_noise_cdf(const sslr_noise* noise, double t, double* out) {
    return guarded([&] {
        need(noise, "noise");
        need(out, "out");
        *out = noise->impl.cdf(t);
    });
}

sslr_status sslr_noise_fisher_integral(const sslr_noise* noise, double* out) {
    return guarded([&] {
        need(noise, "noise");
        need(out, "out");
        *out = noise->impl.fisher_integral();
    });
}

sslr_status sslr_noise_sample(const sslr_noise* noise, uint64_t seed, size_t count, double* out) {
    return guarded([&] {
        need(noise, "noise");
        need(out, "out");
        sslr::Rng rng(seed);
        const auto draws = noise->impl.sample(rng, count);
        std::memcpy(out, draws.data(), draws.size() * sizeof(double));
    });
}

sslr_status sslr_dataset_load_csv(const char* path, const char* response, const char* const* covariates,
                                  size_t covariate_count, sslr_dataset** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        if (covariate_count > 0) need(covariates, "covariates");
        std::vector<std::string> names;
        for (size_t i = 0; i < covariate_count; ++i) {
            need(covariates[i], "covariate name");
            names.emplace_back(covariates[i]);
        }
        *out = new sslr_dataset{sslr::load_csv(path, response ? response : "", names)};
    });
}

void sslr_dataset_destroy(sslr_dataset* data) { delete data; }

sslr_status sslr_dataset_shape(const sslr_dataset* data, size_t* rows, size_t* cols, int* has_response) {
    return guarded([&] {
        need(data, "data");
        if (rows) *rows = static_cast<size_t>(data->impl.rows());
        if (cols) *cols = static_cast<size_t>(data->impl.x.cols());
        if (has_response) *has_response = data->impl.has_response() ? 1 : 0;
    });
}

sslr_status sslr_dataset_copy(const sslr_dataset* data, double* x, double* y) {
    return guarded([&] {
        need(data, "data");
        const auto& b = data->impl;
        if (x) {
            for (Eigen::Index i = 0; i < b.x.rows(); ++i)
                for (Eigen::Index j = 0; j < b.x.cols(); ++j) x[i * b.x.cols() + j] = b.x(i, j);
        }
        if (y) {
            if (!b.has_response()) sslr::fail(sslr::ErrorCode::InvalidArgument, "data set has no response column");
            for (Eigen::Index i = 0; i < b.y.size(); ++i) y[i] = b.y[i];
        }
    });
}

sslr_status sslr_dataset_ols(const sslr_dataset* data, double* beta, double* intercept, double* residual_sd,
                             double* r_squared) {
    return guarded([&] {
        need(data, "data");
        if (!data->impl.has_response()) sslr::fail(sslr::ErrorCode::InvalidArgument, "data set has no response column");
        const sslr::OlsSummary s = sslr::ols_with_intercept(data->impl.x, data->impl.y);
        if (beta)
            for (Eigen::Index i = 0; i < s.beta.size(); ++i) beta[i] = s.beta[i];
        if (intercept) *intercept = s.intercept;
        if (residual_sd) *residual_sd = s.residual_sd;
        if (r_squared) *r_squared = s.r_squared;
    });
}

sslr_status sslr_sample_create(size_t p, const double* matched_x, const double* matched_y, size_t m,
                               const double* unmatched_x, size_t n_x, const double* unmatched_y, size_t n_y,
                               sslr_sample** out) {
    return guarded([&] {
        need(out, "out");
        if (p == 0) sslr::fail(sslr::ErrorCode::Shape, "dimension must be positive");
        if (m > 0) {
            need(matched_x, "matched_x");
            need(matched_y, "matched_y");
        }
        if (n_x > 0) need(unmatched_x, "unmatched_x");
        if (n_y > 0) need(unmatched_y, "unmatched_y");
        sslr::SemiSupervisedSample s(m ? row_major(matched_x, m, p) : sslr::Matrix(0, static_cast<Eigen::Index>(p)),
                                     m ? vec(matched_y, m) : sslr::Vector(0),
                                     n_x ? row_major(unmatched_x, n_x, p) : sslr::Matrix(0, static_cast<Eigen::Index>(p)),
                                     n_y ? vec(unmatched_y, n_y) : sslr::Vector(0));
        *out = new sslr_sample{std::move(s)};
    });
}

void sslr_sample_destroy(sslr_sample* sample) { delete sample; }

sslr_status sslr_sample_dims(const sslr_sample* sample, size_t* p, size_t* m, size_t* n_x, size_t* n_y) {
    return guarded([&] {
        need(sample, "sample");
        const auto& s = sample->impl;
        if (p) *p = static_cast<size_t>(s.p());
        if (m) *m = static_cast<size_t>(s.m());
        if (n_x) *n_x = static_cast<size_t>(s.n_x());
        if (n_y) *n_y = static_cast<size_t>(s.n_y());
    });
}

sslr_status sslr_loglik(const sslr_sample* sample, const sslr_noise* noise, const double* beta, double* value,
                        double* score) {
    return guarded([&] {
        need(sample, "sample");
        need(noise, "noise");
        need(beta, "beta");
        const sslr::LikelihoodContext ctx(sample->impl, noise->impl);
        const sslr::Vector b = vec(beta, static_cast<size_t>(ctx.p()));
        const auto ev = sslr::evaluate(ctx, b, score ? sslr::Derivatives::Gradient : sslr::Derivatives::None);
        if (value) *value = ev.value;
        if (score)
            for (Eigen::Index i = 0; i < ev.gradient.size(); ++i) score[i] = ev.gradient[i];
    });
}

sslr_status sslr_existence_radius(const sslr_sample* sample, const sslr_noise* noise, int with_intercept,
                                  double* radius, double* a_star) {
    return guarded([&] {
        need(sample, "sample");
        need(noise, "noise");
        const sslr::LikelihoodContext ctx(sample->impl, noise->impl);
        const auto cert = sslr::existence_radius(ctx, with_intercept != 0);
        if (radius) *radius = cert.radius;
        if (a_star) *a_star = cert.a_star;
    });
}

void sslr_optimizer_options_default(sslr_optimizer_options* options) {
    if (options == nullptr) return;
    const sslr::OptimizerConfig c;
    options->gradient_tolerance = c.gradient_tolerance;
    options->max_iterations = c.max_iterations;
    options->restarts = c.restarts;
    options->search_radius = 0.0;
    options->seed = c.seed;
    options->threads = c.threads;
}

const char* sslr_method_name(sslr_method method) {
    switch (method) {
    case SSLR_METHOD_SSLEMLE: return "sslemle";
    case SSLR_METHOD_MATCHED_MLE: return "matched_mle";
    case SSLR_METHOD_OLSE: return "olse";
    case SSLR_METHOD_DLSE: return "dlse";
    case SSLR_METHOD_LOGISTIC_SSLEMLE: return "logistic_sslemle";
    case SSLR_METHOD_LOGISTIC_MATCHED: return "logistic_matched";
    }
    return "unknown";
}

sslr_status sslr_fit_estimate(const sslr_sample* sample, const sslr_noise* noise, sslr_method method,
                              const sslr_optimizer_options* options, int with_intercept, sslr_fit** out) {
    return guarded([&] {
        need(sample, "sample");
        need(out, "out");
        const sslr::OptimizerConfig cfg = to_config(options);
        const bool icpt = with_intercept != 0;
        const auto& s = sample->impl;
        auto require_noise = [&] { need(noise, "noise"); };
        auto no_intercept = [&] {
            if (icpt) sslr::fail(sslr::ErrorCode::Unsupported, "this method does not fit an intercept");
        };
        sslr::RegressionFit fit;
        switch (method) {
        case SSLR_METHOD_SSLEMLE:
            require_noise();
            fit = sslr::fit_sslemle(s, noise->impl, cfg, icpt);
            break;
        case SSLR_METHOD_MATCHED_MLE:
            require_noise();
            fit = sslr::fit_matched_mle(s, noise->impl, cfg, icpt);
            break;
        case SSLR_METHOD_OLSE:
            fit = sslr::fit_olse(s, icpt);
            break;
        case SSLR_METHOD_DLSE:
            require_noise();
            no_intercept();
            fit = sslr::fit_dlse(s.unmatched_x, s.unmatched_y, noise->impl, cfg);
            break;
        case SSLR_METHOD_LOGISTIC_SSLEMLE:
            no_intercept();
            fit = sslr::fit_logistic_sslemle(s, cfg);
            break;
        case SSLR_METHOD_LOGISTIC_MATCHED:
            no_intercept();
            fit = sslr::fit_logistic_matched(s, cfg);
            break;
        default:
            sslr::fail(sslr::ErrorCode::InvalidArgument, "unknown method");
        }
        *out = new sslr_fit{std::move(fit)};
    });
}

void sslr_fit_destroy(sslr_fit* fit) { delete fit; }

sslr_status sslr_fit_coefficients(const sslr_fit* fit, double* beta, size_t capacity, size_t* p) {
    return guarded([&] {
        need(fit, "fit");
        const auto n = static_cast<size_t>(fit->impl.beta.size());
        if (p) *p = n;
        if (beta == nullptr) return;
        if (capacity < n) throw BufferTooSmall{};
        for (size_t i = 0; i < n; ++i) beta[i] = fit->impl.beta[static_cast<Eigen::Index>(i)];
    });
}

sslr_status sslr_fit_intercept(const sslr_fit* fit, int* has_intercept, double* value) {
    return guarded([&] {
        need(fit, "fit");
        if (has_intercept) *has_intercept = fit->impl.intercept.has_value() ? 1 : 0;
        if (value) *value = fit->impl.intercept.value_or(0.0);
    });
}

sslr_status sslr_fit_get_diagnostics(const sslr_fit* fit, sslr_fit_diagnostics* out) {
    return guarded([&] {
        need(fit, "fit");
        need(out, "out");
        const auto& d = fit->impl.diagnostics;
        out->value = d.value;
        out->gradient_norm = d.gradient_norm;
        out->iterations = d.iterations;
        out->converged = d.converged ? 1 : 0;
        out->restart_index = d.restart_index;
        out->evaluations = d.evaluations;
        out->lambda_hat = fit->impl.lambda_hat;
        out->separation_warning = fit->impl.separation_warning ? 1 : 0;
    });
}

sslr_status sslr_fit_confidence_region(const sslr_fit* fit, const sslr_sample* sample, const sslr_noise* noise,
                                       double level, sslr_ellipsoid** out) {
    return guarded([&] {
        need(fit, "fit");
        need(sample, "sample");
        need(noise, "noise");
        need(out, "out");
        if (fit->impl.intercept)
            sslr::fail(sslr::ErrorCode::Unsupported, "confidence regions are available for fits without intercept");
        const auto cov = sslr::plugin_covariances(sample->impl, fit->impl.beta, noise->impl);
        const bool matched_only = fit->impl.method != sslr::Method::SSLEMLE;
        const sslr::Matrix& sigma = matched_only ? cov.sigma_mmle : cov.sigma_ssl_tilde;
        *out = new sslr_ellipsoid{sslr::confidence_region(fit->impl.beta, sigma, level,
                                                          static_cast<double>(sample->impl.m()))};
    });
}

sslr_status sslr_confidence_region(size_t p, const double* center, const double* covariance, double level,
                                   double matched_count, sslr_ellipsoid** out) {
    return guarded([&] {
        need(center, "center");
        need(covariance, "covariance");
        need(out, "out");
        if (p == 0) sslr::fail(sslr::ErrorCode::Shape, "dimension must be positive");
        *out = new sslr_ellipsoid{
            sslr::confidence_region(vec(center, p), row_major(covariance, p, p), level, matched_count)};
    });
}

void sslr_ellipsoid_destroy(sslr_ellipsoid* region) { delete region; }

sslr_status sslr_ellipsoid_get(const sslr_ellipsoid* region, size_t* p, double* quantile, double* volume,
                               double* semi_axes, double* axes) {
    return guarded([&] {
        need(region, "region");
        const auto& r = region->impl;
        const Eigen::Index k = r.center.size();
        if (p) *p = static_cast<size_t>(k);
        if (quantile) *quantile = r.quantile;
        if (volume) *volume = r.volume;
        if (semi_axes)
            for (Eigen::Index i = 0; i < k; ++i) semi_axes[i] = r.semi_axes[i];
        if (axes)
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j) axes[i * k + j] = r.axes(j, i);
    });
}

sslr_status sslr_ellipsoid_contains(const sslr_ellipsoid* region, const double* beta, int* inside) {
    return guarded([&] {
        need(region, "region");
        need(beta, "beta");
        need(inside, "inside");
        *inside = region->impl.contains(vec(beta, static_cast<size_t>(region->impl.center.size()))) ? 1 : 0;
    });
}

sslr_status sslr_gain_closed_form(const sslr_gaussian_model* model, double lambda, sslr_gain_report* out) {
    return guarded([&] {
        need(out, "out");
        fill(sslr::gain_closed_form(to_model(model), lambda), out);
    });
}

sslr_status sslr_gain_matrix_path(const sslr_gaussian_model* model, double lambda, int numeric,
                                  sslr_gain_report* out) {
    return guarded([&] {
        need(out, "out");
        const sslr::GaussianDesignModel g = to_model(model);
        const sslr::Gammas gm = numeric ? sslr::gammas_numeric(g) : sslr::gammas_gaussian(g);
        const auto cov = sslr::sigma_ssl(gm.gamma1, gm.gamma2, sslr::sigma2(g.noise(), sslr::design_second_moment(g)),
                                         lambda);
        sslr::GainReport r = sslr::gain_generic(cov);
        r.eta = g.eta();
        r.rho = g.rho();
        r.zeta = g.zeta();
        r.centered = std::isinf(r.rho);
        fill(r, out);
    });
}

sslr_status sslr_gain_analysis(double lambda, sslr_unimodality* out) {
    return guarded([&] {
        need(out, "out");
        const auto r = sslr::gain_analysis(lambda);
        out->lambda = r.lambda;
        out->eta_root = r.eta_root;
        out->gain_at_root = r.gain_at_root;
        out->small_lambda_eta_star = r.small_lambda_eta_star;
        out->small_lambda_coefficient = r.small_lambda_coefficient;
        out->samples = r.samples;
        out->sign_violations = r.sign_violations;
    });
}

void sslr_simulation_options_default(sslr_simulation_options* options) {
    if (options == nullptr) return;
    const sslr::SimulationSetting s;
    options->setting_index = s.index;
    options->lambda = s.lambda;
    options->n = s.n;
    options->replications = s.replications;
    options->grid_points = nullptr;
    options->grid_count = 0;
    options->seed = s.seed;
    options->threads = s.threads;
    options->sigma_eps = std::numeric_limits<double>::quiet_NaN();
    options->mu_x = std::numeric_limits<double>::quiet_NaN();
    options->perturbation_sd = s.perturbation_sd;
    options->bootstrap_resamples = s.bootstrap_resamples;
}

sslr_status sslr_simulate(const sslr_simulation_options* options, sslr_gain_curve** out) {
    return guarded([&] {
        need(out, "out");
        auto curve = sslr::run_setting(to_setting(options));
        std::string csv = sslr::gain_curve_csv(curve);
        *out = new sslr_gain_curve{std::move(curve), std::move(csv)};
    });
}

void sslr_gain_curve_destroy(sslr_gain_curve* curve) { delete curve; }

sslr_status sslr_gain_curve_size(const sslr_gain_curve* curve, size_t* rows, long* n, long* m) {
    return guarded([&] {
        need(curve, "curve");
        if (rows) *rows = curve->impl.rows.size();
        if (n) *n = curve->impl.n;
        if (m) *m = curve->impl.m;
    });
}

sslr_status sslr_gain_curve_row(const sslr_gain_curve* curve, size_t index, sslr_gain_row* out) {
    return guarded([&] {
        need(curve, "curve");
        need(out, "out");
        if (index >= curve->impl.rows.size()) sslr::fail(sslr::ErrorCode::Domain, "row index out of range");
        const auto& r = curve->impl.rows[index];
        out->grid_index = r.grid_index;
        for (int i = 0; i < 3; ++i) out->beta0[i] = r.beta0[i];
        out->snr = r.snr;
        out->gain_theoretical = r.gain_theoretical;
        out->gain_empirical = r.gain_empirical;
        out->gain_vs_mmle = r.gain_vs_mmle;
        out->mc_se = r.mc_se;
        out->used = r.used;
        out->excluded = r.excluded;
    });
}

sslr_status sslr_gain_curve_csv(const sslr_gain_curve* curve, char* buffer, size_t capacity, size_t* needed) {
    return guarded([&] {
        need(curve, "curve");
        copy_text(curve->csv, buffer, capacity, needed);
    });
}

sslr_status sslr_coverage(const sslr_simulation_options* options, int grid_point, double level,
                          sslr_coverage_report* out) {
    return guarded([&] {
        need(out, "out");
        const auto r = sslr::coverage_run(to_setting(options), grid_point, level);
        out->replications = r.replications;
        out->covered = r.covered;
        out->excluded = r.excluded;
        out->fraction = r.fraction;
    });
}

void sslr_data_app_options_default(sslr_data_app_options* options) {
    if (options == nullptr) return;
    const sslr::DataAppConfig c;
    options->unmatched_counts = nullptr;
    options->count_len = 0;
    options->matched_count = c.matched_count;
    options->train_fraction = c.train_fraction;
    options->replications = c.replications;
    options->seed = c.seed;
    options->noise_sd = std::numeric_limits<double>::quiet_NaN();
    options->threads = c.threads;
    options->restarts = c.optimizer.restarts;
}

sslr_status sslr_data_app_run(const sslr_dataset* data, const sslr_data_app_options* options, sslr_data_app** out) {
    return guarded([&] {
        need(data, "data");
        need(options, "options");
        need(out, "out");
        sslr::DataAppConfig c;
        if (options->unmatched_counts != nullptr)
            c.unmatched_counts.assign(options->unmatched_counts, options->unmatched_counts + options->count_len);
        c.matched_count = options->matched_count;
        c.train_fraction = options->train_fraction;
        c.replications = options->replications;
        c.seed = options->seed;
        if (!std::isnan(options->noise_sd)) c.noise_sd = options->noise_sd;
        c.threads = options->threads;
        c.optimizer.restarts = options->restarts;
        auto result = sslr::run_data_app(data->impl, c);
        std::string csv = sslr::data_app_csv(result);
        *out = new sslr_data_app{std::move(result), std::move(csv)};
    });
}

void sslr_data_app_destroy(sslr_data_app* result) { delete result; }

sslr_status sslr_data_app_prefit(const sslr_data_app* result, double* residual_sd, double* r_squared,
                                 double* noise_sd) {
    return guarded([&] {
        need(result, "result");
        if (residual_sd) *residual_sd = result->impl.prefit.residual_sd;
        if (r_squared) *r_squared = result->impl.prefit.r_squared;
        if (noise_sd) *noise_sd = result->impl.noise_sd;
    });
}

sslr_status sslr_data_app_size(const sslr_data_app* result, size_t* rows) {
    return guarded([&] {
        need(result, "result");
        need(rows, "rows");
        *rows = result->impl.rows.size();
    });
}

sslr_status sslr_data_app_row_get(const sslr_data_app* result, size_t index, sslr_data_app_row* out) {
    return guarded([&] {
        need(result, "result");
        need(out, "out");
        if (index >= result->impl.rows.size()) sslr::fail(sslr::ErrorCode::Domain, "row index out of range");
        const auto& r = result->impl.rows[index];
        out->n = r.n;
        out->m = r.m;
        out->used = r.used;
        out->excluded = r.excluded;
        out->wins = r.wins;
        out->win_fraction = r.win_fraction;
        out->mean_mse_ratio = r.mean_mse_ratio;
        out->mean_mse_sslemle = r.mean_mse_sslemle;
        out->mean_mse_olse = r.mean_mse_olse;
    });
}

sslr_status sslr_data_app_csv(const sslr_data_app* result, char* buffer, size_t capacity, size_t* needed) {
    return guarded([&] {
        need(result, "result");
        copy_text(result->csv, buffer, capacity, needed);
    });
}

} // extern "C"
