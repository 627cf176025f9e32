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

#ifndef SSLR_SSLR_H
#define SSLR_SSLR_H

/* C interface to the semi-supervised linear regression library. Every
   function returns a status; on failure sslr_last_error() describes it.
   Matrices are passed row-major. Handles are owned by the caller and
   released with the matching _destroy function (NULL is accepted). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SSLR_BUILDING_LIBRARY)
#    define SSLR_API __declspec(dllexport)
#  else
#    define SSLR_API __declspec(dllimport)
#  endif
#else
#  define SSLR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sslr_status {
    SSLR_OK = 0,
    SSLR_INVALID_ARGUMENT = 1,
    SSLR_SHAPE = 2,
    SSLR_DOMAIN = 3,
    SSLR_NON_DIFFERENTIABLE = 4,
    SSLR_UNSUPPORTED = 5,
    SSLR_RANK = 6,
    SSLR_NOT_POSITIVE_DEFINITE = 7,
    SSLR_ESTIMATION = 8,
    SSLR_BAD_START = 9,
    SSLR_IO = 10,
    SSLR_PARSE = 11,
    SSLR_SCHEMA = 12,
    SSLR_SIZING = 13,
    SSLR_DEGENERATE_COLUMN = 14,
    SSLR_SIMULATION = 15,
    SSLR_BUFFER_TOO_SMALL = 16,
    SSLR_OUT_OF_MEMORY = 98,
    SSLR_INTERNAL = 99
} sslr_status;

SSLR_API const char* sslr_version(void);
SSLR_API const char* sslr_status_name(sslr_status status);
/* Message of the last failure on the calling thread; empty after success. */
SSLR_API const char* sslr_last_error(void);

/* ---- noise ---- */

typedef struct sslr_noise sslr_noise;

SSLR_API sslr_status sslr_noise_create(int alpha, double d, sslr_noise** out);
/* Member of the family with standard deviation sd. */
SSLR_API sslr_status sslr_noise_create_sd(int alpha, double sd, sslr_noise** out);
SSLR_API void sslr_noise_destroy(sslr_noise* noise);
SSLR_API sslr_status sslr_noise_params(const sslr_noise* noise, int* alpha, double* d, double* c_alpha);
SSLR_API sslr_status sslr_noise_evaluate(const sslr_noise* noise, double t, int order, double* out);
SSLR_API sslr_status sslr_noise_cdf(const sslr_noise* noise, double t, double* out);
SSLR_API sslr_status sslr_noise_fisher_integral(const sslr_noise* noise, double* out);
SSLR_API sslr_status sslr_noise_sample(const sslr_noise* noise, uint64_t seed, size_t count, double* out);

/* ---- data ---- */

typedef struct sslr_dataset sslr_dataset;

/* response may be NULL or "" for a covariate-only file. */
SSLR_API sslr_status sslr_dataset_load_csv(const char* path, const char* response,
                                           const char* const* covariates, size_t covariate_count,
                                           sslr_dataset** out);
SSLR_API void sslr_dataset_destroy(sslr_dataset* data);
SSLR_API sslr_status sslr_dataset_shape(const sslr_dataset* data, size_t* rows, size_t* cols,
                                        int* has_response);
/* x receives rows*cols values, y receives rows values; either may be NULL. */
SSLR_API sslr_status sslr_dataset_copy(const sslr_dataset* data, double* x, double* y);

typedef struct sslr_sample sslr_sample;

SSLR_API sslr_status sslr_sample_create(size_t p, const double* matched_x, const double* matched_y, size_t m,
                                        const double* unmatched_x, size_t n_x, const double* unmatched_y,
                                        size_t n_y, sslr_sample** out);
SSLR_API void sslr_sample_destroy(sslr_sample* sample);
SSLR_API sslr_status sslr_sample_dims(const sslr_sample* sample, size_t* p, size_t* m, size_t* n_x,
                                      size_t* n_y);

/* ---- likelihood ---- */

/* Empirical log-likelihood and optional score (length p); score may be NULL. */
SSLR_API sslr_status sslr_loglik(const sslr_sample* sample, const sslr_noise* noise, const double* beta,
                                 double* value, double* score);
/* Radius of a ball around the origin that contains a maximizer. */
SSLR_API sslr_status sslr_existence_radius(const sslr_sample* sample, const sslr_noise* noise,
                                           int with_intercept, double* radius, double* a_star);

/* ---- estimation ---- */

typedef struct sslr_optimizer_options {
    double gradient_tolerance;
    int max_iterations;
    int restarts;
    double search_radius; /* <= 0 or infinite: unbounded */
    uint64_t seed;
    int threads;
} sslr_optimizer_options;

SSLR_API void sslr_optimizer_options_default(sslr_optimizer_options* options);

typedef enum sslr_method {
    SSLR_METHOD_SSLEMLE = 0,
    SSLR_METHOD_MATCHED_MLE = 1,
    SSLR_METHOD_OLSE = 2,
    SSLR_METHOD_DLSE = 3,
    SSLR_METHOD_LOGISTIC_SSLEMLE = 4,
    SSLR_METHOD_LOGISTIC_MATCHED = 5
} sslr_method;

SSLR_API const char* sslr_method_name(sslr_method method);

typedef struct sslr_fit sslr_fit;

typedef struct sslr_fit_diagnostics {
    double value;
    double gradient_norm;
    int iterations;
    int converged;
    int restart_index;
    long evaluations;
    double lambda_hat;
    int separation_warning;
} sslr_fit_diagnostics;

/* noise is required for the likelihood methods and ignored otherwise. */
SSLR_API sslr_status sslr_fit_estimate(const sslr_sample* sample, const sslr_noise* noise, sslr_method method,
                                       const sslr_optimizer_options* options, int with_intercept,
                                       sslr_fit** out);
SSLR_API void sslr_fit_destroy(sslr_fit* fit);
SSLR_API sslr_status sslr_fit_coefficients(const sslr_fit* fit, double* beta, size_t capacity, size_t* p);
SSLR_API sslr_status sslr_fit_intercept(const sslr_fit* fit, int* has_intercept, double* value);
SSLR_API sslr_status sslr_fit_get_diagnostics(const sslr_fit* fit, sslr_fit_diagnostics* out);

/* ---- asymptotics ---- */

typedef struct sslr_ellipsoid sslr_ellipsoid;

/* Confidence ellipsoid of a fit without intercept from plug-in covariances
   (Gaussian covariates with the sample moments, beta0 := estimate). */
SSLR_API sslr_status sslr_fit_confidence_region(const sslr_fit* fit, const sslr_sample* sample,
                                                const sslr_noise* noise, double level, sslr_ellipsoid** out);
/* Ellipsoid for a given center and covariance (p*p, row-major). */
SSLR_API sslr_status sslr_confidence_region(size_t p, const double* center, const double* covariance,
                                            double level, double matched_count, sslr_ellipsoid** out);
SSLR_API void sslr_ellipsoid_destroy(sslr_ellipsoid* region);
/* semi_axes has p entries; axes holds p*p values, row i is the i-th direction. */
SSLR_API sslr_status sslr_ellipsoid_get(const sslr_ellipsoid* region, size_t* p, double* quantile,
                                        double* volume, double* semi_axes, double* axes);
SSLR_API sslr_status sslr_ellipsoid_contains(const sslr_ellipsoid* region, const double* beta, int* inside);

typedef struct sslr_gaussian_model {
    size_t p;
    const double* beta0;
    const double* mu_x;
    const double* sigma_x; /* p*p, row-major */
    double sigma_eps;
    int alpha;
} sslr_gaussian_model;

typedef struct sslr_gain_report {
    double gain;
    double lambda;
    double eta;
    double zeta;
    double rho; /* infinite when the covariate mean is zero */
    int centered;
} sslr_gain_report;

SSLR_API sslr_status sslr_gain_closed_form(const sslr_gaussian_model* model, double lambda,
                                           sslr_gain_report* out);
/* Determinant path: Gamma matrices (closed form, or quadrature when
   numeric != 0), then the sandwich covariance, then the determinant ratio. */
SSLR_API sslr_status sslr_gain_matrix_path(const sslr_gaussian_model* model, double lambda, int numeric,
                                           sslr_gain_report* out);

typedef struct sslr_unimodality {
    double lambda;
    double eta_root;
    double gain_at_root;
    double small_lambda_eta_star;
    double small_lambda_coefficient;
    int samples;
    int sign_violations;
} sslr_unimodality;

SSLR_API sslr_status sslr_gain_analysis(double lambda, sslr_unimodality* out);

/* ---- simulation ---- */

typedef struct sslr_simulation_options {
    int setting_index;      /* 1..6 */
    double lambda;
    long n;
    int replications;
    const int* grid_points; /* 1-based, NULL for the default five points */
    size_t grid_count;
    uint64_t seed;
    int threads;            /* 0: all hardware threads */
    double sigma_eps;       /* NaN keeps the reference value */
    double mu_x;            /* NaN keeps the reference value */
    double perturbation_sd;
    int bootstrap_resamples;
} sslr_simulation_options;

SSLR_API void sslr_simulation_options_default(sslr_simulation_options* options);

typedef struct sslr_gain_curve sslr_gain_curve;

typedef struct sslr_gain_row {
    int grid_index;
    double beta0[3];
    double snr;
    double gain_theoretical; /* NaN when no closed form applies */
    double gain_empirical;
    double gain_vs_mmle;
    double mc_se;
    int used;
    int excluded;
} sslr_gain_row;

SSLR_API sslr_status sslr_simulate(const sslr_simulation_options* options, sslr_gain_curve** out);
SSLR_API void sslr_gain_curve_destroy(sslr_gain_curve* curve);
SSLR_API sslr_status sslr_gain_curve_size(const sslr_gain_curve* curve, size_t* rows, long* n, long* m);
SSLR_API sslr_status sslr_gain_curve_row(const sslr_gain_curve* curve, size_t index, sslr_gain_row* out);
/* Writes the CSV text plus a terminating NUL; *needed gets the full size. */
SSLR_API sslr_status sslr_gain_curve_csv(const sslr_gain_curve* curve, char* buffer, size_t capacity,
                                         size_t* needed);

typedef struct sslr_coverage_report {
    int replications;
    int covered;
    int excluded;
    double fraction;
} sslr_coverage_report;

SSLR_API sslr_status sslr_coverage(const sslr_simulation_options* options, int grid_point, double level,
                                   sslr_coverage_report* out);

/* ---- data application ---- */

typedef struct sslr_data_app_options {
    const long* unmatched_counts; /* NULL for 50, 100, 200, 400, 800, 1600 */
    size_t count_len;
    size_t matched_count;
    double train_fraction;
    int replications;
    uint64_t seed;
    double noise_sd;              /* NaN: full-data OLS residual sd */
    int threads;
    int restarts;
} sslr_data_app_options;

SSLR_API void sslr_data_app_options_default(sslr_data_app_options* options);

typedef struct sslr_data_app sslr_data_app;

typedef struct sslr_data_app_row {
    long n;
    long m;
    int used;
    int excluded;
    int wins;
    double win_fraction;
    double mean_mse_ratio;
    double mean_mse_sslemle;
    double mean_mse_olse;
} sslr_data_app_row;

SSLR_API sslr_status sslr_data_app_run(const sslr_dataset* data, const sslr_data_app_options* options,
                                       sslr_data_app** out);
SSLR_API void sslr_data_app_destroy(sslr_data_app* result);
SSLR_API sslr_status sslr_data_app_prefit(const sslr_data_app* result, double* residual_sd, double* r_squared,
                                          double* noise_sd);
SSLR_API sslr_status sslr_data_app_size(const sslr_data_app* result, size_t* rows);
SSLR_API sslr_status sslr_data_app_row_get(const sslr_data_app* result, size_t index, sslr_data_app_row* out);
SSLR_API sslr_status sslr_data_app_csv(const sslr_data_app* result, char* buffer, size_t capacity,
                                       size_t* needed);

/* Full-data OLS with intercept; beta receives cols values and may be NULL. */
SSLR_API sslr_status sslr_dataset_ols(const sslr_dataset* data, double* beta, double* intercept,
                                      double* residual_sd, double* r_squared);

#ifdef __cplusplus
}
#endif

#endif /* SSLR_SSLR_H */
