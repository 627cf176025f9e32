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

#include "sslr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sslr/error.hpp"

namespace sslr {
namespace {

Matrix matched_design(const SemiSupervisedSample& sample, bool with_intercept) {
    if (!with_intercept) return sample.matched_x;
    Matrix d(sample.m(), sample.p() + 1);
    d.col(0).setOnes();
    d.rightCols(sample.p()) = sample.matched_x;
    return d;
}

void require_rank(const Matrix& design) {
    const Eigen::Index q = design.cols();
    if (design.rows() < q)
        fail(ErrorCode::Rank, "matched sample has " + std::to_string(design.rows()) +
                                  " rows; at least " + std::to_string(q) + " are needed for full rank");
    Eigen::JacobiSVD<Matrix> svd(design);
    const Vector sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) ++rank;
    if (rank < q)
        fail(ErrorCode::Rank, "matched design has rank " + std::to_string(rank) + " < " + std::to_string(q));
}

Vector least_squares(const Matrix& design, const Vector& y) {
    require_rank(design);
    return design.colPivHouseholderQr().solve(y);
}

RegressionFit finish(Method method, const Vector& theta, bool with_intercept, OptimResult diag,
                     double lambda_hat) {
    RegressionFit fit;
    fit.method = method;
    if (with_intercept) {
        fit.intercept = theta[0];
        fit.beta = theta.tail(theta.size() - 1);
    } else {
        fit.beta = theta;
    }
    fit.diagnostics = std::move(diag);
    fit.lambda_hat = lambda_hat;
    return fit;
}

void require_converged(const OptimResult& res, const char* what) {
    if (res.converged) return;
    throw EstimationError(std::string(what) + " did not converge from any start (best value " +
                              std::to_string(res.value) + ", gradient norm or simplex diameter " +
                              std::to_string(res.gradient_norm) + ", iterations " +
                              std::to_string(res.iterations) + ")",
                          res);
}

// Maximizes the likelihood of ctx from the warm start with the path suited to alpha.
OptimResult maximize_likelihood(const LikelihoodContext& ctx, const Vector& warm, OptimizerConfig config,
                                bool with_intercept) {
    const ExistenceCertificate cert = existence_radius(ctx, with_intercept);
    config.search_radius = std::min(config.search_radius, cert.radius);
    const auto p = ctx.p();
    auto eval = [&ctx, with_intercept, p](const Vector& theta, Derivatives what) {
        if (with_intercept) return evaluate_intercept(ctx, theta[0], theta.tail(p), what);
        return evaluate(ctx, theta, what);
    };
    if (ctx.noise().alpha() == 1) {
        return maximize_derivative_free([&](const Vector& theta) { return eval(theta, Derivatives::None).value; },
                                        warm, config);
    }
    return maximize_smooth(
        [&](const Vector& theta) {
            LikelihoodEval e = eval(theta, Derivatives::Gradient);
            return ValueGradient{e.value, std::move(e.gradient)};
        },
        warm, config, [&](const Vector& theta) { return eval(theta, Derivatives::Hessian).hessian; });
}

double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_binary(const Vector& y, const char* what) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y[i] != 0.0 && y[i] != 1.0) fail(ErrorCode::Domain, std::string(what) + " must be 0 or 1");
}

} // namespace

const char* method_name(Method method) {
    switch (method) {
    case Method::SSLEMLE: return "SSLEMLE";
    case Method::MatchedMLE: return "mMLE";
    case Method::OLSE: return "OLSE";
    case Method::DLSE: return "DLSE";
    case Method::LogisticSSLEMLE: return "logisticSSLEMLE";
    }
    return "unknown";
}

RegressionFit fit_olse(const SemiSupervisedSample& sample, bool with_intercept) {
    sample.validate();
    const Matrix design = matched_design(sample, with_intercept);
    const Vector theta = least_squares(design, sample.matched_y);
    OptimResult diag;
    diag.argmax = theta;
    diag.converged = true;
    diag.gradient_norm = (design.transpose() * (design * theta - sample.matched_y)).norm();
    diag.value = -(design * theta - sample.matched_y).squaredNorm();
    return finish(Method::OLSE, theta, with_intercept, diag, sample.lambda_hat());
}

RegressionFit fit_sslemle(const SemiSupervisedSample& sample, const NoiseDensity& noise,
                          const OptimizerConfig& config, bool with_intercept) {
    sample.validate();
    if (sample.m() == 0) fail(ErrorCode::Rank, "no matched observations: the matched design cannot have full rank");
    if (sample.n_y() == 0) fail(ErrorCode::InvalidArgument, "no unmatched observations");
    const LikelihoodContext ctx(sample, noise);
    const Vector warm = least_squares(matched_design(sample, with_intercept), sample.matched_y);
    OptimResult res = maximize_likelihood(ctx, warm, config, with_intercept);
    require_converged(res, "SSLEMLE");
    return finish(Method::SSLEMLE, res.argmax, with_intercept, res, sample.lambda_hat());
}

RegressionFit fit_matched_mle(const SemiSupervisedSample& sample, const NoiseDensity& noise,
                              const OptimizerConfig& config, bool with_intercept) {
    sample.validate();
    const SemiSupervisedSample matched(sample.matched_x, sample.matched_y, Matrix(0, sample.p()), Vector(0));
    const Vector warm = least_squares(matched_design(sample, with_intercept), sample.matched_y);
    const LikelihoodContext ctx(matched, noise);
    OptimResult res = maximize_likelihood(ctx, warm, config, with_intercept);
    require_converged(res, "matched MLE");
    return finish(Method::MatchedMLE, res.argmax, with_intercept, res, sample.lambda_hat());
}

double dlse_criterion(const Matrix& unmatched_x, const Vector& sorted_y, const NoiseDensity& noise,
                      const Vector& beta) {
    const Eigen::Index n = sorted_y.size();
    if (unmatched_x.rows() != n) fail(ErrorCode::Shape, "unmatched covariate and response counts differ");
    if (beta.size() != unmatched_x.cols()) fail(ErrorCode::Shape, "coefficient vector has the wrong dimension");
    const Vector t = unmatched_x * beta;
    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double mix = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) mix += noise.cdf(sorted_y[j] - t[i]);
        const double diff = static_cast<double>(j + 1) * inv_n - mix * inv_n;
        total += diff * diff;
    }
    return total * inv_n;
}

RegressionFit fit_dlse(const Matrix& unmatched_x, const Vector& unmatched_y, const NoiseDensity& noise,
                       const OptimizerConfig& config) {
    const Eigen::Index n = unmatched_y.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "the deconvolution estimator needs at least two unmatched responses");
    if (unmatched_x.rows() != n) fail(ErrorCode::Shape, "unmatched covariate and response counts differ");
    Vector sorted = unmatched_y;
    std::sort(sorted.data(), sorted.data() + n);

    // Second-moment matching bounds the plausible coefficient norm.
    const Matrix moment = unmatched_x.transpose() * unmatched_x / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(moment);
    const double lmin = eig.eigenvalues()[0];
    if (!(lmin > 0.0)) fail(ErrorCode::Rank, "unmatched covariate second-moment matrix is singular");
    OptimizerConfig cfg = config;
    cfg.restarts = std::max(cfg.restarts, 15);
    cfg.search_radius = std::min(cfg.search_radius,
                                 2.0 * std::sqrt(unmatched_y.squaredNorm() / static_cast<double>(n) / lmin) + 1.0);
    OptimResult res = maximize_derivative_free(
        [&](const Vector& beta) { return -dlse_criterion(unmatched_x, sorted, noise, beta); },
        Vector::Zero(unmatched_x.cols()), cfg);
    require_converged(res, "DLSE");
    res.value = -res.value;
    RegressionFit fit = finish(Method::DLSE, res.argmax, false, res, 0.0);
    return fit;
}

ValueGradient logistic_objective(const SemiSupervisedSample& sample, const Vector& beta) {
    const Eigen::Index p = sample.p();
    if (beta.size() != p) fail(ErrorCode::Shape, "coefficient vector has the wrong dimension");
    const Eigen::Index n = sample.n_y();
    const Eigen::Index m = sample.m();
    if (n + m == 0) fail(ErrorCode::InvalidArgument, "the logistic objective needs observations");
    ValueGradient out{0.0, Vector::Zero(p)};

    if (n > 0) {
        const Eigen::Index nx = sample.n_x();
        if (nx == 0) fail(ErrorCode::Shape, "unmatched responses need unmatched covariates");
        const Vector z = sample.unmatched_x * beta;
        double pbar = 0.0, qbar = 0.0;
        Vector dp = Vector::Zero(p);
        for (Eigen::Index i = 0; i < nx; ++i) {
            const double s = sigmoid(z[i]);
            const double sc = sigmoid(-z[i]);
            pbar += s;
            qbar += sc;
            dp += (s * sc) * sample.unmatched_x.row(i).transpose();
        }
        pbar /= static_cast<double>(nx);
        qbar /= static_cast<double>(nx);
        dp /= static_cast<double>(nx);
        const double ones = sample.unmatched_y.sum();
        const double zeros = static_cast<double>(n) - ones;
        if (ones > 0.0) {
            out.value += ones * std::log(pbar);
            out.gradient += (ones / pbar) * dp;
        }
        if (zeros > 0.0) {
            out.value += zeros * std::log(qbar);
            out.gradient -= (zeros / qbar) * dp;
        }
    }
    if (m > 0) {
        const Vector z = sample.matched_x * beta;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double y = sample.matched_y[k];
            out.value += y * log_sigmoid(z[k]) + (1.0 - y) * log_sigmoid(-z[k]);
            out.gradient += (y - sigmoid(z[k])) * sample.matched_x.row(k).transpose();
        }
    }
    const double scale = 1.0 / static_cast<double>(n + m);
    out.value *= scale;
    out.gradient *= scale;
    return out;
}

RegressionFit fit_logistic_matched(const SemiSupervisedSample& sample, const OptimizerConfig& config,
                                   double search_radius) {
    sample.validate();
    check_binary(sample.matched_y, "matched responses");
    const double ones = sample.matched_y.sum();
    if (ones == 0.0 || ones == static_cast<double>(sample.m()))
        fail(ErrorCode::InvalidArgument, "the matched sample must contain both classes");
    require_rank(sample.matched_x);
    const SemiSupervisedSample matched(sample.matched_x, sample.matched_y, Matrix(0, sample.p()), Vector(0));
    OptimizerConfig cfg = config;
    cfg.search_radius = std::min(cfg.search_radius, search_radius);
    OptimResult res = maximize_smooth([&](const Vector& b) { return logistic_objective(matched, b); },
                                      Vector::Zero(sample.p()), cfg);
    require_converged(res, "matched logistic MLE");
    // A direction that classifies every matched point strictly correctly
    // proves separability; the likelihood then has no finite maximizer.
    const Vector margin = (2.0 * sample.matched_y.array() - 1.0).matrix().cwiseProduct(sample.matched_x * res.argmax);
    const bool separated = margin.minCoeff() > 0.0 || res.argmax.norm() >= cfg.search_radius * (1.0 - 1e-6);
    RegressionFit fit = finish(Method::MatchedMLE, res.argmax, false, res, sample.lambda_hat());
    fit.separation_warning = separated;
    return fit;
}

RegressionFit fit_logistic_sslemle(const SemiSupervisedSample& sample, const OptimizerConfig& config,
                                   double search_radius) {
    sample.validate();
    check_binary(sample.unmatched_y, "unmatched responses");
    const RegressionFit start = fit_logistic_matched(sample, config, search_radius);
    OptimizerConfig cfg = config;
    cfg.search_radius = std::min(cfg.search_radius, search_radius);
    OptimResult res = maximize_smooth([&](const Vector& b) { return logistic_objective(sample, b); },
                                      start.beta, cfg);
    require_converged(res, "logistic SSLEMLE");
    RegressionFit fit = finish(Method::LogisticSSLEMLE, res.argmax, false, res, sample.lambda_hat());
    fit.separation_warning = start.separation_warning;
    return fit;
}

} // namespace sslr
