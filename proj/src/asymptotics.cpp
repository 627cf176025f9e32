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

#include "sslr/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sslr/error.hpp"
#include "sslr/quadrature.hpp"
#include "sslr/special_functions.hpp"

namespace sslr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) fail(ErrorCode::Shape, std::string(what) + " must be square");
    if (!m.allFinite()) fail(ErrorCode::Domain, std::string(what) + " has non-finite entries");
}

double log_det_pd(const Matrix& m, const char* what) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::NotPositiveDefinite, std::string(what) + " is not positive definite");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Symmetric square root and inverse square root by eigendecomposition.
void sqrt_pair(const Matrix& s, Matrix& root, Matrix& inv_root) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Vector ev = es.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) fail(ErrorCode::NotPositiveDefinite, "covariate covariance is not positive definite");
    root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    inv_root = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

struct ResponseLaw {
    ProjectedNodes nodes;
    NoiseDensity noise;
    double lo;
    double hi;
};

ResponseLaw response_law(const DesignModel& model, const QuadratureBudget& budget) {
    design_validate(model);
    const Vector& beta0 = design_beta0(model);
    const NoiseDensity noise = design_noise(model);
    ProjectedNodes nodes = project_design(model, beta0, budget);
    const double center = beta0.dot(design_mean(model));
    const double sd_y = std::sqrt(beta0.dot(design_covariance(model) * beta0) + noise.variance());
    return {std::move(nodes), noise, center - budget.truncation_sds * sd_y,
            center + budget.truncation_sds * sd_y};
}

// f^Y(y) and g(y) = E[X f'(y - beta0'X)]; returns false when f^Y underflows.
bool density_and_gradient(const ResponseLaw& law, double y, double& fy, Eigen::Ref<Vector> g) {
    fy = 0.0;
    g.setZero();
    const auto& nd = law.nodes;
    for (std::size_t q = 0; q < nd.s.size(); ++q) {
        const double t = y - nd.s[q];
        const double f = law.noise.pdf(t);
        if (f == 0.0) continue;
        fy += nd.w[q] * f;
        // score_ratio is f'/f; the kink of the Laplace density has measure zero.
        const double df = t == 0.0 && law.noise.alpha() == 1 ? 0.0 : law.noise.score_ratio(t) * f;
        g += (nd.w[q] * df) * nd.xbar.row(static_cast<Eigen::Index>(q)).transpose();
    }
    return fy > 0.0 && std::isfinite(fy);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

} // namespace

Matrix sigma2(const NoiseDensity& noise, const Matrix& second_moment) {
    require_square(second_moment, "second moment matrix");
    return noise.fisher_integral() * symmetrize(second_moment);
}

Gammas gammas_gaussian(const GaussianDesignModel& model) {
    model.validate();
    if (model.alpha != 2) fail(ErrorCode::Unsupported, "closed-form gammas need Gaussian noise; use gammas_numeric");
    Matrix root, inv_root;
    sqrt_pair(model.sigma_x, root, inv_root);
    // Whitened coordinates: a0 = S^{1/2} beta0, theta = S^{-1/2} mu.
    const Vector a0 = root * model.beta0;
    const Vector theta = inv_root * model.mu_x;
    const double tau2 = a0.squaredNorm();
    const double s2 = tau2 + model.sigma_eps * model.sigma_eps;
    const Matrix tt = theta * theta.transpose();
    const Matrix aa = a0 * a0.transpose();
    const Matrix w1 = tt / s2 + 2.0 * aa / (s2 * s2);
    const Matrix w2 = tt * (tau2 / (s2 * s2)) + aa * (2.0 * tau2 * tau2 / std::pow(s2, 4));
    return {symmetrize(root * w1 * root), symmetrize(root * w2 * root)};
}

InfluenceFunction::InfluenceFunction(const DesignModel& model, const QuadratureBudget& budget)
    : beta0_(design_beta0(model)), noise_(design_noise(model)) {
    const ResponseLaw law = response_law(model, budget);
    const Eigen::Index p = beta0_.size();
    const double step = noise_.sd() / budget.panels_per_noise_sd;
    const int panels = std::max(1, static_cast<int>(std::ceil((law.hi - law.lo) / step)));
    const QuadratureRule rule = composite_legendre(law.lo, law.hi, panels, budget.panel_order);
    y_ = rule.nodes;
    weighted_ = Matrix::Zero(static_cast<Eigen::Index>(y_.size()), p);
    Vector g(p);
    for (std::size_t k = 0; k < y_.size(); ++k) {
        double fy = 0.0;
        if (!density_and_gradient(law, y_[k], fy, g)) continue;
        weighted_.row(static_cast<Eigen::Index>(k)) = (rule.weights[k] / fy) * g.transpose();
    }
}

Vector InfluenceFunction::at_projection(double s) const {
    Vector out = Vector::Zero(weighted_.cols());
    for (std::size_t k = 0; k < y_.size(); ++k) {
        const double f = noise_.pdf(y_[k] - s);
        if (f != 0.0) out.noalias() -= f * weighted_.row(static_cast<Eigen::Index>(k)).transpose();
    }
    return out;
}

Gammas gammas_numeric(const DesignModel& model, const QuadratureBudget& budget) {
    const ResponseLaw law = response_law(model, budget);
    const Eigen::Index p = design_beta0(model).size();
    const int packed = static_cast<int>(p * (p + 1) / 2);

    AdaptiveOptions opt;
    opt.abs_tol = budget.abs_tol;
    opt.max_intervals = 20000;
    Vector g(p);
    auto integrand = [&](double y, Eigen::Ref<Vector> out) {
        double fy = 0.0;
        if (!density_and_gradient(law, y, fy, g)) {
            out.setZero();
            return;
        }
        int k = 0;
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index b = a; b < p; ++b) out[k++] = g[a] * g[b] / fy;
    };
    const Vector flat = integrate(integrand, packed, law.lo, law.hi, opt);
    Gammas out;
    out.gamma1.resize(p, p);
    int k = 0;
    for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = a; b < p; ++b) out.gamma1(a, b) = out.gamma1(b, a) = flat[k++];

    const InfluenceFunction psi(model, budget);
    out.gamma2 = Matrix::Zero(p, p);
    for (std::size_t q = 0; q < law.nodes.s.size(); ++q) {
        const Vector v = psi.at_projection(law.nodes.s[q]);
        out.gamma2.noalias() += law.nodes.w[q] * (v * v.transpose());
    }
    out.gamma2 = symmetrize(out.gamma2);
    return out;
}

AsymptoticCovariances sigma_ssl(const Matrix& gamma1, const Matrix& gamma2, const Matrix& s2,
                                double lambda) {
    require_square(gamma1, "Gamma1");
    require_square(gamma2, "Gamma2");
    require_square(s2, "Sigma2");
    if (gamma1.rows() != s2.rows() || gamma2.rows() != s2.rows())
        fail(ErrorCode::Shape, "Gamma1, Gamma2 and Sigma2 must have the same size");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::Domain, "lambda must be positive");

    const double a = 1.0 / (1.0 + lambda);
    const double b = lambda / (1.0 + lambda);
    const Matrix outer = symmetrize(a * gamma1 + b * s2);
    Eigen::LLT<Matrix> llt(outer);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::NotPositiveDefinite,
             "Gamma1/(1+lambda) + lambda Sigma2/(1+lambda) is singular; Sigma2 must be positive definite");
    const Matrix inv = llt.solve(Matrix::Identity(s2.rows(), s2.cols()));
    const Matrix middle = a * (gamma1 + gamma2) + b * s2;

    AsymptoticCovariances out;
    out.sigma2 = symmetrize(s2);
    out.gamma1 = symmetrize(gamma1);
    out.gamma2 = symmetrize(gamma2);
    out.sigma_ssl = symmetrize(inv * middle * inv);
    out.sigma_ssl_tilde = b * out.sigma_ssl;
    Eigen::LLT<Matrix> s2llt(out.sigma2);
    if (s2llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "Sigma2 is not positive definite");
    out.sigma_mmle = symmetrize(s2llt.solve(Matrix::Identity(s2.rows(), s2.cols())));
    out.lambda = lambda;
    return out;
}

AsymptoticCovariances covariances_gaussian(const GaussianDesignModel& model, double lambda) {
    const Gammas g = gammas_gaussian(model);
    return sigma_ssl(g.gamma1, g.gamma2, sigma2(model.noise(), design_second_moment(model)), lambda);
}

AsymptoticCovariances plugin_covariances(const SemiSupervisedSample& sample, const Vector& beta,
                                         const NoiseDensity& noise) {
    sample.validate();
    if (beta.size() != sample.p()) fail(ErrorCode::Shape, "coefficient vector has the wrong dimension");
    if (sample.n_y() == 0) fail(ErrorCode::Domain, "plug-in covariance needs unmatched responses");
    Matrix all(sample.m() + sample.n_x(), sample.p());
    all << sample.matched_x, sample.unmatched_x;
    if (all.rows() < 2) fail(ErrorCode::Domain, "plug-in covariance needs at least two covariate rows");
    GaussianDesignModel model;
    model.beta0 = beta;
    model.mu_x = all.colwise().mean().transpose();
    const Matrix centered = all.rowwise() - model.mu_x.transpose();
    model.sigma_x = centered.transpose() * centered / static_cast<double>(all.rows() - 1);
    model.sigma_eps = noise.sd();
    model.alpha = noise.alpha();
    const double lambda = sample.lambda_hat();
    const Matrix s2 = sigma2(noise, design_second_moment(DesignModel(model)));
    if (model.alpha == 2) {
        const Gammas g = gammas_gaussian(model);
        return sigma_ssl(g.gamma1, g.gamma2, s2, lambda);
    }
    const Gammas g = gammas_numeric(DesignModel(model));
    return sigma_ssl(g.gamma1, g.gamma2, s2, lambda);
}

double gain_centered(double eta, double lambda) {
    const double r = eta / ((eta + 1.0) * (eta + 1.0));
    const double r3 = eta * eta * eta / std::pow(eta + 1.0, 4);
    return (1.0 + 2.0 * r / lambda) / std::sqrt(1.0 + (2.0 / lambda) * (r + r3));
}

double gain_general(double eta, double zeta, double rho, double lambda) {
    if (std::isinf(rho)) return gain_centered(eta, lambda);
    const double il = 1.0 / lambda;
    const double e1 = eta + 1.0;
    const double u = 1.0 / e1 * 1.0 / (1.0 + rho);
    const double v = 2.0 * eta / (e1 * e1) * (1.0 - zeta * zeta / (1.0 + rho));
    const double w = (1.0 - zeta * zeta) / (1.0 + rho) * 2.0 * eta / (e1 * e1 * e1);
    const double fa = 1.0 + eta / e1;
    const double fb = 1.0 + eta * eta / (e1 * e1);
    const double num = 1.0 + il * (u + v) + il * il * w;
    const double den = 1.0 + il * (u * fa + v * fb) + il * il * w * fb * fa;
    return num / std::sqrt(den);
}

GainReport gain_closed_form(const GaussianDesignModel& model, double lambda) {
    model.validate();
    if (model.alpha != 2) fail(ErrorCode::Unsupported, "closed-form gain needs Gaussian noise");
    if (!(lambda > 0.0 && lambda < 1.0)) fail(ErrorCode::Domain, "lambda must lie in (0, 1)");
    GainReport r;
    r.lambda = lambda;
    r.eta = model.eta();
    r.rho = model.rho();
    r.zeta = model.zeta();
    r.centered = std::isinf(r.rho);
    r.gain = r.centered ? gain_centered(r.eta, lambda) : gain_general(r.eta, r.zeta, r.rho, lambda);
    return r;
}

GainReport gain_generic(const AsymptoticCovariances& cov) {
    require_square(cov.sigma_ssl_tilde, "Sigma_SSL_tilde");
    require_square(cov.sigma_mmle, "Sigma_mMLE");
    const double ld_ssl = log_det_pd(symmetrize(cov.sigma_ssl_tilde), "Sigma_SSL_tilde");
    const double ld_ref = log_det_pd(symmetrize(cov.sigma_mmle), "Sigma_mMLE");
    GainReport r;
    r.gain = std::exp(0.5 * (ld_ref - ld_ssl));
    r.lambda = cov.lambda;
    r.eta = r.zeta = r.rho = kNaN;
    return r;
}

double unimodality_polynomial(double eta, double lambda) {
    return -4.0 * (1.0 + lambda) * eta * eta * eta - 3.0 * lambda * eta * eta + 2.0 * (1.0 + lambda) * eta +
           lambda;
}

double small_lambda_gain_centered(double eta, double lambda) {
    return std::sqrt(2.0 * eta) / (std::sqrt(lambda) * std::sqrt(2.0 * eta * eta + 2.0 * eta + 1.0));
}

double small_lambda_gain_general(double eta, double zeta, double rho, double lambda) {
    const double e1 = eta + 1.0;
    return (1.0 / lambda) * std::sqrt(1.0 - zeta * zeta) * std::sqrt(2.0 * eta) /
           std::sqrt((1.0 + rho) * (eta * eta + e1 * e1) * (2.0 * eta + 1.0));
}

UnimodalityReport gain_analysis(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) fail(ErrorCode::Domain, "lambda must lie in (0, 1)");
    UnimodalityReport r;
    r.lambda = lambda;

    // P(0) = lambda > 0 and P(1) = -2 - 4 lambda < 0.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (unimodality_polynomial(mid, lambda) > 0.0 ? lo : hi) = mid;
    }
    r.eta_root = 0.5 * (lo + hi);
    r.gain_at_root = gain_centered(r.eta_root, lambda);

    // Sign of a central difference of G against the sign of P, log-spaced eta.
    r.samples = 200;
    for (int i = 0; i < r.samples; ++i) {
        const double eta = std::pow(10.0, -3.0 + 6.0 * (i + 0.5) / r.samples);
        if (std::fabs(eta - r.eta_root) < 1e-6 * r.eta_root) continue;
        const double h = 1e-5 * eta;
        const double slope = gain_centered(eta + h, lambda) - gain_centered(eta - h, lambda);
        const bool want_up = eta < r.eta_root;
        if ((want_up && !(slope > 0.0)) || (!want_up && !(slope < 0.0))) ++r.sign_violations;
    }
    r.sign_pattern_ok = r.sign_violations == 0;

    // Golden-section maximum of the small-lambda coefficient sqrt(lambda) * G.
    auto coef = [](double eta) { return small_lambda_gain_centered(eta, 1.0); };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 1e-6, b = 10.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    while (b - a > 1e-10) {
        if (coef(c) > coef(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    r.small_lambda_eta_star = 0.5 * (a + b);
    r.small_lambda_coefficient = coef(r.small_lambda_eta_star);
    return r;
}

bool EllipsoidReport::contains(const Vector& beta) const {
    if (beta.size() != center.size()) fail(ErrorCode::Shape, "point has the wrong dimension");
    const Vector diff = beta - center;
    const double dist = diff.dot(covariance.llt().solve(diff));
    return dist <= quantile / matched_count;
}

EllipsoidReport confidence_region(const Vector& center, const Matrix& covariance, double level,
                                  double matched_count) {
    require_square(covariance, "covariance");
    if (covariance.rows() != center.size()) fail(ErrorCode::Shape, "center and covariance sizes differ");
    if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::Domain, "level must lie in (0, 1)");
    if (!(matched_count > 0.0) || !std::isfinite(matched_count))
        fail(ErrorCode::Domain, "matched count must be positive");
    const Matrix cov = symmetrize(covariance);
    const double log_det = log_det_pd(cov, "covariance");
    const auto p = static_cast<int>(cov.rows());

    EllipsoidReport r;
    r.center = center;
    r.covariance = cov;
    r.level = level;
    r.matched_count = matched_count;
    r.quantile = chi_square_quantile(level, p);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    r.semi_axes = (es.eigenvalues() * (r.quantile / matched_count)).cwiseSqrt();
    r.axes = es.eigenvectors();
    r.volume = std::exp(0.5 * log_det) * std::pow(r.quantile / matched_count, 0.5 * p) * unit_ball_volume(p);
    return r;
}

} // namespace sslr
