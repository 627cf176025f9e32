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

#include "sslr/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sslr/error.hpp"
#include "sslr/random.hpp"

namespace sslr {
namespace {

// Neumaier compensated summation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double total() const { return sum + carry; }
};

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

Eigen::ArrayXd abs_pow(const Eigen::ArrayXd& absr, int k) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Ones(absr.size());
    for (int i = 0; i < k; ++i) out *= absr;
    return out;
}

// Distance from y to the closest entry of a sorted vector.
double nearest_distance(const std::vector<double>& sorted, double y) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), y);
    double best = std::numeric_limits<double>::infinity();
    if (it != sorted.end()) best = *it - y;
    if (it != sorted.begin()) best = std::min(best, y - *(it - 1));
    return best;
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Sum over j of log sum_i exp(-|y_j - t_i| / d), by two sorted sweeps.
double laplace_log_mixture_sum(const Vector& t, const Vector& y, double d) {
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> ts(t.data(), t.data() + t.size());
    std::sort(ts.begin(), ts.end());
    std::vector<double> ys(y.data(), y.data() + y.size());
    std::sort(ys.begin(), ys.end());
    const std::size_t n = ts.size();
    const std::size_t k = ys.size();

    // left[j] = log sum_{t_i <= y_j} exp(-(y_j - t_i)/d)
    std::vector<double> left(k, ninf), right(k, ninf);
    double acc = ninf;
    double prev = 0.0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (acc != ninf) acc -= (ys[j] - prev) / d;
        for (; i < n && ts[i] <= ys[j]; ++i) acc = log_add(acc, -(ys[j] - ts[i]) / d);
        left[j] = acc;
        prev = ys[j];
    }
    acc = ninf;
    std::size_t r = n;
    for (std::size_t jj = k; jj-- > 0;) {
        if (acc != ninf) acc -= (prev - ys[jj]) / d;
        for (; r > 0 && ts[r - 1] > ys[jj]; --r) acc = log_add(acc, -(ts[r - 1] - ys[jj]) / d);
        right[jj] = acc;
        prev = ys[jj];
    }
    CompensatedSum total;
    for (std::size_t j = 0; j < k; ++j) total.add(log_add(left[j], right[j]));
    return total.total();
}

struct PartSums {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
};

void require_no_kink(const Eigen::ArrayXd& r) {
    if ((r == 0.0).any())
        fail(ErrorCode::NonDifferentiable,
             "a residual is exactly zero; the alpha = 1 likelihood is not differentiable there");
}

// Sums over j of log((1/n) sum_i f(y_j - theta'D_i)) and its derivatives.
PartSums unmatched_sums(const NoiseDensity& noise, const Eigen::Ref<const Matrix>& design,
                        const Vector& y, const Vector& theta, Derivatives what) {
    const Eigen::Index n = design.rows();
    const Eigen::Index q = design.cols();
    const int alpha = noise.alpha();
    const double inv_da = std::pow(noise.d(), -alpha);
    const Vector t = design * theta;
    PartSums out;
    const double per_term = noise.log_c_alpha() - std::log(static_cast<double>(n));

    if (what == Derivatives::None && alpha == 1) {
        out.value = laplace_log_mixture_sum(t, y, noise.d()) + static_cast<double>(y.size()) * per_term;
        return out;
    }

    const bool grad = what != Derivatives::None;
    const bool hess = what == Derivatives::Hessian;
    std::vector<double> sorted(t.data(), t.data() + n);
    std::sort(sorted.begin(), sorted.end());

    constexpr Eigen::Index kBlock = 32;
    Matrix qmat, wmat, pairs;
    if (grad) {
        qmat.resize(n, kBlock);
        out.gradient = Vector::Zero(q);
    }
    const Eigen::Index npairs = q * (q + 1) / 2;
    if (hess) {
        wmat.resize(n, kBlock);
        out.hessian = Matrix::Zero(q, q);
        pairs.resize(n, npairs);
        Eigen::Index c = 0;
        for (Eigen::Index a = 0; a < q; ++a)
            for (Eigen::Index b = a; b < q; ++b) pairs.col(c++) = design.col(a).cwiseProduct(design.col(b));
    }

    Eigen::ArrayXd r(n), e(n), absr, pw;
    std::vector<double> sums(kBlock);
    CompensatedSum value;
    const Eigen::Index ny = y.size();
    for (Eigen::Index j0 = 0; j0 < ny; j0 += kBlock) {
        const Eigen::Index jb = std::min(kBlock, ny - j0);
        for (Eigen::Index jj = 0; jj < jb; ++jj) {
            const double yj = y[j0 + jj];
            const double delta = nearest_distance(sorted, yj);
            r = yj - t.array();
            // e_i = f(r_i) / f(delta), so the nearest term is exactly one.
            if (alpha == 2) {
                e = ((r.square() - delta * delta) * (-inv_da)).exp();
            } else if (alpha == 1) {
                e = ((r.abs() - delta) * (-inv_da)).exp();
            } else {
                absr = r.abs();
                pw = abs_pow(absr, alpha - 1);
                e = ((pw * absr - ipow(delta, alpha)) * (-inv_da)).exp();
            }
            const double s = e.sum();
            sums[static_cast<std::size_t>(jj)] = s;
            value.add(std::log(s) - ipow(delta, alpha) * inv_da);
            if (!grad) continue;
            // psi = f'/f and phi = f''/f, up to the constant factors applied below.
            if (alpha == 2) {
                qmat.col(jj) = (e * r).matrix();
                if (hess) wmat.col(jj) = (e * (4.0 * inv_da * inv_da * r.square() - 2.0 * inv_da)).matrix();
            } else if (alpha == 1) {
                require_no_kink(r);
                qmat.col(jj) = (e * r.sign()).matrix();
                if (hess) fail(ErrorCode::Unsupported, "the Hessian is not available for alpha = 1");
            } else {
                const Eigen::ArrayXd psi = -alpha * inv_da * pw * r.sign();
                qmat.col(jj) = (e * psi).matrix();
                if (hess)
                    wmat.col(jj) = (e * (psi.square() - alpha * (alpha - 1) * inv_da *
                                                            abs_pow(absr, alpha - 2)))
                                       .matrix();
            }
        }
        if (!grad) continue;
        const double psi_scale = alpha == 2 ? -2.0 * inv_da : (alpha == 1 ? -inv_da : 1.0);
        const Matrix g = (design.transpose() * qmat.leftCols(jb)) * psi_scale;
        Matrix hp;
        if (hess) hp = pairs.transpose() * wmat.leftCols(jb);
        for (Eigen::Index jj = 0; jj < jb; ++jj) {
            const double s = sums[static_cast<std::size_t>(jj)];
            const Vector gj = -g.col(jj) / s;
            out.gradient += gj;
            if (!hess) continue;
            Eigen::Index c = 0;
            for (Eigen::Index a = 0; a < q; ++a)
                for (Eigen::Index b = a; b < q; ++b, ++c) out.hessian(a, b) += hp(c, jj) / s - gj[a] * gj[b];
        }
    }
    out.value = value.total() + static_cast<double>(ny) * per_term;
    if (hess)
        out.hessian.triangularView<Eigen::StrictlyLower>() = out.hessian.transpose().triangularView<Eigen::StrictlyLower>();
    return out;
}

PartSums matched_sums(const NoiseDensity& noise, const Eigen::Ref<const Matrix>& design,
                      const Vector& y, const Vector& theta, Derivatives what) {
    const Eigen::Index q = design.cols();
    const int alpha = noise.alpha();
    const double inv_da = std::pow(noise.d(), -alpha);
    const Eigen::ArrayXd r = (y - design * theta).array();
    PartSums out;
    CompensatedSum value;
    for (Eigen::Index k = 0; k < r.size(); ++k) value.add(noise.log_c_alpha() - ipow(std::fabs(r[k]), alpha) * inv_da);
    out.value = value.total();
    if (what == Derivatives::None) return out;
    if (alpha == 1) require_no_kink(r);
    Eigen::ArrayXd psi(r.size());
    for (Eigen::Index k = 0; k < r.size(); ++k) psi[k] = noise.score_ratio(r[k]);
    out.gradient = -(design.transpose() * psi.matrix());
    if (what == Derivatives::Hessian) {
        if (alpha == 1) fail(ErrorCode::Unsupported, "the Hessian is not available for alpha = 1");
        Eigen::ArrayXd curv(r.size());
        for (Eigen::Index k = 0; k < r.size(); ++k)
            curv[k] = noise.curvature_ratio(r[k]) - psi[k] * psi[k];
        out.hessian = design.transpose() * curv.matrix().asDiagonal() * design;
        // Vectorized products can round the two triangles differently.
        out.hessian.triangularView<Eigen::StrictlyLower>() = out.hessian.transpose().triangularView<Eigen::StrictlyLower>();
    }
    (void)q;
    return out;
}

LikelihoodEval combine(const LikelihoodContext& ctx, const Eigen::Ref<const Matrix>& ud,
                       const Eigen::Ref<const Matrix>& md, const Vector& theta, Derivatives what) {
    const auto n = ctx.n();
    const auto m = ctx.m();
    if (n + m == 0) fail(ErrorCode::InvalidArgument, "the likelihood needs at least one observation");
    const Eigen::Index q = theta.size();
    LikelihoodEval out;
    out.value = 0.0;
    if (what != Derivatives::None) out.gradient = Vector::Zero(q);
    if (what == Derivatives::Hessian) out.hessian = Matrix::Zero(q, q);
    const double scale = 1.0 / static_cast<double>(n + m);
    if (n > 0) {
        const PartSums u = unmatched_sums(ctx.noise(), ud, ctx.sample().unmatched_y, theta, what);
        out.value += u.value;
        if (what != Derivatives::None) out.gradient += u.gradient;
        if (what == Derivatives::Hessian) out.hessian += u.hessian;
    }
    if (m > 0) {
        const PartSums k = matched_sums(ctx.noise(), md, ctx.sample().matched_y, theta, what);
        out.value += k.value;
        if (what != Derivatives::None) out.gradient += k.gradient;
        if (what == Derivatives::Hessian) out.hessian += k.hessian;
    }
    out.value *= scale;
    if (what != Derivatives::None) out.gradient *= scale;
    if (what == Derivatives::Hessian) out.hessian *= scale;
    return out;
}

void check_beta(const LikelihoodContext& ctx, const Vector& beta) {
    if (beta.size() != ctx.p())
        fail(ErrorCode::Shape, "coefficient vector has dimension " + std::to_string(beta.size()) +
                                   ", expected " + std::to_string(ctx.p()));
    if (!beta.allFinite()) fail(ErrorCode::Domain, "coefficient vector has non-finite entries");
}

} // namespace

LikelihoodContext::LikelihoodContext(SemiSupervisedSample sample, NoiseDensity noise)
    : sample_(std::move(sample)), noise_(noise) {
    sample_.validate();
    p_ = sample_.p();
    if (p_ < 1) fail(ErrorCode::Shape, "the sample has no covariates");
    if (sample_.n_x() != sample_.n_y())
        fail(ErrorCode::Shape, "unmatched covariate count (" + std::to_string(sample_.n_x()) +
                                   ") differs from unmatched response count (" +
                                   std::to_string(sample_.n_y()) + ")");
    if (sample_.n_x() > 0 && sample_.unmatched_x.cols() != p_)
        fail(ErrorCode::Shape, "unmatched covariates have the wrong dimension");
    matched_design_.resize(sample_.m(), p_ + 1);
    matched_design_.col(0).setOnes();
    if (sample_.m() > 0) matched_design_.rightCols(p_) = sample_.matched_x;
    unmatched_design_.resize(sample_.n_x(), p_ + 1);
    unmatched_design_.col(0).setOnes();
    if (sample_.n_x() > 0) unmatched_design_.rightCols(p_) = sample_.unmatched_x;
}

double LikelihoodContext::weight() const {
    const auto total = n() + m();
    if (total == 0) return 0.0;
    return static_cast<double>(n()) / static_cast<double>(total);
}

LikelihoodEval evaluate(const LikelihoodContext& ctx, const Vector& beta, Derivatives what) {
    check_beta(ctx, beta);
    const auto p = ctx.p();
    return combine(ctx, ctx.unmatched_design().rightCols(p), ctx.matched_design().rightCols(p), beta, what);
}

LikelihoodEval evaluate_intercept(const LikelihoodContext& ctx, double beta1, const Vector& beta_rest,
                                  Derivatives what) {
    check_beta(ctx, beta_rest);
    if (!std::isfinite(beta1)) fail(ErrorCode::Domain, "intercept is not finite");
    Vector theta(ctx.p() + 1);
    theta << beta1, beta_rest;
    return combine(ctx, ctx.unmatched_design(), ctx.matched_design(), theta, what);
}

double loglik(const LikelihoodContext& ctx, const Vector& beta) {
    return evaluate(ctx, beta, Derivatives::None).value;
}

Vector score(const LikelihoodContext& ctx, const Vector& beta) {
    return evaluate(ctx, beta, Derivatives::Gradient).gradient;
}

Matrix hessian(const LikelihoodContext& ctx, const Vector& beta) {
    if (ctx.noise().alpha() < 2) fail(ErrorCode::Unsupported, "the Hessian is not available for alpha = 1");
    return evaluate(ctx, beta, Derivatives::Hessian).hessian;
}

double loglik_intercept(const LikelihoodContext& ctx, double beta1, const Vector& beta_rest) {
    return evaluate_intercept(ctx, beta1, beta_rest, Derivatives::None).value;
}

double unmatched_mean_term(const LikelihoodContext& ctx, const Vector& beta) {
    check_beta(ctx, beta);
    if (ctx.n() == 0) fail(ErrorCode::InvalidArgument, "no unmatched observations");
    const auto p = ctx.p();
    const PartSums u = unmatched_sums(ctx.noise(), ctx.unmatched_design().rightCols(p),
                                      ctx.sample().unmatched_y, beta, Derivatives::None);
    return u.value / static_cast<double>(ctx.n());
}

double matched_mean_term(const LikelihoodContext& ctx, const Vector& beta) {
    check_beta(ctx, beta);
    if (ctx.m() == 0) fail(ErrorCode::InvalidArgument, "no matched observations");
    const auto p = ctx.p();
    const PartSums k = matched_sums(ctx.noise(), ctx.matched_design().rightCols(p), ctx.sample().matched_y,
                                    beta, Derivatives::None);
    return k.value / static_cast<double>(ctx.m());
}

double loglik_profile_sigma(const SemiSupervisedSample& sample, int alpha, const Vector& beta,
                            double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorCode::Domain, "sigma must be positive and finite");
    const LikelihoodContext ctx(sample, NoiseDensity::with_sd(alpha, sigma));
    return loglik(ctx, beta);
}

SphereMinimum sphere_minimum(const Matrix& x, int alpha, std::uint64_t seed, int restarts) {
    const Eigen::Index p = x.cols();
    if (p < 1) fail(ErrorCode::Shape, "sphere minimum needs at least one column");
    if (alpha < 1) fail(ErrorCode::Domain, "alpha must be at least 1");
    // |z|^alpha and alpha |z|^(alpha-1) sgn(z) with integer alpha.
    auto power = [alpha](const Eigen::ArrayXd& a) {
        Eigen::ArrayXd out = a;
        for (int k = 1; k < alpha; ++k) out *= a;
        return out;
    };
    auto objective = [&](const Vector& u) { return power((x * u).array().abs()).sum(); };
    if (p == 1) {
        Vector u = Vector::Ones(1);
        return {objective(u), u};
    }
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinV);
    if (alpha == 2) {
        // Rayleigh quotient: the minimum is the smallest squared singular value.
        const Vector u = svd.matrixV().col(p - 1);
        return {objective(u), u};
    }
    auto gradient = [&](const Vector& u) {
        const Eigen::ArrayXd z = (x * u).array();
        const Eigen::ArrayXd w = alpha * power(z.abs()).cwiseQuotient(z.abs().max(1e-300)) * z.sign();
        return Vector(x.transpose() * w.matrix());
    };

    std::vector<Vector> starts;
    starts.push_back(svd.matrixV().col(p - 1));
    Rng rng(seed);
    for (int r = 0; r < restarts; ++r) {
        Vector u(p);
        for (Eigen::Index a = 0; a < p; ++a) u[a] = rng.normal();
        starts.push_back(u.normalized());
    }

    SphereMinimum best{std::numeric_limits<double>::infinity(), Vector()};
    for (Vector u : starts) {
        double f = objective(u);
        double step = -1.0;
        for (int it = 0; it < 2000; ++it) {
            const Vector g = gradient(u);
            const Vector tangent = g - g.dot(u) * u;
            const double tn2 = tangent.squaredNorm();
            if (tn2 <= 1e-24 * g.squaredNorm()) break;
            if (step < 0.0) step = 0.1 / std::sqrt(tn2);
            bool moved = false;
            double fc = f;
            for (int bt = 0; bt < 60; ++bt) {
                const Vector cand = (u - step * tangent).normalized();
                fc = objective(cand);
                if (fc <= f - 1e-4 * step * tn2) {
                    u = cand;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
            const bool stalled = f - fc <= 1e-13 * f;
            f = fc;
            if (stalled) break;
            step *= 2.0;
        }
        if (f < best.value) best = {f, u};
    }
    return best;
}

ExistenceCertificate existence_radius(const LikelihoodContext& ctx, bool with_intercept) {
    const Matrix design = with_intercept ? ctx.matched_design() : Matrix(ctx.matched_design().rightCols(ctx.p()));
    const Eigen::Index q = design.cols();
    if (design.rows() == 0) fail(ErrorCode::Rank, "no matched observations: the existence hypothesis needs rank " + std::to_string(q));
    Eigen::JacobiSVD<Matrix> svd(design);
    const Vector sv = svd.singularValues();
    const double tol = 1e-10 * sv[0];
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    if (rank < q)
        fail(ErrorCode::Rank, "matched design has rank " + std::to_string(rank) + " < " + std::to_string(q) +
                                  "; the existence hypothesis is violated");

    const int alpha = ctx.noise().alpha();
    const SphereMinimum sm = sphere_minimum(design, alpha);
    const double a = alpha;
    const double sum_u = ctx.sample().unmatched_y.array().abs().pow(a).sum();
    const double sum_m = ctx.sample().matched_y.array().abs().pow(a).sum();
    ExistenceCertificate cert;
    cert.a_star = sm.value;
    cert.direction = sm.direction;
    cert.radius = std::pow(std::pow(2.0, a - 1.0) / sm.value * sum_u + std::pow(2.0, a) / sm.value * sum_m, 1.0 / a);
    return cert;
}

} // namespace sslr
