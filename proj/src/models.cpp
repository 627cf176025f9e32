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

#include "sslr/models.hpp"

#include <cmath>
#include <limits>

#include "sslr/error.hpp"
#include "sslr/quadrature.hpp"
#include "sslr/random.hpp"

namespace sslr {
namespace {

void check_vector(const Vector& v, Eigen::Index p, const char* name) {
    if (v.size() != p) fail(ErrorCode::Shape, std::string(name) + " has the wrong dimension");
    if (!v.allFinite()) fail(ErrorCode::Domain, std::string(name) + " has non-finite entries");
}

} // namespace

void GaussianDesignModel::validate() const {
    const Eigen::Index p = beta0.size();
    if (p < 1) fail(ErrorCode::Shape, "beta0 must be non-empty");
    check_vector(mu_x, p, "mu_x");
    if (sigma_x.rows() != p || sigma_x.cols() != p) fail(ErrorCode::Shape, "Sigma_X has the wrong dimension");
    if ((sigma_x - sigma_x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + sigma_x.cwiseAbs().maxCoeff()))
        fail(ErrorCode::NotPositiveDefinite, "Sigma_X is not symmetric");
    Eigen::LLT<Matrix> llt(sigma_x);
    if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "Sigma_X is not positive definite");
    if (!(sigma_eps > 0.0)) fail(ErrorCode::Domain, "sigma_eps must be positive");
    if (alpha < 1) fail(ErrorCode::Domain, "noise exponent must be a positive integer");
}

double GaussianDesignModel::eta() const {
    return beta0.dot(sigma_x * beta0) / (sigma_eps * sigma_eps);
}

double GaussianDesignModel::rho() const {
    const double q = mu_x.dot(sigma_x.llt().solve(mu_x));
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / q;
}

double GaussianDesignModel::zeta() const {
    const double b = beta0.dot(sigma_x * beta0);
    const double q = mu_x.dot(sigma_x.llt().solve(mu_x));
    if (b == 0.0 || q == 0.0) return 0.0;
    return mu_x.dot(beta0) / (std::sqrt(b) * std::sqrt(q));
}

void UniformDesignModel::validate() const {
    const Eigen::Index p = beta0.size();
    if (p < 1) fail(ErrorCode::Shape, "beta0 must be non-empty");
    check_vector(lower, p, "lower");
    check_vector(upper, p, "upper");
    if (!((upper - lower).array() > 0.0).all()) fail(ErrorCode::Domain, "uniform box must have positive widths");
    if (!(sigma_eps > 0.0)) fail(ErrorCode::Domain, "sigma_eps must be positive");
    if (alpha < 1) fail(ErrorCode::Domain, "noise exponent must be a positive integer");
}

const Vector& design_beta0(const DesignModel& model) {
    return std::visit([](const auto& m) -> const Vector& { return m.beta0; }, model);
}

NoiseDensity design_noise(const DesignModel& model) {
    return std::visit([](const auto& m) { return m.noise(); }, model);
}

void design_validate(const DesignModel& model) {
    std::visit([](const auto& m) { m.validate(); }, model);
}

Vector design_mean(const DesignModel& model) {
    if (const auto* g = std::get_if<GaussianDesignModel>(&model)) return g->mu_x;
    const auto& u = std::get<UniformDesignModel>(model);
    return 0.5 * (u.lower + u.upper);
}

Matrix design_covariance(const DesignModel& model) {
    if (const auto* g = std::get_if<GaussianDesignModel>(&model)) return g->sigma_x;
    const auto& u = std::get<UniformDesignModel>(model);
    const Vector width = u.upper - u.lower;
    return (width.array().square() / 12.0).matrix().asDiagonal();
}

Matrix design_second_moment(const DesignModel& model) {
    const Vector mu = design_mean(model);
    return design_covariance(model) + mu * mu.transpose();
}

QuadratureBudget QuadratureBudget::doubled() const {
    QuadratureBudget b = *this;
    b.hermite_order *= 2;
    b.legendre_order *= 2;
    b.truncation_sds *= 1.2;
    b.abs_tol *= 0.1;
    b.panels_per_noise_sd *= 2;
    return b;
}

ProjectedNodes project_design(const DesignModel& model, const Vector& direction,
                              const QuadratureBudget& budget) {
    design_validate(model);
    ProjectedNodes out;
    const Eigen::Index p = design_beta0(model).size();
    if (direction.size() != p) fail(ErrorCode::Shape, "projection direction has the wrong dimension");

    if (const auto* g = std::get_if<GaussianDesignModel>(&model)) {
        const Vector sd = g->sigma_x * direction;
        const double var = direction.dot(sd);
        const double center = direction.dot(g->mu_x);
        if (var <= 0.0) {
            out.s = {center};
            out.w = {1.0};
            out.xbar = g->mu_x.transpose();
            return out;
        }
        const QuadratureRule rule = normal_expectation_rule(center, std::sqrt(var), budget.hermite_order);
        out.s = rule.nodes;
        out.w = rule.weights;
        out.xbar.resize(static_cast<Eigen::Index>(rule.nodes.size()), p);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            out.xbar.row(static_cast<Eigen::Index>(q)) =
                (g->mu_x + sd * ((rule.nodes[q] - center) / var)).transpose();
        return out;
    }

    const auto& u = std::get<UniformDesignModel>(model);
    const QuadratureRule base = gauss_legendre(budget.legendre_order);
    const auto k = static_cast<Eigen::Index>(base.nodes.size());
    Eigen::Index total = 1;
    for (Eigen::Index i = 0; i < p; ++i) total *= k;
    out.s.resize(static_cast<std::size_t>(total));
    out.w.resize(static_cast<std::size_t>(total));
    out.xbar.resize(total, p);
    std::vector<Eigen::Index> digit(static_cast<std::size_t>(p), 0);
    for (Eigen::Index q = 0; q < total; ++q) {
        double w = 1.0;
        for (Eigen::Index a = 0; a < p; ++a) {
            const auto d = static_cast<std::size_t>(digit[static_cast<std::size_t>(a)]);
            const double half = 0.5 * (u.upper[a] - u.lower[a]);
            out.xbar(q, a) = u.lower[a] + half * (base.nodes[d] + 1.0);
            // Density 1 / width times the Jacobian half gives weight / 2.
            w *= 0.5 * base.weights[d];
        }
        out.w[static_cast<std::size_t>(q)] = w;
        out.s[static_cast<std::size_t>(q)] = out.xbar.row(q).dot(direction);
        for (Eigen::Index a = 0; a < p; ++a) {
            auto& dg = digit[static_cast<std::size_t>(a)];
            if (++dg < k) break;
            dg = 0;
        }
    }
    return out;
}

Matrix draw_covariates(const DesignModel& model, Eigen::Index n, Rng& rng) {
    const Eigen::Index p = design_beta0(model).size();
    Matrix x(n, p);
    if (const auto* g = std::get_if<GaussianDesignModel>(&model)) {
        const Matrix l = g->sigma_x.llt().matrixL();
        Vector z(p);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index a = 0; a < p; ++a) z[a] = rng.normal();
            x.row(i) = (g->mu_x + l * z).transpose();
        }
        return x;
    }
    const auto& u = std::get<UniformDesignModel>(model);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index a = 0; a < p; ++a) x(i, a) = rng.uniform(u.lower[a], u.upper[a]);
    return x;
}

} // namespace sslr
