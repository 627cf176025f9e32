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

#include "sslr/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <queue>

#include "sslr/error.hpp"

namespace sslr {
namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    Eigen::VectorXd value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>& f,
              int dim, double a, double b, Eigen::VectorXd& scratch) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Eigen::VectorXd k15 = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd g7 = Eigen::VectorXd::Zero(dim);
    f(c, scratch);
    k15 += kWgk[7] * scratch;
    g7 += kWg[3] * scratch;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        f(c - dx, scratch);
        Eigen::VectorXd sum = scratch;
        f(c + dx, scratch);
        sum += scratch;
        k15 += kWgk[i] * sum;
        if (i % 2 == 1) g7 += kWg[i / 2] * sum;
    }
    k15 *= h;
    g7 *= h;
    return Panel{a, b, k15, (k15 - g7).cwiseAbs().maxCoeff()};
}

} // namespace

QuadratureRule gauss_hermite(int order) {
    if (order < 1) fail(ErrorCode::InvalidArgument, "Gauss-Hermite order must be positive");
    const int n = order;
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        // Asymptotic initial guesses followed by Newton on the orthonormal recurrence.
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * rule.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * rule.nodes[1];
        else
            z = 2.0 * z - rule.nodes[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre order must be positive");
    const int n = order;
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

QuadratureRule normal_expectation_rule(double mean, double sd, int order) {
    QuadratureRule gh = gauss_hermite(order);
    const double scale = std::sqrt(2.0) * sd;
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        gh.nodes[i] = mean + scale * gh.nodes[i];
        gh.weights[i] *= norm;
    }
    return gh;
}

QuadratureRule composite_legendre(double a, double b, int panels, int order) {
    if (panels < 1) fail(ErrorCode::InvalidArgument, "composite rule needs at least one panel");
    const QuadratureRule base = gauss_legendre(order);
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
    rule.weights.reserve(rule.nodes.capacity());
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double c = a + (k + 0.5) * h;
        for (int i = 0; i < order; ++i) {
            rule.nodes.push_back(c + 0.5 * h * base.nodes[i]);
            rule.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return rule;
}

Eigen::VectorXd integrate(const std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>& f,
                          int dim, double a, double b, const AdaptiveOptions& options) {
    if (!(a <= b)) fail(ErrorCode::InvalidArgument, "integration bounds out of order");
    if (a == b) return Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd scratch(dim);
    std::priority_queue<Panel> heap;
    Panel first = kronrod(f, dim, a, b, scratch);
    Eigen::VectorXd total = first.value;
    double error = first.error;
    heap.push(std::move(first));
    int intervals = 1;
    while (intervals < options.max_intervals) {
        const double target = std::max(options.abs_tol, options.rel_tol * total.cwiseAbs().maxCoeff());
        if (error <= target) break;
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = kronrod(f, dim, worst.a, mid, scratch);
        Panel right = kronrod(f, dim, mid, worst.b, scratch);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++intervals;
    }
    // Re-sum from the panels to avoid drift from the running updates.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    while (!heap.empty()) {
        sum += heap.top().value;
        heap.pop();
    }
    return sum;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const AdaptiveOptions& options) {
    auto wrapped = [&](double x, Eigen::Ref<Eigen::VectorXd> out) { out[0] = f(x); };
    return integrate(wrapped, 1, a, b, options)[0];
}

} // namespace sslr
