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

#include "sslr/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "sslr/error.hpp"
#include "sslr/random.hpp"

namespace sslr {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 60;

Vector project(const Vector& x, double radius) {
    const double norm = x.norm();
    if (std::isfinite(radius) && norm > radius) return x * (radius / norm);
    return x;
}

// Gradient with the outward normal component removed on the sphere boundary.
Vector projected_gradient(const Vector& x, const Vector& g, double radius) {
    if (!std::isfinite(radius)) return g;
    const double nx2 = x.squaredNorm();
    if (nx2 < radius * radius * (1.0 - 1e-12)) return g;
    const double outward = g.dot(x);
    if (outward <= 0.0) return g;
    return g - (outward / nx2) * x;
}

bool lexicographically_less(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// Highest value among converged runs, else highest overall; ties go to the
// lexicographically smallest argmax.
OptimResult pick_best(std::vector<OptimResult>& runs) {
    int best = -1;
    for (int pass = 0; pass < 2 && best < 0; ++pass) {
        for (int i = 0; i < static_cast<int>(runs.size()); ++i) {
            const auto& r = runs[static_cast<std::size_t>(i)];
            if (pass == 0 && !r.converged) continue;
            if (!std::isfinite(r.value)) continue;
            if (best < 0) {
                best = i;
                continue;
            }
            const auto& b = runs[static_cast<std::size_t>(best)];
            if (r.value > b.value || (r.value == b.value && lexicographically_less(r.argmax, b.argmax))) best = i;
        }
    }
    if (best < 0) fail(ErrorCode::BadStart, "the objective is not finite at any start point");
    return std::move(runs[static_cast<std::size_t>(best)]);
}

template <typename Run>
OptimResult multistart(const Vector& warm_start, const OptimizerConfig& config, Run&& run) {
    config.validate();
    const std::vector<Vector> starts = start_points(warm_start, config);
    std::vector<OptimResult> runs(starts.size());
    const int workers = std::max(1, std::min<int>(config.threads, static_cast<int>(starts.size())));
    auto task = [&](std::size_t i) {
        runs[i] = run(starts[i], derive_seed(config.seed, 0x0b5, i));
        runs[i].restart_index = static_cast<int>(i);
    };
    if (workers == 1) {
        for (std::size_t i = 0; i < starts.size(); ++i) task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i; (i = next.fetch_add(1)) < starts.size();) task(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return pick_best(runs);
}

OptimResult bfgs_run(const SmoothObjective& objective, const Vector& start, const OptimizerConfig& config,
                     const CurvatureFunction& curvature) {
    const double radius = config.search_radius;
    const Eigen::Index p = start.size();
    OptimResult res;
    Vector x = project(start, radius);
    ValueGradient cur = objective(x);
    res.evaluations = 1;
    if (!std::isfinite(cur.value) || !cur.gradient.allFinite()) {
        res.argmax = x;
        return res;
    }
    res.trace.push_back(cur.value);

    Matrix h = Matrix::Identity(p, p);
    bool seeded = false;
    if (curvature) {
        const Matrix neg = -curvature(x);
        Eigen::LLT<Matrix> llt(neg);
        if (neg.allFinite() && llt.info() == Eigen::Success) {
            h = llt.solve(Matrix::Identity(p, p));
            seeded = true;
        }
    }
    if (!seeded) h /= std::max(1.0, cur.gradient.norm());
    bool fresh_metric = !seeded;
    bool reset_used = false;

    Vector pg = projected_gradient(x, cur.gradient, radius);
    for (;;) {
        const double gnorm = pg.norm();
        res.gradient_norm = gnorm;
        if (gnorm <= config.gradient_tolerance) {
            res.converged = true;
            break;
        }
        if (res.iterations >= config.max_iterations) break;

        Vector dir = h * cur.gradient;
        if (!(cur.gradient.dot(dir) > 0.0)) {
            h = Matrix::Identity(p, p) / std::max(1.0, cur.gradient.norm());
            fresh_metric = true;
            dir = h * cur.gradient;
        }

        const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(cur.value));
        double t = 1.0;
        bool accepted = false;
        Vector xt;
        ValueGradient trial;
        for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= kBacktrack) {
            xt = project(x + t * dir, radius);
            trial = objective(xt);
            ++res.evaluations;
            if (!std::isfinite(trial.value) || !trial.gradient.allFinite()) continue;
            const double predicted = cur.gradient.dot(xt - x);
            if (trial.value >= cur.value + kArmijo * predicted && trial.value >= cur.value) {
                accepted = true;
                break;
            }
            // Near the optimum the increase drops below the resolution of the
            // objective; accept steps that reduce the gradient there.
            if (predicted <= 1e3 * noise_floor && trial.value >= cur.value - noise_floor &&
                projected_gradient(xt, trial.gradient, radius).norm() < gnorm) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (reset_used || fresh_metric) break;
            h = Matrix::Identity(p, p) / std::max(1.0, cur.gradient.norm());
            fresh_metric = true;
            reset_used = true;
            continue;
        }

        const Vector s = xt - x;
        const Vector y = cur.gradient - trial.gradient;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh_metric) h = Matrix::Identity(p, p) * (sy / y.squaredNorm());
            const double rho = 1.0 / sy;
            const Vector hy = h * y;
            h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
            fresh_metric = false;
        }
        x = xt;
        cur = std::move(trial);
        pg = projected_gradient(x, cur.gradient, radius);
        ++res.iterations;
        res.trace.push_back(cur.value);
    }
    res.argmax = x;
    res.value = cur.value;
    return res;
}

struct Vertex {
    Vector x;
    double f; // objective value (maximized)
};

double simplex_diameter(const std::vector<Vertex>& s) {
    double d = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) d = std::max(d, (s[i].x - s[0].x).norm());
    return d;
}

// One Nelder-Mead descent on -f with the dimension-adaptive coefficients.
void nelder_mead(const ValueObjective& objective, std::vector<Vertex>& simplex, const OptimizerConfig& config,
                 OptimResult& res, bool& converged) {
    const double radius = config.search_radius;
    const auto n = static_cast<double>(simplex.size() - 1);
    const double c_reflect = 1.0;
    const double c_expand = 1.0 + 2.0 / n;
    const double c_contract = 0.75 - 1.0 / (2.0 * n);
    const double c_shrink = 1.0 - 1.0 / n;
    auto eval = [&](const Vector& x) {
        ++res.evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };
    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    };
    converged = false;
    order();
    for (int it = 0; it < config.max_iterations; ++it) {
        if (simplex_diameter(simplex) <= config.gradient_tolerance) {
            converged = true;
            return;
        }
        ++res.iterations;
        const std::size_t worst = simplex.size() - 1;
        Vector centroid = Vector::Zero(simplex[0].x.size());
        for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i].x;
        centroid /= n;

        const Vector xr = project(centroid + c_reflect * (centroid - simplex[worst].x), radius);
        const double fr = eval(xr);
        if (fr > simplex[0].f) {
            const Vector xe = project(centroid + c_expand * (xr - centroid), radius);
            const double fe = eval(xe);
            simplex[worst] = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr > simplex[worst - 1].f) {
            simplex[worst] = {xr, fr};
        } else {
            const bool outside = fr > simplex[worst].f;
            const Vector xc = outside ? Vector(centroid + c_contract * (xr - centroid))
                                      : Vector(centroid - c_contract * (centroid - simplex[worst].x));
            const double fc = eval(xc);
            if (outside ? fc >= fr : fc > simplex[worst].f) {
                simplex[worst] = {xc, fc};
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    simplex[i].x = simplex[0].x + c_shrink * (simplex[i].x - simplex[0].x);
                    simplex[i].f = eval(simplex[i].x);
                }
            }
        }
        order();
    }
    converged = simplex_diameter(simplex) <= config.gradient_tolerance;
}

OptimResult nelder_mead_run(const ValueObjective& objective, const Vector& start, const OptimizerConfig& config) {
    const Eigen::Index p = start.size();
    OptimResult res;
    Vector x0 = project(start, config.search_radius);
    double step = 0.05 * std::max(1.0, x0.cwiseAbs().maxCoeff());
    if (std::isfinite(config.search_radius)) step = std::min(step, 0.25 * config.search_radius);

    auto build = [&](const Vector& center) {
        std::vector<Vertex> simplex;
        simplex.push_back({center, objective(center)});
        ++res.evaluations;
        for (Eigen::Index i = 0; i < p; ++i) {
            Vector v = center;
            v[i] += (center[i] + step <= config.search_radius || !std::isfinite(config.search_radius)) ? step : -step;
            v = project(v, config.search_radius);
            const double f = objective(v);
            ++res.evaluations;
            simplex.push_back({v, std::isfinite(f) ? f : -std::numeric_limits<double>::infinity()});
        }
        return simplex;
    };

    std::vector<Vertex> simplex = build(x0);
    if (!std::isfinite(simplex[0].f)) {
        res.argmax = x0;
        return res;
    }
    res.trace.push_back(simplex[0].f);
    double best = -std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int round = 0; round < 10; ++round) {
        nelder_mead(objective, simplex, config, res, converged);
        const Vertex top = simplex[0];
        res.trace.push_back(top.f);
        res.gradient_norm = simplex_diameter(simplex);
        const bool improved = top.f > best;
        best = std::max(best, top.f);
        if (!converged) break;
        if (!improved && round > 0) break;
        simplex = build(top.x);
        simplex[0].f = top.f;
        res.evaluations--;
    }
    // The simplex was rebuilt after the last successful round; report its best vertex.
    std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    res.argmax = simplex[0].x;
    res.value = simplex[0].f;
    res.converged = converged;
    return res;
}

} // namespace

void OptimizerConfig::validate() const {
    if (!(gradient_tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "optimizer tolerance must be positive");
    if (max_iterations < 1) fail(ErrorCode::InvalidArgument, "optimizer iteration cap must be positive");
    if (restarts < 0 || restarts > 10000) fail(ErrorCode::InvalidArgument, "optimizer restarts must lie in [0, 10000]");
    if (!(search_radius > 0.0)) fail(ErrorCode::InvalidArgument, "search radius must be positive");
    if (threads < 1) fail(ErrorCode::InvalidArgument, "thread count must be positive");
}

std::vector<Vector> start_points(const Vector& warm_start, const OptimizerConfig& config) {
    std::vector<Vector> starts{project(warm_start, config.search_radius)};
    const Eigen::Index p = warm_start.size();
    const double radius = std::isfinite(config.search_radius) ? config.search_radius
                                                               : std::max(1.0, 2.0 * warm_start.norm());
    Rng rng(derive_seed(config.seed, 0x57a7));
    for (int r = 0; r < config.restarts; ++r) {
        Vector z(p);
        for (Eigen::Index a = 0; a < p; ++a) z[a] = rng.normal();
        const double scale = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(p)) / z.norm();
        starts.push_back(z * scale);
    }
    return starts;
}

OptimResult maximize_smooth(const SmoothObjective& objective, const Vector& warm_start,
                            const OptimizerConfig& config, const CurvatureFunction& curvature) {
    return multistart(warm_start, config, [&](const Vector& start, std::uint64_t) {
        return bfgs_run(objective, start, config, curvature);
    });
}

OptimResult maximize_derivative_free(const ValueObjective& objective, const Vector& warm_start,
                                     const OptimizerConfig& config) {
    return multistart(warm_start, config, [&](const Vector& start, std::uint64_t) {
        return nelder_mead_run(objective, start, config);
    });
}

OptimResult grid_oracle(const ValueObjective& objective, const Box& box, int resolution) {
    const Eigen::Index p = box.lower.size();
    if (p < 1 || p > 2) fail(ErrorCode::Shape, "grid oracle supports one or two dimensions");
    if (box.upper.size() != p) fail(ErrorCode::Shape, "box bounds differ in dimension");
    if (resolution < 2 || resolution > 4001) fail(ErrorCode::InvalidArgument, "grid resolution must lie in [2, 4001]");
    if (!((box.upper - box.lower).array() > 0.0).all()) fail(ErrorCode::InvalidArgument, "box must have positive widths");

    const Vector h = (box.upper - box.lower) / static_cast<double>(resolution - 1);
    OptimResult res;
    auto consider = [&](const Vector& x) {
        const double v = objective(x);
        ++res.evaluations;
        if (v > res.value) {
            res.value = v;
            res.argmax = x;
        }
    };
    const int outer = p == 2 ? resolution : 1;
    Vector x(p);
    for (int i = 0; i < outer; ++i) {
        for (int j = 0; j < resolution; ++j) {
            if (p == 2) {
                x[0] = box.lower[0] + i * h[0];
                x[1] = box.lower[1] + j * h[1];
            } else {
                x[0] = box.lower[0] + j * h[0];
            }
            consider(x);
        }
    }
    if (res.argmax.size() == 0) fail(ErrorCode::BadStart, "the objective is not finite anywhere on the grid");

    const Vector center = res.argmax;
    const int span = p == 2 ? 5 : 1;
    for (int i = 0; i < span; ++i) {
        for (int j = 0; j < 5; ++j) {
            Vector c = center;
            if (p == 2) {
                c[0] += (i - 2) * 0.5 * h[0];
                c[1] += (j - 2) * 0.5 * h[1];
            } else {
                c[0] += (j - 2) * 0.5 * h[0];
            }
            if (((c - box.lower).array() < 0.0).any() || ((box.upper - c).array() < 0.0).any()) continue;
            if (c == center) continue;
            consider(c);
        }
    }
    res.converged = true;
    res.gradient_norm = 0.0;
    res.iterations = 1;
    res.trace = {res.value};
    return res;
}

} // namespace sslr
