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

// sslr: fit, gain, simulate and data-app front end over the C library.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sslr/sslr.h"

namespace {

using nlohmann::json;

enum Exit : int {
    kOk = 0,
    kUsage = 2,
    kConfigUnreadable = 3,
    kJsonParse = 4,
    kUnknownKey = 5,
    kBadValue = 6,
    kMissingKey = 7,
    kInputFile = 8,
    kEstimation = 9,
    kSimulation = 10,
    kOutput = 11,
};

const char* exit_kind(int code) {
    switch (code) {
    case kUsage: return "usage";
    case kConfigUnreadable: return "config_unreadable";
    case kJsonParse: return "config_parse";
    case kUnknownKey: return "unknown_key";
    case kBadValue: return "bad_value";
    case kMissingKey: return "missing_key";
    case kInputFile: return "input_file";
    case kEstimation: return "estimation";
    case kSimulation: return "simulation";
    case kOutput: return "output";
    default: return "internal";
    }
}

struct Failure {
    int code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& message) { throw Failure{code, message}; }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

// Maps a library status to an exit code; input errors keep their own code.
int exit_for(sslr_status status, int compute_code) {
    switch (status) {
    case SSLR_IO:
    case SSLR_PARSE:
    case SSLR_SCHEMA: return kInputFile;
    case SSLR_INVALID_ARGUMENT:
    case SSLR_DOMAIN:
    case SSLR_SHAPE:
    case SSLR_SIZING: return kBadValue;
    case SSLR_SIMULATION: return kSimulation;
    default: return compute_code;
    }
}

void check(sslr_status status, int compute_code = kEstimation) {
    if (status == SSLR_OK) return;
    die(exit_for(status, compute_code), std::string(sslr_status_name(status)) + ": " + sslr_last_error());
}

// ---- strict config reading ----

class Section {
public:
    Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) die(kBadValue, where("") + " must be an object");
        for (const auto& [key, value] : j_.items())
            if (!allowed.count(key)) die(kUnknownKey, "unknown key '" + where(key) + "'");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json& raw(const std::string& key) const {
        if (!has(key)) die(kMissingKey, "missing key '" + where(key) + "'");
        return j_.at(key);
    }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) die(kBadValue, "'" + where(key) + "' must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) die(kBadValue, "'" + where(key) + "' must be finite");
        return d;
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    long long integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) die(kBadValue, "'" + where(key) + "' must be an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::uint64_t unsigned_integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_unsigned()) die(kBadValue, "'" + where(key) + "' must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) die(kBadValue, "'" + where(key) + "' must be true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) die(kBadValue, "'" + where(key) + "' must be a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    std::vector<std::string> texts(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) die(kBadValue, "'" + where(key) + "' must be a non-empty array of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) die(kBadValue, "'" + where(key) + "' must be a non-empty array of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    std::vector<double> numbers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) die(kBadValue, "'" + where(key) + "' must be a non-empty array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>()))
                die(kBadValue, "'" + where(key) + "' must be a non-empty array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<long long> integers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) die(kBadValue, "'" + where(key) + "' must be a non-empty array of integers");
        std::vector<long long> out;
        for (const auto& e : v) {
            if (!e.is_number_integer()) die(kBadValue, "'" + where(key) + "' must be a non-empty array of integers");
            out.push_back(e.get<long long>());
        }
        return out;
    }

    Section child(const std::string& key, std::set<std::string> allowed) const {
        return Section(raw(key), where(key), std::move(allowed));
    }

    std::string where(const std::string& key) const {
        if (path_.empty()) return key;
        return key.empty() ? path_ : path_ + "." + key;
    }

private:
    const json& j_;
    std::string path_;
};

void require(bool ok, const std::string& message) {
    if (!ok) die(kBadValue, message);
}

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
};

json read_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path, std::ios::binary);
    if (!in) die(kConfigUnreadable, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    if (in.bad()) die(kConfigUnreadable, "cannot read config '" + path + "'");
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        die(kJsonParse, std::string("config is not valid JSON: ") + e.what());
    }
}

std::set<std::string> with_common(std::set<std::string> keys) {
    keys.insert({"command", "threads", "out"});
    return keys;
}

void check_command(const Section& root, const std::string& command) {
    if (root.has("command") && root.text("command") != command)
        die(kBadValue, "config command '" + root.text("command") + "' does not match '" + command + "'");
}

std::string output_path(const Section& root, const Flags& flags) {
    std::string out = flags.out.empty() ? root.text("out", "") : flags.out;
    if (out.empty()) die(kMissingKey, "missing key 'out' (or --out)");
    return out;
}

int thread_count(const Section& root, const Flags& flags, int fallback) {
    long long t = flags.threads ? *flags.threads : root.integer("threads", fallback);
    require(t >= 0 && t <= 4096, "'threads' must be between 0 and 4096");
    return static_cast<int>(t);
}

// Writes via a temporary file so a failed run never leaves a partial output.
void write_output(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) die(kOutput, "cannot open '" + path + "' for writing");
        out << text;
        if (!out) die(kOutput, "failed writing '" + path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        die(kOutput, "cannot move output into '" + path + "'");
    }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- handles ----

template <class T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};
using NoisePtr = std::unique_ptr<sslr_noise, Deleter<sslr_noise, sslr_noise_destroy>>;
using DatasetPtr = std::unique_ptr<sslr_dataset, Deleter<sslr_dataset, sslr_dataset_destroy>>;
using SamplePtr = std::unique_ptr<sslr_sample, Deleter<sslr_sample, sslr_sample_destroy>>;
using FitPtr = std::unique_ptr<sslr_fit, Deleter<sslr_fit, sslr_fit_destroy>>;
using EllipsoidPtr = std::unique_ptr<sslr_ellipsoid, Deleter<sslr_ellipsoid, sslr_ellipsoid_destroy>>;
using CurvePtr = std::unique_ptr<sslr_gain_curve, Deleter<sslr_gain_curve, sslr_gain_curve_destroy>>;
using DataAppPtr = std::unique_ptr<sslr_data_app, Deleter<sslr_data_app, sslr_data_app_destroy>>;

struct Table {
    std::vector<std::string> covariates;
    std::string response;
    std::size_t rows = 0;
    std::vector<double> x;
    std::vector<double> y;
};

struct TableSpec {
    std::string path;
    std::string response;
    std::vector<std::string> covariates;
};

Table load(const TableSpec& spec) {
    std::vector<const char*> names;
    for (const auto& c : spec.covariates) names.push_back(c.c_str());
    sslr_dataset* raw = nullptr;
    const sslr_status st = sslr_dataset_load_csv(spec.path.c_str(), spec.response.c_str(), names.data(),
                                                 names.size(), &raw);
    if (st != SSLR_OK) die(kInputFile, std::string(sslr_status_name(st)) + ": " + sslr_last_error());
    DatasetPtr data(raw);
    Table t;
    t.covariates = spec.covariates;
    t.response = spec.response;
    std::size_t cols = 0;
    int has_y = 0;
    check(sslr_dataset_shape(data.get(), &t.rows, &cols, &has_y));
    t.x.resize(t.rows * cols);
    if (has_y) t.y.resize(t.rows);
    check(sslr_dataset_copy(data.get(), cols ? t.x.data() : nullptr, has_y ? t.y.data() : nullptr));
    return t;
}

// ---- fit ----

struct FitJob {
    TableSpec matched;
    TableSpec unmatched_x;
    TableSpec unmatched_y;
    bool has_unmatched = false;
    std::string estimator = "sslemle";
    int alpha = 2;
    std::optional<double> noise_sd; // empty: estimate from matched residuals
    bool intercept = false;
    double level = 0.95;
    sslr_optimizer_options optimizer{};
    std::string out;
};

FitJob parse_fit(const json& cfg, const Flags& flags) {
    const Section root(cfg, "", with_common({"matched", "unmatched_covariates", "unmatched_responses", "estimator",
                                             "noise", "intercept", "level", "optimizer", "seed"}));
    check_command(root, "fit");
    FitJob job;
    {
        const Section m = root.child("matched", {"path", "response", "covariates"});
        job.matched = {m.text("path"), m.text("response"), m.texts("covariates")};
    }
    job.estimator = root.text("estimator", "sslemle");
    static const std::set<std::string> estimators{"sslemle",  "matched_mle",      "olse",
                                                  "dlse",     "logistic_sslemle", "logistic_matched"};
    require(estimators.count(job.estimator) == 1,
            "'estimator' must be one of sslemle, matched_mle, olse, dlse, logistic_sslemle, logistic_matched");
    job.has_unmatched = root.has("unmatched_covariates") || root.has("unmatched_responses");
    if (job.has_unmatched) {
        const Section ux = root.child("unmatched_covariates", {"path", "covariates"});
        job.unmatched_x = {ux.text("path"), "", ux.has("covariates") ? ux.texts("covariates") : job.matched.covariates};
        const Section uy = root.child("unmatched_responses", {"path", "response"});
        job.unmatched_y = {uy.text("path"), uy.text("response", job.matched.response), {}};
    }
    const bool needs_unmatched = job.estimator == "sslemle" || job.estimator == "dlse" ||
                                 job.estimator == "logistic_sslemle";
    if (needs_unmatched && !job.has_unmatched)
        die(kMissingKey, "missing key 'unmatched_covariates' (required by estimator '" + job.estimator + "')");

    if (root.has("noise")) {
        const Section n = root.child("noise", {"alpha", "sd"});
        const long long a = n.integer("alpha", 2);
        require(a >= 1 && a <= 64, "'noise.alpha' must be an integer between 1 and 64");
        job.alpha = static_cast<int>(a);
        if (n.has("sd")) {
            const json& v = n.raw("sd");
            if (v.is_string()) {
                require(v.get<std::string>() == "estimate-from-matched",
                        "'noise.sd' must be a positive number or \"estimate-from-matched\"");
            } else {
                const double sd = n.number("sd");
                require(sd > 0.0, "'noise.sd' must be positive");
                job.noise_sd = sd;
            }
        }
    }
    job.intercept = root.boolean("intercept", false);
    job.level = root.number("level", 0.95);
    require(job.level > 0.0 && job.level < 1.0, "'level' must lie in (0, 1)");

    sslr_optimizer_options_default(&job.optimizer);
    if (root.has("optimizer")) {
        const Section o = root.child("optimizer", {"gradient_tolerance", "max_iterations", "restarts", "search_radius"});
        job.optimizer.gradient_tolerance = o.number("gradient_tolerance", job.optimizer.gradient_tolerance);
        require(job.optimizer.gradient_tolerance > 0.0, "'optimizer.gradient_tolerance' must be positive");
        const long long it = o.integer("max_iterations", job.optimizer.max_iterations);
        require(it >= 1 && it <= 1000000, "'optimizer.max_iterations' must be between 1 and 1000000");
        job.optimizer.max_iterations = static_cast<int>(it);
        const long long rs = o.integer("restarts", job.optimizer.restarts);
        require(rs >= 0 && rs <= 10000, "'optimizer.restarts' must be between 0 and 10000");
        job.optimizer.restarts = static_cast<int>(rs);
        job.optimizer.search_radius = o.number("search_radius", 0.0);
        require(job.optimizer.search_radius >= 0.0, "'optimizer.search_radius' must be non-negative");
    }
    job.optimizer.seed = flags.seed ? *flags.seed : (root.has("seed") ? root.unsigned_integer("seed") : 0);
    job.optimizer.threads = thread_count(root, flags, 1);
    job.out = output_path(root, flags);
    return job;
}

sslr_method method_of(const std::string& name) {
    if (name == "sslemle") return SSLR_METHOD_SSLEMLE;
    if (name == "matched_mle") return SSLR_METHOD_MATCHED_MLE;
    if (name == "olse") return SSLR_METHOD_OLSE;
    if (name == "dlse") return SSLR_METHOD_DLSE;
    if (name == "logistic_sslemle") return SSLR_METHOD_LOGISTIC_SSLEMLE;
    return SSLR_METHOD_LOGISTIC_MATCHED;
}

std::string run_fit(const FitJob& job) {
    const Table matched = load(job.matched);
    Table ux, uy;
    if (job.has_unmatched) {
        ux = load(job.unmatched_x);
        uy = load(job.unmatched_y);
        if (ux.covariates.size() != matched.covariates.size())
            die(kBadValue, "unmatched covariates must have as many columns as the matched covariates");
    }
    const std::size_t p = matched.covariates.size();
    sslr_sample* raw_sample = nullptr;
    check(sslr_sample_create(p, matched.x.data(), matched.y.data(), matched.rows,
                             ux.rows ? ux.x.data() : nullptr, ux.rows, uy.rows ? uy.y.data() : nullptr, uy.rows,
                             &raw_sample));
    SamplePtr sample(raw_sample);

    const bool logistic = job.estimator.rfind("logistic", 0) == 0;
    json noise_report = nullptr;
    NoisePtr noise;
    if (!logistic && job.estimator != "olse") {
        double sd = 0.0;
        std::string source = "config";
        if (job.noise_sd) {
            sd = *job.noise_sd;
        } else {
            // Residual sd of an OLS pre-fit with intercept on the matched pairs.
            const std::vector<std::string> names = job.matched.covariates;
            std::vector<const char*> cn;
            for (const auto& c : names) cn.push_back(c.c_str());
            sslr_dataset* ds = nullptr;
            check(sslr_dataset_load_csv(job.matched.path.c_str(), job.matched.response.c_str(), cn.data(), cn.size(),
                                        &ds),
                  kInputFile);
            DatasetPtr data(ds);
            double r2 = 0.0;
            check(sslr_dataset_ols(data.get(), nullptr, nullptr, &sd, &r2));
            if (!(sd > 0.0) || !std::isfinite(sd))
                die(kEstimation, "matched residual standard deviation is not positive; set 'noise.sd'");
            source = "estimate-from-matched";
        }
        sslr_noise* n = nullptr;
        check(sslr_noise_create_sd(job.alpha, sd, &n), kBadValue);
        noise.reset(n);
        int alpha = 0;
        double d = 0.0, c = 0.0;
        check(sslr_noise_params(noise.get(), &alpha, &d, &c));
        noise_report = {{"alpha", alpha}, {"d", d}, {"sd", sd}, {"sd_source", source}};
    }

    sslr_fit* raw_fit = nullptr;
    check(sslr_fit_estimate(sample.get(), noise.get(), method_of(job.estimator), &job.optimizer, job.intercept ? 1 : 0,
                            &raw_fit));
    FitPtr fit(raw_fit);

    std::size_t k = 0;
    check(sslr_fit_coefficients(fit.get(), nullptr, 0, &k));
    std::vector<double> beta(k);
    check(sslr_fit_coefficients(fit.get(), beta.data(), beta.size(), &k));
    int has_icpt = 0;
    double icpt = 0.0;
    check(sslr_fit_intercept(fit.get(), &has_icpt, &icpt));
    sslr_fit_diagnostics diag{};
    check(sslr_fit_get_diagnostics(fit.get(), &diag));

    json coefficients = json::object();
    for (std::size_t i = 0; i < k; ++i) coefficients[matched.covariates[i]] = beta[i];

    json region = nullptr;
    std::string region_note;
    const bool likelihood_fit = job.estimator == "sslemle" || job.estimator == "matched_mle" || job.estimator == "olse";
    if (job.intercept) {
        region_note = "not available for fits with intercept";
    } else if (!likelihood_fit) {
        region_note = "not available for this estimator";
    } else if (uy.rows == 0) {
        region_note = "needs unmatched data for the plug-in covariance";
    } else {
        NoisePtr region_noise;
        if (!noise) {
            // OLSE: Gaussian working noise with the matched residual sd.
            std::vector<double> resid(matched.rows);
            double ss = 0.0;
            for (std::size_t i = 0; i < matched.rows; ++i) {
                double fitted = 0.0;
                for (std::size_t j = 0; j < p; ++j) fitted += matched.x[i * p + j] * beta[j];
                ss += (matched.y[i] - fitted) * (matched.y[i] - fitted);
            }
            const double sd = matched.rows > p ? std::sqrt(ss / static_cast<double>(matched.rows - p)) : 0.0;
            sslr_noise* n = nullptr;
            if (sd > 0.0 && sslr_noise_create_sd(2, sd, &n) == SSLR_OK) region_noise.reset(n);
        }
        const sslr_noise* rn = noise ? noise.get() : region_noise.get();
        sslr_ellipsoid* raw_region = nullptr;
        if (rn != nullptr && sslr_fit_confidence_region(fit.get(), sample.get(), rn, job.level, &raw_region) == SSLR_OK) {
            EllipsoidPtr e(raw_region);
            std::size_t q = 0;
            double quantile = 0.0, volume = 0.0;
            check(sslr_ellipsoid_get(e.get(), &q, &quantile, &volume, nullptr, nullptr));
            std::vector<double> semi(q), axes(q * q);
            check(sslr_ellipsoid_get(e.get(), &q, &quantile, &volume, semi.data(), axes.data()));
            json axis_list = json::array();
            for (std::size_t i = 0; i < q; ++i)
                axis_list.push_back({{"semi_axis", semi[i]},
                                     {"direction", std::vector<double>(axes.begin() + static_cast<long>(i * q),
                                                                       axes.begin() + static_cast<long>((i + 1) * q))}});
            region = {{"level", job.level},
                      {"chi_square_quantile", quantile},
                      {"volume", volume},
                      {"axes", axis_list},
                      {"covariance", "plug-in: Gaussian covariates with sample moments, true vector set to the estimate"}};
        } else {
            region_note = std::string("plug-in covariance failed: ") + sslr_last_error();
        }
    }

    json report = {
        {"command", "fit"},
        {"method", sslr_method_name(method_of(job.estimator))},
        {"coefficients", coefficients},
        {"intercept", has_icpt ? json(icpt) : json(nullptr)},
        {"lambda_hat", number_or_null(diag.lambda_hat)},
        {"matched_count", matched.rows},
        {"unmatched_covariate_count", ux.rows},
        {"unmatched_response_count", uy.rows},
        {"noise", noise_report},
        {"diagnostics",
         {{"objective", number_or_null(diag.value)},
          {"gradient_norm", number_or_null(diag.gradient_norm)},
          {"iterations", diag.iterations},
          {"converged", diag.converged != 0},
          {"restart_index", diag.restart_index},
          {"evaluations", diag.evaluations},
          {"separation_warning", diag.separation_warning != 0}}},
        {"confidence_region", region},
    };
    if (!region_note.empty()) report["confidence_region_note"] = region_note;
    return report.dump(2) + "\n";
}

// ---- gain ----

struct GainJob {
    std::vector<double> beta0, mu, sigma;
    std::size_t p = 0;
    double sigma_eps = 1.0;
    double lambda = 0.2;
    bool numeric = false;
    std::string out;
};

GainJob parse_gain(const json& cfg, const Flags& flags) {
    const Section root(cfg, "", with_common({"model", "lambda", "numeric"}));
    check_command(root, "gain");
    GainJob job;
    const Section m = root.child("model", {"beta0", "mu_x", "sigma_x", "sigma_eps"});
    job.beta0 = m.numbers("beta0");
    job.p = job.beta0.size();
    job.mu = m.has("mu_x") ? m.numbers("mu_x") : std::vector<double>(job.p, 0.0);
    require(job.mu.size() == job.p, "'model.mu_x' must have the length of 'model.beta0'");
    if (m.has("sigma_x")) {
        const json& rows = m.raw("sigma_x");
        require(rows.is_array() && rows.size() == job.p, "'model.sigma_x' must be a p x p array of numbers");
        for (const auto& r : rows) {
            require(r.is_array() && r.size() == job.p, "'model.sigma_x' must be a p x p array of numbers");
            for (const auto& v : r) {
                require(v.is_number() && std::isfinite(v.get<double>()), "'model.sigma_x' must be a p x p array of numbers");
                job.sigma.push_back(v.get<double>());
            }
        }
    } else {
        job.sigma.assign(job.p * job.p, 0.0);
        for (std::size_t i = 0; i < job.p; ++i) job.sigma[i * job.p + i] = 1.0;
    }
    job.sigma_eps = m.number("sigma_eps", 1.0);
    require(job.sigma_eps > 0.0, "'model.sigma_eps' must be positive");
    job.lambda = root.number("lambda");
    require(job.lambda > 0.0 && job.lambda < 1.0, "'lambda' must lie in (0, 1)");
    job.numeric = root.boolean("numeric", false);
    (void)thread_count(root, flags, 1);
    job.out = output_path(root, flags);
    return job;
}

std::string run_gain(const GainJob& job) {
    const sslr_gaussian_model model{job.p, job.beta0.data(), job.mu.data(), job.sigma.data(), job.sigma_eps, 2};
    sslr_gain_report closed{}, matrix{};
    check(sslr_gain_closed_form(&model, job.lambda, &closed));
    check(sslr_gain_matrix_path(&model, job.lambda, 0, &matrix));
    sslr_unimodality uni{};
    check(sslr_gain_analysis(job.lambda, &uni));
    json report = {
        {"command", "gain"},
        {"lambda", job.lambda},
        {"eta", closed.eta},
        {"snr", std::sqrt(closed.eta)},
        {"zeta", closed.zeta},
        {"rho", number_or_null(closed.rho)},
        {"centered", closed.centered != 0},
        {"gain_closed_form", closed.gain},
        {"gain_matrix_path", matrix.gain},
        {"unimodality",
         {{"eta_root", uni.eta_root},
          {"gain_at_root", uni.gain_at_root},
          {"small_lambda_eta_star", uni.small_lambda_eta_star},
          {"small_lambda_coefficient", uni.small_lambda_coefficient},
          {"sign_violations", uni.sign_violations}}},
    };
    if (job.numeric) {
        sslr_gain_report numeric{};
        check(sslr_gain_matrix_path(&model, job.lambda, 1, &numeric));
        report["gain_quadrature_path"] = numeric.gain;
    }
    return report.dump(2) + "\n";
}

// ---- simulate ----

struct SimulateJob {
    sslr_simulation_options options{};
    std::vector<int> grid;
    std::string out;
};

SimulateJob parse_simulate(const json& cfg, const Flags& flags) {
    const Section root(cfg, "", with_common({"setting", "lambda", "n", "replications", "grid_points", "sigma_eps",
                                             "mu_x", "perturbation_sd", "bootstrap_resamples"}));
    check_command(root, "simulate");
    if (!flags.seed) die(kUsage, "--seed is required for simulate");
    SimulateJob job;
    sslr_simulation_options_default(&job.options);
    auto& o = job.options;
    const long long setting = root.integer("setting", 1);
    require(setting >= 1 && setting <= 6, "'setting' must be between 1 and 6");
    o.setting_index = static_cast<int>(setting);
    o.lambda = root.number("lambda", o.lambda);
    require(o.lambda > 0.0 && o.lambda < 1.0, "'lambda' must lie in (0, 1)");
    const long long n = root.integer("n", o.n);
    require(n >= 4 && n <= 10000000, "'n' must be between 4 and 10000000");
    o.n = static_cast<long>(n);
    require(std::lround(o.lambda * static_cast<double>(o.n)) >= 4, "round(lambda * n) must be at least 4");
    const long long reps = root.integer("replications", o.replications);
    require(reps >= 4 && reps <= 1000000, "'replications' must be between 4 and 1000000");
    o.replications = static_cast<int>(reps);
    if (root.has("grid_points")) {
        for (long long k : root.integers("grid_points")) {
            require(k >= 1 && k <= 15, "'grid_points' entries must be between 1 and 15");
            job.grid.push_back(static_cast<int>(k));
        }
    }
    if (root.has("sigma_eps")) {
        o.sigma_eps = root.number("sigma_eps");
        require(o.sigma_eps > 0.0, "'sigma_eps' must be positive");
    }
    if (root.has("mu_x")) o.mu_x = root.number("mu_x");
    o.perturbation_sd = root.number("perturbation_sd", o.perturbation_sd);
    require(o.perturbation_sd >= 0.0, "'perturbation_sd' must be non-negative");
    const long long boot = root.integer("bootstrap_resamples", o.bootstrap_resamples);
    require(boot >= 0 && boot <= 100000, "'bootstrap_resamples' must be between 0 and 100000");
    o.bootstrap_resamples = static_cast<int>(boot);
    o.seed = *flags.seed;
    o.threads = thread_count(root, flags, 0);
    job.out = output_path(root, flags);
    return job;
}

std::string run_simulate(SimulateJob& job) {
    if (!job.grid.empty()) {
        job.options.grid_points = job.grid.data();
        job.options.grid_count = job.grid.size();
    }
    sslr_gain_curve* raw = nullptr;
    check(sslr_simulate(&job.options, &raw), kSimulation);
    CurvePtr curve(raw);
    std::size_t size = 0;
    check(sslr_gain_curve_csv(curve.get(), nullptr, 0, &size));
    std::string text(size, '\0');
    check(sslr_gain_curve_csv(curve.get(), text.data(), text.size(), &size));
    text.resize(size - 1);
    return text;
}

// ---- data-app ----

struct DataAppJob {
    TableSpec data;
    sslr_data_app_options options{};
    std::vector<long> counts;
    std::string out;
};

DataAppJob parse_data_app(const json& cfg, const Flags& flags) {
    const Section root(cfg, "", with_common({"data", "unmatched_counts", "matched_count", "train_fraction",
                                             "replications", "noise_sd", "restarts"}));
    check_command(root, "data-app");
    if (!flags.seed) die(kUsage, "--seed is required for data-app");
    DataAppJob job;
    const Section d = root.child("data", {"path", "response", "covariates"});
    job.data = {d.text("path"), d.text("response"), d.texts("covariates")};
    sslr_data_app_options_default(&job.options);
    auto& o = job.options;
    if (root.has("unmatched_counts"))
        for (long long n : root.integers("unmatched_counts")) {
            require(n >= 1 && n <= 100000000, "'unmatched_counts' entries must be positive");
            job.counts.push_back(static_cast<long>(n));
        }
    const long long m = root.integer("matched_count", static_cast<long long>(o.matched_count));
    require(m >= 2 && m <= 100000000, "'matched_count' must be at least 2");
    o.matched_count = static_cast<std::size_t>(m);
    o.train_fraction = root.number("train_fraction", o.train_fraction);
    require(o.train_fraction > 0.0 && o.train_fraction < 1.0, "'train_fraction' must lie in (0, 1)");
    const long long reps = root.integer("replications", o.replications);
    require(reps >= 1 && reps <= 1000000, "'replications' must be between 1 and 1000000");
    o.replications = static_cast<int>(reps);
    if (root.has("noise_sd")) {
        const json& v = root.raw("noise_sd");
        if (v.is_string()) {
            require(v.get<std::string>() == "estimate-from-full-data",
                    "'noise_sd' must be a positive number or \"estimate-from-full-data\"");
        } else {
            o.noise_sd = root.number("noise_sd");
            require(o.noise_sd > 0.0, "'noise_sd' must be positive");
        }
    }
    const long long rs = root.integer("restarts", o.restarts);
    require(rs >= 0 && rs <= 10000, "'restarts' must be between 0 and 10000");
    o.restarts = static_cast<int>(rs);
    o.seed = *flags.seed;
    o.threads = thread_count(root, flags, 0);
    job.out = output_path(root, flags);
    return job;
}

std::string run_data_app(DataAppJob& job) {
    std::vector<const char*> names;
    for (const auto& c : job.data.covariates) names.push_back(c.c_str());
    sslr_dataset* raw = nullptr;
    check(sslr_dataset_load_csv(job.data.path.c_str(), job.data.response.c_str(), names.data(), names.size(), &raw),
          kInputFile);
    DatasetPtr data(raw);
    if (!job.counts.empty()) {
        job.options.unmatched_counts = job.counts.data();
        job.options.count_len = job.counts.size();
    }
    sslr_data_app* raw_result = nullptr;
    check(sslr_data_app_run(data.get(), &job.options, &raw_result));
    DataAppPtr result(raw_result);
    std::size_t size = 0;
    check(sslr_data_app_csv(result.get(), nullptr, 0, &size));
    std::string text(size, '\0');
    check(sslr_data_app_csv(result.get(), text.data(), text.size(), &size));
    text.resize(size - 1);
    return text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised linear regression: estimation, statistical gain and simulation"};
    app.require_subcommand(1);
    Flags flags;
    std::uint64_t seed = 0;
    int threads = 0;
    auto add_common = [&](CLI::App* sub, bool seed_required) {
        sub->add_option("--config", flags.config_path, "JSON config file");
        sub->add_option("--seed", seed, seed_required ? "Master seed (required)" : "Optimizer seed");
        sub->add_option("--threads", threads, "Worker cap; 0 uses every hardware thread")->check(CLI::Range(0, 4096));
        sub->add_option("--out", flags.out, "Output file (JSON for fit/gain, CSV for simulate/data-app)");
    };
    auto* fit = app.add_subcommand("fit", "Fit an estimator to CSV data and write a JSON report");
    auto* gain = app.add_subcommand("gain", "Statistical gain of a Gaussian model as JSON");
    auto* sim = app.add_subcommand("simulate", "Run a simulation setting and write the gain curve as CSV");
    auto* dapp = app.add_subcommand("data-app", "Repeated matched/unmatched protocol on a data set; CSV summary");
    add_common(fit, false);
    add_common(gain, false);
    add_common(sim, true);
    add_common(dapp, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "sslr: error code=" << kUsage << " kind=" << exit_kind(kUsage) << " message=\""
                  << escape(e.what()) << "\"\n";
        return kUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed")) flags.seed = seed;
    if (active->count("--threads")) flags.threads = threads;
    const std::string command = active->get_name();

    try {
        if (flags.config_path.empty() && command != "simulate")
            die(kMissingKey, "--config is required for " + command);
        const json cfg = read_config(flags.config_path);
        std::string text, out;
        if (command == "fit") {
            const FitJob job = parse_fit(cfg, flags);
            out = job.out;
            text = run_fit(job);
        } else if (command == "gain") {
            const GainJob job = parse_gain(cfg, flags);
            out = job.out;
            text = run_gain(job);
        } else if (command == "simulate") {
            SimulateJob job = parse_simulate(cfg, flags);
            out = job.out;
            text = run_simulate(job);
        } else {
            DataAppJob job = parse_data_app(cfg, flags);
            out = job.out;
            text = run_data_app(job);
        }
        write_output(out, text);
        return kOk;
    } catch (const Failure& f) {
        std::cerr << "sslr: error code=" << f.code << " kind=" << exit_kind(f.code) << " message=\""
                  << escape(f.message) << "\"\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "sslr: error code=1 kind=internal message=\"" << escape(e.what()) << "\"\n";
        return 1;
    }
}
