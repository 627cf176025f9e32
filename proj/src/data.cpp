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

#include "sslr/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sslr/error.hpp"
#include "sslr/random.hpp"

namespace sslr {
namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '"')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '"')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_cell(std::string_view raw, std::size_t row, const std::string& column) {
    const std::string cell = trim(raw);
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        fail(ErrorCode::Parse, "row " + std::to_string(row) + ", column '" + column +
                                   "': cannot parse '" + cell + "' as a number");
    }
    return value;
}

} // namespace

DataBlock DataBlock::select(const std::vector<std::size_t>& index) const {
    DataBlock out;
    out.covariate_names = covariate_names;
    out.response_name = response_name;
    out.x.resize(static_cast<Eigen::Index>(index.size()), x.cols());
    if (has_response()) out.y.resize(static_cast<Eigen::Index>(index.size()));
    for (std::size_t r = 0; r < index.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        const auto src = static_cast<Eigen::Index>(index[r]);
        out.x.row(i) = x.row(src);
        if (has_response()) out.y[i] = y[src];
    }
    return out;
}

DataBlock load_csv(const std::string& path, const std::string& response_column,
                   const std::vector<std::string>& covariate_columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::Schema, "'" + path + "' has no header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    std::vector<std::string> header;
    for (auto field : split(line)) header.push_back(trim(field));

    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        fail(ErrorCode::Schema, "'" + path + "' has no column '" + name + "'");
    };
    std::vector<std::size_t> cov_idx;
    for (const auto& name : covariate_columns) cov_idx.push_back(column_index(name));
    const bool has_response = !response_column.empty();
    const std::size_t resp_idx = has_response ? column_index(response_column) : 0;

    std::vector<double> xs, ys;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split(line);
        if (fields.size() != header.size()) {
            fail(ErrorCode::Parse, "row " + std::to_string(row) + ": expected " +
                                       std::to_string(header.size()) + " fields, found " +
                                       std::to_string(fields.size()));
        }
        for (std::size_t k = 0; k < cov_idx.size(); ++k)
            xs.push_back(parse_cell(fields[cov_idx[k]], row, covariate_columns[k]));
        if (has_response) ys.push_back(parse_cell(fields[resp_idx], row, response_column));
    }

    DataBlock block;
    block.covariate_names = covariate_columns;
    block.response_name = response_column;
    const auto rows = static_cast<Eigen::Index>(row);
    const auto cols = static_cast<Eigen::Index>(covariate_columns.size());
    block.x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        xs.data(), rows, cols);
    if (has_response) block.y = Eigen::Map<Vector>(ys.data(), rows);
    return block;
}

SemiSupervisedSample::SemiSupervisedSample(Matrix mx, Vector my, Matrix ux, Vector uy)
    : matched_x(std::move(mx)), matched_y(std::move(my)), unmatched_x(std::move(ux)),
      unmatched_y(std::move(uy)) {
    validate();
}

Eigen::Index SemiSupervisedSample::p() const {
    return matched_x.cols() > 0 ? matched_x.cols() : unmatched_x.cols();
}

double SemiSupervisedSample::lambda_hat() const {
    if (n_y() == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(m()) / static_cast<double>(n_y());
}

void SemiSupervisedSample::validate() const {
    if (matched_x.rows() != matched_y.size())
        fail(ErrorCode::Shape, "matched covariates have " + std::to_string(matched_x.rows()) +
                                   " rows but there are " + std::to_string(matched_y.size()) +
                                   " matched responses");
    if (matched_x.rows() > 0 && unmatched_x.rows() > 0 && matched_x.cols() != unmatched_x.cols())
        fail(ErrorCode::Shape, "matched and unmatched covariates differ in dimension");
}

ProtocolDraw subsample_protocol(const DataBlock& full, const SplitSpec& spec) {
    if (!full.has_response()) fail(ErrorCode::InvalidArgument, "protocol needs a response column");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0))
        fail(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1]");
    const auto total = static_cast<std::size_t>(full.rows());
    const auto train_size =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(total)));
    const std::size_t need = spec.matched_count + spec.unmatched_count;
    if (need > train_size)
        fail(ErrorCode::Sizing, "matched plus unmatched count (" + std::to_string(need) +
                                    ") exceeds the training set size (" +
                                    std::to_string(train_size) + ")");

    Rng split_rng(derive_seed(spec.seed, 1));
    const auto perm = partial_shuffle(total, train_size, split_rng);

    ProtocolDraw draw;
    draw.train_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_size));
    draw.test_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_size), perm.end());

    // Matched rows first, then unmatched: both come from one partial shuffle,
    // which keeps smaller unmatched draws nested in larger ones.
    Rng pick_rng(derive_seed(spec.seed, 2));
    const auto pick = partial_shuffle(train_size, need, pick_rng);
    for (std::size_t i = 0; i < spec.matched_count; ++i) draw.matched_rows.push_back(draw.train_rows[pick[i]]);
    for (std::size_t i = spec.matched_count; i < need; ++i)
        draw.unmatched_rows.push_back(draw.train_rows[pick[i]]);

    const DataBlock matched = full.select(draw.matched_rows);
    const DataBlock unmatched = full.select(draw.unmatched_rows);
    Rng delink_rng(derive_seed(spec.seed, 3, spec.unmatched_count));
    const auto order = partial_shuffle(spec.unmatched_count, spec.unmatched_count, delink_rng);
    Vector delinked(static_cast<Eigen::Index>(spec.unmatched_count));
    for (std::size_t i = 0; i < order.size(); ++i)
        delinked[static_cast<Eigen::Index>(i)] = unmatched.y[static_cast<Eigen::Index>(order[i])];

    draw.sample = SemiSupervisedSample(matched.x, matched.y, unmatched.x, delinked);
    draw.test = full.select(draw.test_rows);
    return draw;
}

Matrix Standardization::apply_x(const Matrix& x) const {
    return (x.rowwise() - x_mean.transpose()).array().rowwise() / x_scale.transpose().array();
}

Matrix Standardization::restore_x(const Matrix& x) const {
    Matrix out = x.array().rowwise() * x_scale.transpose().array();
    return out.rowwise() + x_mean.transpose();
}

Vector Standardization::apply_y(const Vector& y) const { return y.array() - y_shift; }

Vector Standardization::restore_y(const Vector& y) const { return y.array() + y_shift; }

std::pair<Vector, double> Standardization::to_original(const Vector& beta, double intercept) const {
    Vector b = beta.array() / x_scale.array();
    return {b, intercept + y_shift - b.dot(x_mean)};
}

std::pair<Vector, double> Standardization::to_standard(const Vector& beta, double intercept) const {
    Vector b = beta.array() * x_scale.array();
    return {b, intercept - y_shift + beta.dot(x_mean)};
}

StandardizedSample standardize(const SemiSupervisedSample& sample, bool center) {
    sample.validate();
    const Eigen::Index p = sample.p();
    const Eigen::Index rows = sample.m() + sample.n_x();
    if (rows < 2) fail(ErrorCode::DegenerateColumn, "standardization needs at least two covariate rows");
    Matrix all(rows, p);
    all << sample.matched_x, sample.unmatched_x;

    Standardization map;
    map.centered = center;
    const Vector mean = all.colwise().mean();
    map.x_scale.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const double ss = (all.col(k).array() - mean[k]).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(rows - 1));
        if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean[k]))))
            fail(ErrorCode::DegenerateColumn, "covariate column " + std::to_string(k) + " has zero variance");
        map.x_scale[k] = sd;
    }
    map.x_mean = center ? mean : Vector::Zero(p);
    if (center) {
        const Eigen::Index ny = sample.m() + sample.n_y();
        double total = sample.matched_y.sum() + sample.unmatched_y.sum();
        map.y_shift = ny > 0 ? total / static_cast<double>(ny) : 0.0;
    }

    StandardizedSample out;
    out.map = map;
    out.sample.matched_x = map.apply_x(sample.matched_x);
    out.sample.unmatched_x = map.apply_x(sample.unmatched_x);
    out.sample.matched_y = map.apply_y(sample.matched_y);
    out.sample.unmatched_y = map.apply_y(sample.unmatched_y);
    return out;
}

OlsSummary ols_with_intercept(const Matrix& x, const Vector& y) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (y.size() != n) fail(ErrorCode::Shape, "response length does not match covariate rows");
    if (n <= p + 1) fail(ErrorCode::Sizing, "too few rows for an intercept fit");
    Matrix design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p + 1) fail(ErrorCode::Rank, "design with intercept is rank deficient");
    const Vector coef = qr.solve(y);
    const Vector resid = y - design * coef;
    OlsSummary out;
    out.intercept = coef[0];
    out.beta = coef.tail(p);
    const double rss = resid.squaredNorm();
    const double tss = (y.array() - y.mean()).square().sum();
    out.residual_sd = std::sqrt(rss / static_cast<double>(n - p - 1));
    out.r_squared = 1.0 - rss / tss;
    return out;
}

} // namespace sslr
