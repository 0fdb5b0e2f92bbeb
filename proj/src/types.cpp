#include "tsb/types.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

namespace tsb {

namespace {

bool is_pm_one(double v) { return v == 1.0 || v == -1.0; }

} // namespace

Dataset::Dataset(std::vector<double> features, std::size_t n_cols,
                 std::vector<double> labels, std::vector<std::string> feature_names,
                 LabelKind label_kind)
    : x_(std::move(features)), y_(std::move(labels)), names_(std::move(feature_names)),
      d_(n_cols), kind_(label_kind) {
    if (d_ == 0) throw DataError("dataset needs at least one feature column");
    if (x_.size() % d_ != 0) throw DataError("feature matrix size is not a multiple of the column count");
    n_ = x_.size() / d_;
    if (n_ == 0) throw DataError("dataset needs at least one instance");
    if (y_.size() != n_) throw DataError("label count does not match instance count");

    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!std::isfinite(x_[i])) {
            throw DataError("non-finite feature value at row " + std::to_string(i / d_ + 1) +
                            ", column " + std::to_string(i % d_ + 1));
        }
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (!std::isfinite(y_[i])) throw DataError("non-finite label at row " + std::to_string(i + 1));
        if (kind_ == LabelKind::Binary && !is_pm_one(y_[i])) {
            throw DataError("binary labels must be -1 or +1 (row " + std::to_string(i + 1) + ")");
        }
    }

    if (names_.empty()) {
        names_.reserve(d_);
        for (std::size_t j = 0; j < d_; ++j) names_.push_back("x" + std::to_string(j + 1));
    }
    if (names_.size() != d_) throw DataError("feature name count does not match column count");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(rows.size() * d_);
    y.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= n_) throw DataError("subset row index out of range");
        const auto row_span = row(r);
        x.insert(x.end(), row_span.begin(), row_span.end());
        y.push_back(y_[r]);
    }
    return Dataset(std::move(x), d_, std::move(y), names_, kind_);
}

WeightVector WeightVector::uniform(std::size_t n) {
    if (n == 0) throw DataError("weight vector must be non-empty");
    return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::normalized(std::vector<double> values) {
    if (values.empty()) throw DataError("weight vector must be non-empty");
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("non-finite weight");
        if (v < 0.0) throw DataError("negative weight");
        sum += v;
    }
    if (sum <= 0.0) throw NumericError("weight vector has zero total mass");
    for (double& v : values) v /= sum;
    return WeightVector(std::move(values));
}

Lambda::Lambda(double value) : value_(value), infinite_(false) {
    if (std::isnan(value_)) throw UsageError("lambda must not be NaN");
    if (std::isinf(value_)) {
        if (value_ < 0.0) throw UsageError("lambda must be non-negative");
        infinite_ = true;
        value_ = 0.0;
        return;
    }
    if (value_ < 0.0) throw UsageError("lambda must be non-negative");
    if (value_ < 1e-6) value_ = 0.0;
}

Lambda Lambda::infinity() { return Lambda(); }

Lambda Lambda::parse(const std::string& token) {
    if (token == "inf" || token == "INF" || token == "Inf" || token == "infinity") {
        return infinity();
    }
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &consumed);
    } catch (const std::exception&) {
        throw UsageError("cannot parse lambda '" + token + "'");
    }
    if (consumed != token.size()) throw UsageError("cannot parse lambda '" + token + "'");
    return Lambda(v);
}

double Lambda::value() const {
    if (infinite_) throw NumericError("infinite lambda has no finite value");
    return value_;
}

std::string Lambda::str() const {
    if (infinite_) return "inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value_);
    return std::string(buf, res.ptr);
}

} // namespace tsb
