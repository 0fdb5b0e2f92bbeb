#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsb/errors.hpp"

namespace tsb {

enum class LossKind { SquaredError, BinomialDeviance };
enum class LabelKind { Binary, Continuous };

using Mask = std::vector<std::uint8_t>;

/// N x d numeric feature matrix with labels. Immutable after construction;
/// safe to share across threads.
class Dataset {
public:
    /// `features` is row-major with `n_cols` columns. Binary labels must be
    /// exactly -1/+1. Throws DataError on non-finite cells or bad shapes.
    Dataset(std::vector<double> features, std::size_t n_cols,
            std::vector<double> labels, std::vector<std::string> feature_names,
            LabelKind label_kind);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }

    double at(std::size_t i, std::size_t j) const { return x_[i * d_ + j]; }
    std::span<const double> row(std::size_t i) const { return {x_.data() + i * d_, d_}; }

    const std::vector<double>& labels() const { return y_; }
    double label(std::size_t i) const { return y_[i]; }
    const std::vector<std::string>& feature_names() const { return names_; }
    LabelKind label_kind() const { return kind_; }

    Dataset subset(const std::vector<std::size_t>& rows) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<std::string> names_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    LabelKind kind_ = LabelKind::Continuous;
};

/// Per-instance weights, kept in normalized form: non-negative, summing to 1.
class WeightVector {
public:
    static WeightVector uniform(std::size_t n);

    /// Normalizes `values` to sum 1. Throws NumericError if the mass is zero,
    /// or DataError on negative/non-finite entries.
    static WeightVector normalized(std::vector<double> values);

    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const { return v_; }

private:
    explicit WeightVector(std::vector<double> v) : v_(std::move(v)) {}
    std::vector<double> v_;
};

/// The re-weighting ratio. Infinity is a first-class sentinel so the
/// no-reweighting limit is exact instead of an overflow hazard. Finite values
/// below 1e-6 collapse to exactly zero (linear-space weight maintenance
/// underflows below that).
class Lambda {
public:
    Lambda(double value); // implicit: bare numbers read as finite lambdas
    static Lambda infinity();
    static Lambda parse(const std::string& token); // "inf" or a float

    bool is_infinite() const { return infinite_; }
    bool is_zero() const { return !infinite_ && value_ == 0.0; }
    double value() const; // finite lambdas only
    std::string str() const;

    bool operator==(const Lambda& o) const {
        return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
    }

private:
    Lambda() : value_(0.0), infinite_(true) {}
    double value_;
    bool infinite_;
};

} // namespace tsb
