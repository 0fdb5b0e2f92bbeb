#include "tsb/losses.hpp"

#include <cmath>
#include <iostream>

namespace tsb {

namespace {

constexpr double kExpClamp = 500.0;

double clamped_exp(double arg) {
    if (arg > kExpClamp) arg = kExpClamp;
    if (arg < -kExpClamp) arg = -kExpClamp;
    return std::exp(arg);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    if (z > kExpClamp) return z;
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(clamped_exp(z));
}

void check_finite(double y, double f) {
    if (!std::isfinite(y) || !std::isfinite(f)) {
        throw NumericError("non-finite input to loss evaluation");
    }
}

} // namespace

double loss_value(LossKind loss, double y, double f) {
    check_finite(y, f);
    switch (loss) {
        case LossKind::SquaredError: {
            const double r = y - f;
            return 0.5 * r * r;
        }
        case LossKind::BinomialDeviance:
            return softplus(-2.0 * y * f);
    }
    throw NumericError("unknown loss");
}

double negative_gradient(LossKind loss, double y, double f) {
    check_finite(y, f);
    switch (loss) {
        case LossKind::SquaredError:
            return y - f;
        case LossKind::BinomialDeviance:
            return 2.0 * y / (1.0 + clamped_exp(2.0 * y * f));
    }
    throw NumericError("unknown loss");
}

double base_value(LossKind loss, std::span<const double> y, const WeightVector& w) {
    if (y.size() != w.size()) throw DataError("label/weight size mismatch");
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) mean += w[i] * y[i];
    if (loss == LossKind::SquaredError) return mean;

    // Half the weighted log-odds of the +-1 labels.
    constexpr double limit = 1.0 - 1e-12;
    if (mean >= limit || mean <= -limit) {
        std::cerr << "warning: one-class labels, clamping base log-odds\n";
        mean = mean > 0.0 ? limit : -limit;
    }
    return 0.5 * std::log((1.0 + mean) / (1.0 - mean));
}

double side_increment(LossKind loss, std::span<const double> residuals,
                      std::span<const double> labels,
                      std::span<const double> f_values, const WeightVector& w,
                      const Mask& member_mask) {
    (void)labels;
    (void)f_values;
    const std::size_t n = residuals.size();
    if (w.size() != n || member_mask.size() != n) {
        throw DataError("side_increment size mismatch");
    }

    double weight_sum = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!member_mask[i]) continue;
        const double wi = w[i];
        const double r = residuals[i];
        weight_sum += wi;
        numerator += wi * r;
        if (loss == LossKind::BinomialDeviance) {
            const double a = std::fabs(r);
            denominator += wi * a * (2.0 - a);
        }
    }
    if (weight_sum <= 0.0) throw NumericError("selected side carries zero weight");

    if (loss == LossKind::SquaredError) return numerator / weight_sum;
    if (denominator <= 0.0) return 0.0; // saturated margins, no usable curvature
    return numerator / denominator;
}

LossEvaluation evaluate_loss(LossKind loss, std::span<const double> y,
                             std::span<const double> f, const WeightVector& w) {
    if (y.size() != f.size() || y.size() != w.size()) {
        throw DataError("evaluate_loss size mismatch");
    }
    LossEvaluation out;
    out.per_instance.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out.per_instance[i] = loss_value(loss, y[i], f[i]);
        out.weighted_total += w[i] * out.per_instance[i];
    }
    return out;
}

} // namespace tsb
