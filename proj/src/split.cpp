#include "tsb/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsb {

FeatureOrder::FeatureOrder(const Dataset& data) : n_(data.size()), d_(data.dim()) {
    idx_.resize(n_ * d_);
    for (std::size_t f = 0; f < d_; ++f) {
        std::uint32_t* block = idx_.data() + f * n_;
        for (std::size_t i = 0; i < n_; ++i) block[i] = static_cast<std::uint32_t>(i);
        std::stable_sort(block, block + n_, [&data, f](std::uint32_t a, std::uint32_t b) {
            return data.at(a, f) < data.at(b, f);
        });
    }
}

namespace {

struct BestCandidate {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double left_weight = 0.0;
    double left_sum = 0.0;
};

// Walks every candidate of one feature in ascending threshold order.
// Visitor signature: (threshold, left_weight, left_sum) -> bool keep_going.
template <typename Visitor>
void scan_feature(const FeatureOrder& order, const Dataset& data,
                  std::span<const double> residuals, const WeightVector& w,
                  std::size_t feature, Visitor&& visit) {
    double left_weight = 0.0;
    double left_sum = 0.0;
    bool have_prev = false;
    double prev_value = 0.0;

    for (std::uint32_t i : order.order(feature)) {
        const double v = data.at(i, feature);
        const double wi = w[i];
        if (wi > 0.0) {
            if (have_prev && v > prev_value) {
                const double mid = 0.5 * (prev_value + v);
                // A midpoint that rounds up to v would not separate the pair.
                if (mid < v) {
                    if (!visit(mid, left_weight, left_sum)) return;
                }
            }
            prev_value = v;
            have_prev = true;
        }
        left_weight += wi;
        left_sum += wi * residuals[i];
    }
}

} // namespace

Stump fit_stump(const FeatureOrder& order, const Dataset& data,
                std::span<const double> residuals, const WeightVector& w) {
    const std::size_t n = data.size();
    if (residuals.size() != n || w.size() != n) throw DataError("fit_stump size mismatch");
    for (double r : residuals) {
        if (!std::isfinite(r)) throw NumericError("non-finite residual in fit_stump");
    }

    double total_weight = 0.0;
    double total_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total_weight += w[i];
        total_sum += w[i] * residuals[i];
    }
    if (total_weight <= 0.0) throw NumericError("fit_stump needs a positive-weight instance");

    const auto gain_of = [&](double left_weight, double left_sum) {
        const double right_weight = total_weight - left_weight;
        const double right_sum = total_sum - left_sum;
        if (left_weight <= 0.0 || right_weight <= 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        return left_sum * left_sum / left_weight + right_sum * right_sum / right_weight;
    };

    // Pass 1: the best achievable gain (equivalently, the minimum weighted
    // SSE; the residual second moment is a shared constant).
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < data.dim(); ++f) {
        scan_feature(order, data, residuals, w, f,
                     [&](double, double lw, double ls) {
                         best_gain = std::max(best_gain, gain_of(lw, ls));
                         return true;
                     });
    }

    if (!std::isfinite(best_gain)) {
        // No candidate: all positive-weight instances identical in every
        // feature. Everything goes right of the -inf threshold.
        const double mean = total_sum / total_weight;
        return Stump{0, -std::numeric_limits<double>::infinity(), mean, mean};
    }

    // Pass 2: first candidate within the tie window, in (feature, threshold)
    // order — the deterministic tie-break shared by the whole project.
    BestCandidate chosen;
    for (std::size_t f = 0; f < data.dim() && !chosen.found; ++f) {
        scan_feature(order, data, residuals, w, f,
                     [&](double threshold, double lw, double ls) {
                         if (gain_of(lw, ls) >= best_gain - kSplitTieTolerance) {
                             chosen = {true, f, threshold, lw, ls};
                             return false;
                         }
                         return true;
                     });
    }

    Stump stump;
    stump.feature = chosen.feature;
    stump.threshold = chosen.threshold;
    stump.left_value = chosen.left_sum / chosen.left_weight;
    stump.right_value = (total_sum - chosen.left_sum) / (total_weight - chosen.left_weight);
    return stump;
}

Stump fit_stump(const Dataset& data, std::span<const double> residuals,
                const WeightVector& w) {
    return fit_stump(FeatureOrder(data), data, residuals, w);
}

double stump_weighted_sse(const Stump& stump, const Dataset& data,
                          std::span<const double> residuals, const WeightVector& w) {
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double diff = residuals[i] - stump.value_at(data.row(i));
        sse += w[i] * diff * diff;
    }
    return sse;
}

} // namespace tsb
