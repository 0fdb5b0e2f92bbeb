#include "tsb/baselines.hpp"

#include <cmath>
#include <limits>

namespace tsb {

namespace {

std::unique_ptr<CartNode> make_cart_leaf(double value) {
    auto node = std::make_unique<CartNode>();
    node->leaf = true;
    node->value = value;
    return node;
}

class CartGrower {
public:
    CartGrower(const Dataset& data) : data_(data), order_(data) {}

    std::unique_ptr<CartNode> grow(const std::vector<std::size_t>& rows,
                                   std::size_t levels_left) {
        double mean = 0.0;
        for (std::size_t r : rows) mean += data_.label(r);
        mean /= static_cast<double>(rows.size());

        if (levels_left == 0 || rows.size() == 1 || constant_labels(rows)) {
            return make_cart_leaf(mean);
        }

        // Per-node uniform weights summing to 1 keep the SSE scale (and so
        // the tie window) aligned with the boosted trainer's node weights.
        std::vector<double> w(data_.size(), 0.0);
        const double unit = 1.0 / static_cast<double>(rows.size());
        for (std::size_t r : rows) w[r] = unit;

        const Stump stump =
            fit_stump(order_, data_, data_.labels(), WeightVector::normalized(std::move(w)));
        if (std::isinf(stump.threshold)) return make_cart_leaf(mean); // no usable split

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (std::size_t r : rows) {
            if (stump.goes_left(data_.row(r))) left_rows.push_back(r);
            else right_rows.push_back(r);
        }

        auto node = std::make_unique<CartNode>();
        node->leaf = false;
        node->feature = stump.feature;
        node->threshold = stump.threshold;
        node->left = grow(left_rows, levels_left - 1);
        node->right = grow(right_rows, levels_left - 1);
        return node;
    }

private:
    bool constant_labels(const std::vector<std::size_t>& rows) const {
        const double first = data_.label(rows.front());
        for (std::size_t r : rows) {
            if (data_.label(r) != first) return false;
        }
        return true;
    }

    const Dataset& data_;
    FeatureOrder order_;
};

} // namespace

CartModel fit_cart(const Dataset& data, std::size_t max_depth) {
    CartModel model;
    model.depth = max_depth;
    model.feature_names = data.feature_names();

    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    CartGrower grower(data);
    model.root = grower.grow(all, max_depth);
    return model;
}

double predict_cart(const CartModel& model, std::span<const double> x) {
    if (x.size() != model.feature_names.size()) {
        throw DataError("input has " + std::to_string(x.size()) + " features, expected " +
                        std::to_string(model.feature_names.size()));
    }
    const CartNode* node = model.root.get();
    while (!node->leaf) {
        node = (x[node->feature] <= node->threshold) ? node->left.get() : node->right.get();
    }
    return node->value;
}

std::vector<double> predict_cart(const CartModel& model, const Dataset& data) {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict_cart(model, data.row(i));
    return out;
}

GbsModel fit_gbs(const Dataset& data, const GbsConfig& config) {
    if (config.shrinkage <= 0.0 || config.shrinkage > 1.0) {
        throw UsageError("shrinkage must be in (0, 1]");
    }
    if (config.loss == LossKind::BinomialDeviance && data.label_kind() != LabelKind::Binary) {
        throw DataError("binomial deviance requires -1/+1 labels");
    }

    const std::size_t n = data.size();
    const WeightVector w = WeightVector::uniform(n);

    GbsModel model;
    model.loss = config.loss;
    model.shrinkage = config.shrinkage;
    model.feature_names = data.feature_names();
    model.base_value = base_value(config.loss, data.labels(), w);
    model.stages.reserve(config.rounds);

    FeatureOrder order(data);
    std::vector<double> f_values(n, model.base_value);
    std::vector<double> residuals(n);

    for (std::size_t t = 0; t < config.rounds; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            residuals[i] = negative_gradient(config.loss, data.label(i), f_values[i]);
        }
        const Stump stump = fit_stump(order, data, residuals, w);

        Mask member(n);
        Mask complement(n);
        bool left_any = false;
        bool right_any = false;
        for (std::size_t i = 0; i < n; ++i) {
            const bool goes_left = stump.goes_left(data.row(i));
            member[i] = goes_left ? 1 : 0;
            complement[i] = goes_left ? 0 : 1;
            left_any = left_any || goes_left;
            right_any = right_any || !goes_left;
        }

        GbsStage stage;
        stage.stump = stump;
        stage.left_increment =
            config.shrinkage *
            (left_any ? side_increment(config.loss, residuals, data.labels(), f_values, w, member)
                      : stump.left_value);
        stage.right_increment =
            config.shrinkage *
            (right_any
                 ? side_increment(config.loss, residuals, data.labels(), f_values, w, complement)
                 : stump.right_value);

        for (std::size_t i = 0; i < n; ++i) {
            f_values[i] += member[i] ? stage.left_increment : stage.right_increment;
        }
        model.stages.push_back(stage);
    }
    return model;
}

double predict_gbs(const GbsModel& model, std::span<const double> x) {
    if (x.size() != model.feature_names.size()) {
        throw DataError("input has " + std::to_string(x.size()) + " features, expected " +
                        std::to_string(model.feature_names.size()));
    }
    double f = model.base_value;
    for (const GbsStage& stage : model.stages) {
        f += stage.stump.goes_left(x) ? stage.left_increment : stage.right_increment;
    }
    return f;
}

std::vector<double> predict_gbs(const GbsModel& model, const Dataset& data) {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict_gbs(model, data.row(i));
    return out;
}

} // namespace tsb
