#include "tsb/trainer.hpp"

#include <cmath>
#include <limits>

namespace tsb {

WeightVector reweight_side(const WeightVector& w, const Mask& member_mask,
                           Lambda lambda, Side side) {
    const std::size_t n = w.size();
    if (member_mask.size() != n) throw DataError("reweight_side mask size mismatch");
    if (lambda.is_infinite()) return w;

    const double lam = lambda.value();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool in_side = (side == Side::Left) ? member_mask[i] != 0 : member_mask[i] == 0;
        out[i] = w[i] * (lam + (in_side ? 1.0 : 0.0));
    }
    return WeightVector::normalized(std::move(out));
}

std::pair<WeightVector, WeightVector> update_weights(const WeightVector& w,
                                                     const Mask& member_mask,
                                                     Lambda lambda) {
    return {reweight_side(w, member_mask, lambda, Side::Left),
            reweight_side(w, member_mask, lambda, Side::Right)};
}

WeightVector closed_form_weight(const WeightVector& w0,
                                const std::vector<Mask>& path_masks, Lambda lambda) {
    if (lambda.is_infinite()) {
        throw UsageError("closed-form weights require a finite lambda");
    }
    const std::size_t n = w0.size();
    const double lam = lambda.value();

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t in_count = 0;
        std::size_t out_count = 0;
        for (const Mask& mask : path_masks) {
            if (mask.size() != n) throw DataError("closed_form_weight mask size mismatch");
            if (mask[i]) ++in_count;
            else ++out_count;
        }
        // 0^0 := 1 keeps the lambda = 0 case exact: zero iff ever outside.
        const double in_factor = in_count == 0 ? 1.0 : std::pow(lam + 1.0, static_cast<double>(in_count));
        const double out_factor = out_count == 0 ? 1.0 : std::pow(lam, static_cast<double>(out_count));
        out[i] = w0[i] * in_factor * out_factor;
    }
    return WeightVector::normalized(std::move(out));
}

namespace {

// Axis-aligned region bounds along the current path, used for the geometric
// feasibility check: a child whose region is empty as a set is never grown
// (no input can route there).
struct Box {
    std::vector<double> lower; // region is the product of (lower_f, upper_f]
    std::vector<double> upper;

    explicit Box(std::size_t dim)
        : lower(dim, -std::numeric_limits<double>::infinity()),
          upper(dim, std::numeric_limits<double>::infinity()) {}

    bool left_feasible(const Stump& s) const {
        return lower[s.feature] < std::min(upper[s.feature], s.threshold);
    }
    bool right_feasible(const Stump& s) const {
        return std::max(lower[s.feature], s.threshold) < upper[s.feature];
    }
    Box clipped_left(const Stump& s) const {
        Box b = *this;
        b.upper[s.feature] = std::min(b.upper[s.feature], s.threshold);
        return b;
    }
    Box clipped_right(const Stump& s) const {
        Box b = *this;
        b.lower[s.feature] = std::max(b.lower[s.feature], s.threshold);
        return b;
    }
};

class Grower {
public:
    Grower(const Dataset& data, const TrainConfig& config, const TraceSink& sink)
        : data_(data), config_(config), sink_(sink), order_(data) {}

    std::unique_ptr<TsbNode> grow(std::size_t levels_left, const WeightVector& w,
                                  const Mask& domain, std::vector<double> f_values,
                                  const Box& box, std::size_t level) {
        if (levels_left == 0) return TsbNode::make_leaf();

        const std::size_t n = data_.size();
        std::vector<double> residuals(n);
        for (std::size_t i = 0; i < n; ++i) {
            residuals[i] = negative_gradient(config_.loss, data_.label(i), f_values[i]);
        }

        const Stump stump = fit_stump(order_, data_, residuals, w);

        Mask member(n);
        Mask complement(n);
        bool left_any = false;
        bool right_any = false;
        for (std::size_t i = 0; i < n; ++i) {
            const bool goes_left = stump.goes_left(data_.row(i));
            member[i] = goes_left ? 1 : 0;
            complement[i] = goes_left ? 0 : 1;
            left_any = left_any || goes_left;
            right_any = right_any || !goes_left;
        }

        const double nu = config_.shrinkage;
        const double inc_left =
            nu * (left_any
                      ? side_increment(config_.loss, residuals, data_.labels(), f_values, w, member)
                      : stump.left_value);
        const double inc_right =
            nu * (right_any
                      ? side_increment(config_.loss, residuals, data_.labels(), f_values, w, complement)
                      : stump.right_value);

        std::vector<double> f_before;
        if (sink_) f_before = f_values;

        // The whole training set advances: every subtree re-weights all N
        // instances, so F must stay defined everywhere.
        for (std::size_t i = 0; i < n; ++i) {
            f_values[i] += member[i] ? inc_left : inc_right;
        }

        Mask left_domain(n);
        Mask right_domain(n);
        bool left_members = false;
        bool right_members = false;
        for (std::size_t i = 0; i < n; ++i) {
            left_domain[i] = (domain[i] && member[i]) ? 1 : 0;
            right_domain[i] = (domain[i] && complement[i]) ? 1 : 0;
            left_members = left_members || left_domain[i];
            right_members = right_members || right_domain[i];
        }

        if (sink_) {
            NodeTrace trace;
            trace.level = level;
            trace.domain = domain;
            trace.weights = w.values();
            trace.f_before = std::move(f_before);
            trace.f_after = f_values;
            trace.stump = stump;
            trace.left_increment = inc_left;
            trace.right_increment = inc_right;
            sink_(trace);
        }

        auto node = TsbNode::make_internal(stump, inc_left, inc_right);

        // A side is grown unless its region is geometrically empty, or
        // lambda = 0 left it without training instances (its weights would
        // have no mass to normalize).
        const bool grow_left =
            box.left_feasible(stump) && (!config_.lambda.is_zero() || left_members);
        const bool grow_right =
            box.right_feasible(stump) && (!config_.lambda.is_zero() || right_members);

        if (grow_left) {
            node->left = grow(levels_left - 1,
                              reweight_side(w, member, config_.lambda, Side::Left),
                              left_domain, f_values, box.clipped_left(stump), level + 1);
        }
        if (grow_right) {
            node->right = grow(levels_left - 1,
                               reweight_side(w, member, config_.lambda, Side::Right),
                               right_domain, std::move(f_values), box.clipped_right(stump),
                               level + 1);
        }
        return node;
    }

private:
    const Dataset& data_;
    const TrainConfig& config_;
    const TraceSink& sink_;
    FeatureOrder order_;
};

} // namespace

TsbModel train(const Dataset& data, const TrainConfig& config, const TraceSink& sink) {
    if (config.shrinkage <= 0.0 || config.shrinkage > 1.0) {
        throw UsageError("shrinkage must be in (0, 1]");
    }
    if (config.loss == LossKind::BinomialDeviance && data.label_kind() != LabelKind::Binary) {
        throw DataError("binomial deviance requires -1/+1 labels");
    }
    const std::size_t n = data.size();
    WeightVector w0 = config.initial_weights ? *config.initial_weights
                                             : WeightVector::uniform(n);
    if (w0.size() != n) throw DataError("initial weights size mismatch");

    TsbModel model;
    model.base_value = base_value(config.loss, data.labels(), w0);
    model.depth = config.depth;
    model.lambda = config.lambda;
    model.loss = config.loss;
    model.shrinkage = config.shrinkage;
    model.feature_names = data.feature_names();

    Grower grower(data, config, sink);
    std::vector<double> f_values(n, model.base_value);
    model.root = grower.grow(config.depth, w0, Mask(n, 1), std::move(f_values),
                             Box(data.dim()), 1);
    return model;
}

TsbModel train(const Dataset& data, const TrainConfig& config) {
    return train(data, config, TraceSink{});
}

double predict(const TsbModel& model, std::span<const double> x) {
    const auto path = route(*model.root, x, model.feature_names.size());
    double f = model.base_value;
    for (const RouteStep& step : path) {
        f += step.went_left ? step.node->left_increment : step.node->right_increment;
    }
    return f;
}

std::vector<double> predict(const TsbModel& model, const Dataset& data) {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(model, data.row(i));
    return out;
}

double predict_probability(const TsbModel& model, std::span<const double> x) {
    if (model.loss != LossKind::BinomialDeviance) {
        throw UsageError("probabilities are defined for the deviance loss only");
    }
    const double f = predict(model, x);
    const double arg = -2.0 * f;
    if (arg > 500.0) return 0.0;
    if (arg < -500.0) return 1.0;
    return 1.0 / (1.0 + std::exp(arg));
}

} // namespace tsb
