#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tsb/losses.hpp"
#include "tsb/split.hpp"
#include "tsb/tree.hpp"

namespace tsb {

enum class Side { Left, Right };

/// One child's re-weighting: out_i proportional to w_i * (lambda + 1[i in side]),
/// normalized to sum 1. member_mask marks the left partition. At
/// lambda = infinity the input weights are returned exactly. Throws
/// NumericError when the normalizer is zero (lambda = 0 with an empty side).
WeightVector reweight_side(const WeightVector& w, const Mask& member_mask,
                           Lambda lambda, Side side);

std::pair<WeightVector, WeightVector> update_weights(const WeightVector& w,
                                                     const Mask& member_mask,
                                                     Lambda lambda);

/// Closed-form weights after a whole path of updates:
/// w_i proportional to w0_i * (lambda+1)^{a_i} * lambda^{b_i}, where a_i
/// counts the path levels whose partition contains i and b_i the rest.
/// Finite lambda only; serves as the oracle against iterated reweighting.
WeightVector closed_form_weight(const WeightVector& w0,
                                const std::vector<Mask>& path_masks,
                                Lambda lambda);

struct TrainConfig {
    std::size_t depth = 1;
    Lambda lambda{0.0};
    LossKind loss = LossKind::SquaredError;
    double shrinkage = 1.0; // in (0, 1]
    std::optional<WeightVector> initial_weights; // default: uniform
};

/// Per-node snapshot emitted while growing, for diagnostics and the
/// limit-behavior tests. `domain` is training-instance membership of the
/// node's region; f_before/f_after bracket this node's function update.
struct NodeTrace {
    std::size_t level = 0; // 1-based
    Mask domain;
    std::vector<double> weights;
    std::vector<double> f_before;
    std::vector<double> f_after;
    Stump stump;
    double left_increment = 0.0;
    double right_increment = 0.0;
};

using TraceSink = std::function<void(const NodeTrace&)>;

TsbModel train(const Dataset& data, const TrainConfig& config);
TsbModel train(const Dataset& data, const TrainConfig& config, const TraceSink& sink);

/// Accumulated prediction base + sum of increments along x's path. For
/// binomial deviance this is the margin F; the label is sign(F) with F = 0
/// predicting +1, and p(y=+1) = 1 / (1 + exp(-2F)).
double predict(const TsbModel& model, std::span<const double> x);
std::vector<double> predict(const TsbModel& model, const Dataset& data);
double predict_probability(const TsbModel& model, std::span<const double> x);

} // namespace tsb
