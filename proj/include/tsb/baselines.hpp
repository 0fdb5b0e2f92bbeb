#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tsb/losses.hpp"
#include "tsb/split.hpp"
#include "tsb/stump.hpp"

namespace tsb {

struct CartNode {
    bool leaf = true;
    double value = 0.0;      // leaf prediction: mean of y over the region
    std::size_t feature = 0; // internal nodes
    double threshold = 0.0;
    std::unique_ptr<CartNode> left;
    std::unique_ptr<CartNode> right;
};

struct CartModel {
    std::unique_ptr<CartNode> root;
    std::size_t depth = 0;
    std::vector<std::string> feature_names;
};

/// Plain CART regression tree with variance-reduction splits. Shares the
/// stump search (candidate generation and tie-breaks) with the boosted
/// trainer so structural comparisons are well defined. Stops at max_depth,
/// a single instance, zero label variance, or no usable split.
CartModel fit_cart(const Dataset& data, std::size_t max_depth);

double predict_cart(const CartModel& model, std::span<const double> x);
std::vector<double> predict_cart(const CartModel& model, const Dataset& data);

struct GbsStage {
    Stump stump;
    double left_increment = 0.0; // shrinkage folded in
    double right_increment = 0.0;
};

struct GbsModel {
    double base_value = 0.0;
    std::vector<GbsStage> stages;
    LossKind loss = LossKind::SquaredError;
    double shrinkage = 1.0;
    std::vector<std::string> feature_names;
};

struct GbsConfig {
    std::size_t rounds = 1;
    LossKind loss = LossKind::SquaredError;
    double shrinkage = 1.0;
};

/// Gradient boosted stumps: uniform-weight stump fits on pseudo-residuals,
/// per-side increments, additive accumulation.
GbsModel fit_gbs(const Dataset& data, const GbsConfig& config);

double predict_gbs(const GbsModel& model, std::span<const double> x);
std::vector<double> predict_gbs(const GbsModel& model, const Dataset& data);

} // namespace tsb
