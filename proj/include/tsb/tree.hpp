#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tsb/stump.hpp"
#include "tsb/types.hpp"

namespace tsb {

/// Node of the boosted tree. Increments are stored with rho and shrinkage
/// already folded in, so prediction is pure accumulation along the path.
struct TsbNode {
    bool leaf = true;
    Stump stump;
    double left_increment = 0.0;
    double right_increment = 0.0;
    std::unique_ptr<TsbNode> left;
    std::unique_ptr<TsbNode> right;

    static std::unique_ptr<TsbNode> make_leaf() { return std::make_unique<TsbNode>(); }
    static std::unique_ptr<TsbNode> make_internal(const Stump& s, double inc_left,
                                                  double inc_right);
};

struct RouteStep {
    const TsbNode* node;
    bool went_left;
};

/// Unique root-to-leaf path of x; one step per internal node visited.
/// Throws DataError when x does not have `dim` entries.
std::vector<RouteStep> route(const TsbNode& root, std::span<const double> x,
                             std::size_t dim);

struct TsbModel {
    std::unique_ptr<TsbNode> root;
    double base_value = 0.0;
    std::size_t depth = 0;
    Lambda lambda{0.0};
    LossKind loss = LossKind::SquaredError;
    double shrinkage = 1.0;
    std::vector<std::string> feature_names;
};

} // namespace tsb
