#include "tsb/tree.hpp"

namespace tsb {

std::unique_ptr<TsbNode> TsbNode::make_internal(const Stump& s, double inc_left,
                                                double inc_right) {
    auto node = std::make_unique<TsbNode>();
    node->leaf = false;
    node->stump = s;
    node->left_increment = inc_left;
    node->right_increment = inc_right;
    node->left = make_leaf();
    node->right = make_leaf();
    return node;
}

std::vector<RouteStep> route(const TsbNode& root, std::span<const double> x,
                             std::size_t dim) {
    if (x.size() != dim) {
        throw DataError("input has " + std::to_string(x.size()) + " features, expected " +
                        std::to_string(dim));
    }
    std::vector<RouteStep> path;
    const TsbNode* node = &root;
    while (!node->leaf) {
        const bool left = node->stump.goes_left(x);
        path.push_back({node, left});
        node = left ? node->left.get() : node->right.get();
    }
    return path;
}

} // namespace tsb
