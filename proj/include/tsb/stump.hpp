#pragma once

#include <cstddef>
#include <span>

namespace tsb {

/// Axis-aligned split with one constant output per side. Membership is fixed
/// project-wide: x goes left iff x[feature] <= threshold. A -inf threshold
/// sends everything right (the degenerate "no usable split" stump).
struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    double left_value = 0.0;
    double right_value = 0.0;

    bool goes_left(std::span<const double> x) const { return x[feature] <= threshold; }
    double value_at(std::span<const double> x) const {
        return goes_left(x) ? left_value : right_value;
    }
};

} // namespace tsb
