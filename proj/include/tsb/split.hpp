#pragma once

#include <cstdint>
#include <span>

#include "tsb/stump.hpp"
#include "tsb/types.hpp"

namespace tsb {

/// Per-feature instance orderings, computed once per dataset and reused by
/// every stump fit during training.
class FeatureOrder {
public:
    explicit FeatureOrder(const Dataset& data);

    std::span<const std::uint32_t> order(std::size_t feature) const {
        return {idx_.data() + feature * n_, n_};
    }
    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }

private:
    std::vector<std::uint32_t> idx_; // d blocks of n
    std::size_t n_;
    std::size_t d_;
};

/// Weighted least-squares stump fit. Candidate thresholds are midpoints
/// between consecutive distinct feature values among instances with strictly
/// positive weight; each side's value is the weighted mean of residuals on
/// that side. Ties in weighted SSE (within 1e-12) resolve to the smaller
/// feature index, then the smaller threshold. When no candidate exists (all
/// positive-weight instances identical in every feature) the degenerate
/// -inf stump is returned with both values at the weighted residual mean.
/// Throws NumericError when no instance has positive weight.
Stump fit_stump(const FeatureOrder& order, const Dataset& data,
                std::span<const double> residuals, const WeightVector& w);

Stump fit_stump(const Dataset& data, std::span<const double> residuals,
                const WeightVector& w);

/// sum_i w_i (residuals_i - stump(x_i))^2, the quantity the fit minimizes.
double stump_weighted_sse(const Stump& stump, const Dataset& data,
                          std::span<const double> residuals,
                          const WeightVector& w);

/// Tolerance under which two candidate SSE values count as tied.
inline constexpr double kSplitTieTolerance = 1e-12;

} // namespace tsb
