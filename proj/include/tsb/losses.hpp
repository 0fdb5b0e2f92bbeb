#pragma once

#include <span>
#include <vector>

#include "tsb/types.hpp"

namespace tsb {

/// Pointwise loss. Squared error carries the 1/2 factor so its negative
/// gradient is exactly the residual y - f. Binomial deviance is
/// log(1 + exp(-2yF)) with labels in {-1,+1}.
double loss_value(LossKind loss, double y, double f);

/// Negative gradient of the loss at (y, f): the pseudo-residual the next
/// weak learner is fit to. Squared error: y - f. Deviance: 2y/(1+exp(2yF)).
double negative_gradient(LossKind loss, double y, double f);

/// Optimal constant initial prediction. Squared error: weighted mean of y.
/// Deviance: half the weighted log-odds; a one-class label vector is clamped
/// to +-(1 - 1e-12) with a warning on stderr instead of producing +-inf.
double base_value(LossKind loss, std::span<const double> y, const WeightVector& w);

/// Optimal additive step over the selected side of a split. Squared error:
/// weighted mean of the residuals (making rho = 1 exact). Deviance: one
/// Newton step  sum(w r) / sum(w |r| (2 - |r|))  on the deviance
/// pseudo-residuals. Throws NumericError when the side carries zero weight.
double side_increment(LossKind loss, std::span<const double> residuals,
                      std::span<const double> labels,
                      std::span<const double> f_values, const WeightVector& w,
                      const Mask& member_mask);

struct LossEvaluation {
    std::vector<double> per_instance;
    double weighted_total = 0.0;
};

LossEvaluation evaluate_loss(LossKind loss, std::span<const double> y,
                             std::span<const double> f, const WeightVector& w);

} // namespace tsb
