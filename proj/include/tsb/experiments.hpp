#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsb/baselines.hpp"
#include "tsb/trainer.hpp"

namespace tsb {

/// Shuffled indices partitioned into k folds of size floor(N/k) or
/// ceil(N/k); deterministic per seed. Throws UsageError unless 2 <= k <= N.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed);

/// Stratified variant for +-1 labels: each class is shuffled and dealt
/// across folds so no training portion ends up one-class on small datasets.
std::vector<std::vector<std::size_t>> stratified_kfold(
    const std::vector<double>& labels, std::size_t k, std::uint64_t seed);

struct SweepConfig {
    std::vector<Lambda> lambda_grid;
    std::size_t depth = 10;
    LossKind loss = LossKind::BinomialDeviance;
    double shrinkage = 0.3;
    std::size_t folds = 10;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency
};

/// The default lambda grid: geometric interior plus the CART/GBS endpoints.
std::vector<Lambda> default_lambda_grid();

struct SweepRow {
    Lambda lambda{0.0};
    std::size_t trial = 0;
    std::size_t fold = 0;
    double train_error = 0.0;
    double test_error = 0.0;
};

struct SweepAggregate {
    Lambda lambda{0.0};
    double mean_train = 0.0;
    double se_train = 0.0;
    double mean_test = 0.0;
    double se_test = 0.0;
    std::size_t count = 0;
};

struct BaselineRow {
    std::size_t trial = 0;
    std::size_t fold = 0;
    double train_error = 0.0;
    double test_error = 0.0;
};

struct BaselineAggregate {
    double mean_train = 0.0;
    double se_train = 0.0;
    double mean_test = 0.0;
    double se_test = 0.0;
    std::size_t count = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;               // sorted by (grid index, trial, fold)
    std::vector<SweepAggregate> aggregates;   // one per grid entry
    std::vector<BaselineRow> cart_rows;
    std::vector<BaselineRow> gbs_rows;
    BaselineAggregate cart;
    BaselineAggregate gbs;
    std::vector<std::string> warnings;        // degenerate folds etc.
};

/// Repeated k-fold cross-validation over the lambda grid, with CART and GBS
/// trained once per fold as endpoint baselines. Work items are independent
/// (trial, fold) pairs; results merge by index so threading never changes
/// the output bytes.
SweepResult run_sweep(const Dataset& data, const SweepConfig& config);

/// Misclassification rate of sign(F) against +-1 labels; F = 0 counts as +1.
double classification_error(std::span<const double> margins,
                            std::span<const double> labels);
double mean_squared_error(std::span<const double> predictions,
                          std::span<const double> labels);

struct SynthParams {
    double red_center_x = 3.0;
    double red_center_y = 5.0;
    double green_center_x = 6.0;
    double green_center_y = 2.0;
    double sigma = 1.5;
};

/// Two overlapping isotropic Gaussian blobs in R^2; red = +1 first, then
/// green = -1. Deterministic per seed.
Dataset generate_synthetic(std::size_t n_red, std::size_t n_green,
                           std::uint64_t seed, const SynthParams& params = {});

/// One conjunct of a leaf selector: X(feature+1) > value or <= value.
struct LeafCondition {
    std::size_t feature = 0;
    bool greater = false; // false: x[feature] <= value (left branch)
    double value = 0.0;
};

/// Parses "X2>2.95 && X1<=5.55" (1-indexed features; "and"/"&" also accepted;
/// "<" is treated as "<="). Throws UsageError on malformed input.
std::vector<LeafCondition> parse_leaf_predicate(const std::string& text);

struct LeafWeightConfig {
    std::size_t depth = 2;
    Lambda lambda{0.0};
    LossKind loss = LossKind::BinomialDeviance;
    double shrinkage = 0.1;
};

/// Trains a model on `data`, locates the unique leaf whose path conditions
/// match the selector (threshold tolerance 5e-3, covering values quoted to
/// two decimals), and returns the instance weights carried at that leaf.
/// Throws UsageError when zero or multiple leaves match.
std::vector<double> export_leaf_weights(const Dataset& data,
                                        const LeafWeightConfig& config,
                                        const std::vector<LeafCondition>& selector);

} // namespace tsb
