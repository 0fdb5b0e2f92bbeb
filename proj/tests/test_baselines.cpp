#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "equivalence.hpp"
#include "oracles.hpp"
#include "tsb/baselines.hpp"
#include "tsb/experiments.hpp"

using namespace tsb;
using namespace tsb::testing;

TEST_CASE("cart splits perfectly separable labels") {
    const Dataset data({1.0, 2.0, 3.0, 4.0}, 1, {0.0, 0.0, 1.0, 1.0}, {},
                       LabelKind::Continuous);
    const CartModel model = fit_cart(data, 1);

    REQUIRE_FALSE(model.root->leaf);
    CHECK(model.root->feature == 0);
    CHECK(model.root->threshold == 2.5);
    CHECK(model.root->left->value == 0.0);
    CHECK(model.root->right->value == 1.0);
    CHECK(predict_cart(model, std::vector<double>{1.5}) == 0.0);
    CHECK(predict_cart(model, std::vector<double>{9.0}) == 1.0);
}

TEST_CASE("cart stops on constant labels") {
    const Dataset data({1.0, 2.0, 3.0}, 1, {7.0, 7.0, 7.0}, {}, LabelKind::Continuous);
    const CartModel model = fit_cart(data, 4);
    CHECK(model.root->leaf);
    CHECK(model.root->value == 7.0);
}

namespace {

void check_cart_node(const CartNode* node, const Dataset& data,
                     const std::vector<std::size_t>& rows) {
    double mean = 0.0;
    for (std::size_t r : rows) mean += data.label(r);
    mean /= static_cast<double>(rows.size());

    if (node->leaf) {
        CHECK(std::fabs(node->value - mean) <= 1e-12);
        return;
    }

    // The chosen split must achieve the brute-force optimum for this node's
    // instance set under its per-node uniform weights.
    std::vector<double> raw(data.size(), 0.0);
    for (std::size_t r : rows) raw[r] = 1.0;
    const auto w = WeightVector::normalized(std::move(raw));
    const auto brute = brute_force_stump(data, data.labels(), w);
    REQUIRE(brute.found);

    double wl = 0.0, sl = 0.0, wr = 0.0, sr = 0.0;
    for (std::size_t r : rows) {
        if (data.at(r, node->feature) <= node->threshold) {
            wl += 1.0;
            sl += data.label(r);
        } else {
            wr += 1.0;
            sr += data.label(r);
        }
    }
    REQUIRE(wl > 0.0);
    REQUIRE(wr > 0.0);
    const double ml = sl / wl;
    const double mr = sr / wr;
    double chosen_sse = 0.0;
    for (std::size_t r : rows) {
        const double m = data.at(r, node->feature) <= node->threshold ? ml : mr;
        chosen_sse +=
            (data.label(r) - m) * (data.label(r) - m) / static_cast<double>(rows.size());
    }
    CHECK(std::fabs(chosen_sse - brute.sse) <= 1e-10);

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
        if (data.at(r, node->feature) <= node->threshold) left_rows.push_back(r);
        else right_rows.push_back(r);
    }
    check_cart_node(node->left.get(), data, left_rows);
    check_cart_node(node->right.get(), data, right_rows);
}

} // namespace

TEST_CASE("cart splits match brute-force minimization") {
    SplitMix64 rng(808080);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset data = random_regression_dataset(rng, 12, 2);
        const CartModel model = fit_cart(data, 2);
        std::vector<std::size_t> all(data.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        check_cart_node(model.root.get(), data, all);
    }
}

TEST_CASE("gbs first stage equals a centered stump fit") {
    SplitMix64 rng(99);
    const Dataset data = random_regression_dataset(rng, 20, 2);

    const GbsModel model = fit_gbs(data, {1, LossKind::SquaredError, 1.0});
    REQUIRE(model.stages.size() == 1);

    const double mean =
        base_value(LossKind::SquaredError, data.labels(), WeightVector::uniform(data.size()));
    std::vector<double> centered(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) centered[i] = data.label(i) - mean;

    const Stump expected = fit_stump(data, centered, WeightVector::uniform(data.size()));
    CHECK(model.stages[0].stump.feature == expected.feature);
    CHECK(model.stages[0].stump.threshold == expected.threshold);
    // Increments are the per-side optimal steps for the same membership.
    Mask member(data.size());
    Mask complement(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        member[i] = expected.goes_left(data.row(i)) ? 1 : 0;
        complement[i] = member[i] ? 0 : 1;
    }
    const auto w = WeightVector::uniform(data.size());
    CHECK(model.stages[0].left_increment ==
          side_increment(LossKind::SquaredError, centered, data.labels(),
                         std::vector<double>(data.size(), mean), w, member));
    CHECK(model.stages[0].right_increment ==
          side_increment(LossKind::SquaredError, centered, data.labels(),
                         std::vector<double>(data.size(), mean), w, complement));
    CHECK(model.stages[0].left_increment ==
          doctest::Approx(expected.left_value).epsilon(1e-12));
    CHECK(model.stages[0].right_increment ==
          doctest::Approx(expected.right_value).epsilon(1e-12));
}

TEST_CASE("gbs training error is non-increasing") {
    SplitMix64 rng(345);
    const Dataset data = random_regression_dataset(rng, 30, 3);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t rounds = 0; rounds <= 5; ++rounds) {
        const GbsModel model = fit_gbs(data, {rounds, LossKind::SquaredError, 1.0});
        const double mse = mean_squared_error(predict_gbs(model, data), data.labels());
        CHECK(mse <= previous + 1e-12);
        previous = mse;
    }
}

TEST_CASE("gbs prediction basics") {
    SplitMix64 rng(41);
    const Dataset data = random_regression_dataset(rng, 10, 1);
    const GbsModel empty = fit_gbs(data, {0, LossKind::SquaredError, 1.0});
    CHECK(predict_gbs(empty, std::vector<double>{0.3}) == empty.base_value);

    GbsModel crafted;
    crafted.base_value = 1.0;
    crafted.feature_names = {"x1"};
    crafted.stages.push_back({Stump{0, 0.5, 0.0, 0.0}, 0.25, -0.25});
    crafted.stages.push_back({Stump{0, 2.0, 0.0, 0.0}, 0.0625, -0.0625});
    CHECK(predict_gbs(crafted, std::vector<double>{0.0}) == 1.0 + 0.25 + 0.0625);
    CHECK(predict_gbs(crafted, std::vector<double>{1.0}) == 1.0 - 0.25 + 0.0625);
    CHECK(predict_gbs(crafted, std::vector<double>{3.0}) == 1.0 - 0.25 - 0.0625);

    // Pure addition: stage order is irrelevant.
    GbsModel reversed;
    reversed.base_value = crafted.base_value;
    reversed.feature_names = crafted.feature_names;
    reversed.stages.assign(crafted.stages.rbegin(), crafted.stages.rend());
    CHECK(predict_gbs(reversed, std::vector<double>{0.0}) ==
          predict_gbs(crafted, std::vector<double>{0.0}));
    CHECK(predict_gbs(reversed, std::vector<double>{1.0}) ==
          predict_gbs(crafted, std::vector<double>{1.0}));

    CHECK_THROWS_AS(predict_gbs(crafted, std::vector<double>{1.0, 2.0}), DataError);
    CHECK_THROWS_AS(predict_cart(fit_cart(data, 1), std::vector<double>{1.0, 2.0}),
                    DataError);
}

TEST_CASE("boosted tree at lambda 0 reproduces cart") {
    SplitMix64 rng(20250807);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 10 + rng.next_below(51);
        const std::size_t d = 1 + rng.next_below(4);
        const std::size_t depth = 1 + rng.next_below(4);
        const Dataset data = random_regression_dataset(rng, n, d);

        TrainConfig config;
        config.depth = depth;
        config.lambda = Lambda(0.0);
        config.loss = LossKind::SquaredError;
        config.shrinkage = 1.0;
        const TsbModel boosted = train(data, config);
        const CartModel cart = fit_cart(data, depth);

        const auto match = match_tsb_cart(boosted, cart);
        CHECK_MESSAGE(match.ok, match.why);

        for (std::size_t i = 0; i < data.size(); ++i) {
            CHECK(std::fabs(predict(boosted, data.row(i)) - predict_cart(cart, data.row(i))) <=
                  1e-9);
        }
        for (const auto& probe : random_probes(rng, data, 100)) {
            CHECK(std::fabs(predict(boosted, probe) - predict_cart(cart, probe)) <= 1e-9);
        }
    }
}

TEST_CASE("boosted tree at infinite lambda reproduces gbs") {
    SplitMix64 rng(6174);
    for (const LossKind loss : {LossKind::SquaredError, LossKind::BinomialDeviance}) {
        for (const double nu : {0.3, 1.0}) {
            for (int trial = 0; trial < 10; ++trial) {
                const std::size_t n = 10 + rng.next_below(51);
                const std::size_t d = 1 + rng.next_below(4);
                const std::size_t depth = 1 + rng.next_below(4);
                const Dataset data = loss == LossKind::SquaredError
                                         ? random_regression_dataset(rng, n, d)
                                         : random_binary_dataset(rng, n, d);

                TrainConfig config;
                config.depth = depth;
                config.lambda = Lambda::infinity();
                config.loss = loss;
                config.shrinkage = nu;
                const TsbModel boosted = train(data, config);
                const GbsModel gbs = fit_gbs(data, {depth, loss, nu});

                const auto match = match_tsb_gbs(boosted, gbs);
                CHECK_MESSAGE(match.ok, match.why);

                for (std::size_t i = 0; i < data.size(); ++i) {
                    CHECK(std::fabs(predict(boosted, data.row(i)) -
                                    predict_gbs(gbs, data.row(i))) <= 1e-9);
                }
                for (const auto& probe : random_probes(rng, data, 100)) {
                    CHECK(std::fabs(predict(boosted, probe) - predict_gbs(gbs, probe)) <= 1e-9);
                }
            }
        }
    }
}
