#include "tsb/experiments.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "tsb/rng.hpp"

namespace tsb {

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
    if (k < 2) throw UsageError("need at least 2 folds");
    if (k > n) throw UsageError("more folds than instances");

    SplitMix64 rng(seed);
    const std::vector<std::size_t> idx = shuffled_indices(n, rng);

    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].assign(idx.begin() + pos, idx.begin() + pos + len);
        pos += len;
    }
    return folds;
}

std::vector<std::vector<std::size_t>> stratified_kfold(
    const std::vector<double>& labels, std::size_t k, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 2) throw UsageError("need at least 2 folds");
    if (k > n) throw UsageError("more folds than instances");

    SplitMix64 rng(seed);
    std::vector<std::size_t> pos_idx;
    std::vector<std::size_t> neg_idx;
    for (std::size_t i = 0; i < n; ++i) {
        (labels[i] > 0 ? pos_idx : neg_idx).push_back(i);
    }

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next_fold = 0; // rotates across classes so remainders spread
    for (auto* klass : {&pos_idx, &neg_idx}) {
        if (klass->empty()) continue;
        const std::vector<std::size_t> order = shuffled_indices(klass->size(), rng);
        for (std::size_t j : order) {
            folds[next_fold].push_back((*klass)[j]);
            next_fold = (next_fold + 1) % k;
        }
    }
    return folds;
}

std::vector<Lambda> default_lambda_grid() {
    return {Lambda(0.0),  Lambda(0.05), Lambda(0.15), Lambda(0.4),  Lambda(1.0),
            Lambda(2.5),  Lambda(6.0),  Lambda(15.0), Lambda(60.0), Lambda::infinity()};
}

double classification_error(std::span<const double> margins,
                            std::span<const double> labels) {
    if (margins.size() != labels.size()) throw DataError("metric size mismatch");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double predicted = margins[i] >= 0.0 ? 1.0 : -1.0;
        if (predicted != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(margins.size());
}

double mean_squared_error(std::span<const double> predictions,
                          std::span<const double> labels) {
    if (predictions.size() != labels.size()) throw DataError("metric size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double diff = predictions[i] - labels[i];
        sum += diff * diff;
    }
    return sum / static_cast<double>(predictions.size());
}

namespace {

struct FoldErrors {
    double train = 0.0;
    double test = 0.0;
};

struct ItemResult {
    bool degenerate = false;
    FoldErrors cart;
    FoldErrors gbs;
    std::vector<FoldErrors> per_lambda;
};

double fold_error(const std::vector<double>& predictions,
                  const std::vector<double>& labels, LabelKind kind) {
    if (kind == LabelKind::Binary) return classification_error(predictions, labels);
    return mean_squared_error(predictions, labels);
}

bool one_class(const Dataset& data) {
    const double first = data.label(0);
    for (std::size_t i = 1; i < data.size(); ++i) {
        if (data.label(i) != first) return false;
    }
    return true;
}

void aggregate_errors(std::span<const double> train, std::span<const double> test,
                      double& mean_train, double& se_train, double& mean_test,
                      double& se_test) {
    const std::size_t n = train.size();
    if (n == 0) {
        mean_train = se_train = mean_test = se_test =
            std::numeric_limits<double>::quiet_NaN();
        return;
    }
    mean_train = mean_test = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_train += train[i];
        mean_test += test[i];
    }
    mean_train /= static_cast<double>(n);
    mean_test /= static_cast<double>(n);

    se_train = se_test = 0.0;
    if (n > 1) {
        double var_train = 0.0;
        double var_test = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            var_train += (train[i] - mean_train) * (train[i] - mean_train);
            var_test += (test[i] - mean_test) * (test[i] - mean_test);
        }
        var_train /= static_cast<double>(n - 1);
        var_test /= static_cast<double>(n - 1);
        se_train = std::sqrt(var_train / static_cast<double>(n));
        se_test = std::sqrt(var_test / static_cast<double>(n));
    }
}

} // namespace

SweepResult run_sweep(const Dataset& data, const SweepConfig& config) {
    if (config.lambda_grid.empty()) throw UsageError("lambda grid must be non-empty");
    for (std::size_t a = 0; a < config.lambda_grid.size(); ++a) {
        for (std::size_t b = a + 1; b < config.lambda_grid.size(); ++b) {
            if (config.lambda_grid[a] == config.lambda_grid[b]) {
                throw UsageError("duplicate lambda in the grid: " +
                                 config.lambda_grid[a].str());
            }
        }
    }
    if (config.folds < 2) throw UsageError("need at least 2 folds");
    if (config.trials < 1) throw UsageError("need at least one trial");

    const bool binary = data.label_kind() == LabelKind::Binary;
    const std::size_t n = data.size();

    // Fold assignments are fixed up front so work items carry no RNG state.
    std::vector<std::vector<std::vector<std::size_t>>> trial_folds(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t fold_seed = SplitMix64::derive(config.seed, t);
        trial_folds[t] = binary ? stratified_kfold(data.labels(), config.folds, fold_seed)
                                : kfold_split(n, config.folds, fold_seed);
    }

    const std::size_t item_count = config.trials * config.folds;
    std::vector<ItemResult> results(item_count);

    auto run_item = [&](std::size_t item) {
        const std::size_t trial = item / config.folds;
        const std::size_t fold = item % config.folds;
        const auto& folds = trial_folds[trial];

        std::vector<std::size_t> train_rows;
        train_rows.reserve(n - folds[fold].size());
        for (std::size_t f = 0; f < config.folds; ++f) {
            if (f == fold) continue;
            train_rows.insert(train_rows.end(), folds[f].begin(), folds[f].end());
        }
        const Dataset train_data = data.subset(train_rows);
        const Dataset test_data = data.subset(folds[fold]);

        ItemResult& out = results[item];
        if (binary && one_class(train_data)) {
            out.degenerate = true;
            return;
        }

        const CartModel cart = fit_cart(train_data, config.depth);
        out.cart.train = fold_error(predict_cart(cart, train_data), train_data.labels(),
                                    data.label_kind());
        out.cart.test = fold_error(predict_cart(cart, test_data), test_data.labels(),
                                   data.label_kind());

        const GbsModel gbs =
            fit_gbs(train_data, {config.depth, config.loss, config.shrinkage});
        out.gbs.train = fold_error(predict_gbs(gbs, train_data), train_data.labels(),
                                   data.label_kind());
        out.gbs.test = fold_error(predict_gbs(gbs, test_data), test_data.labels(),
                                  data.label_kind());

        out.per_lambda.resize(config.lambda_grid.size());
        for (std::size_t g = 0; g < config.lambda_grid.size(); ++g) {
            TrainConfig tc;
            tc.depth = config.depth;
            tc.lambda = config.lambda_grid[g];
            tc.loss = config.loss;
            tc.shrinkage = config.shrinkage;
            const TsbModel model = train(train_data, tc);
            out.per_lambda[g].train = fold_error(predict(model, train_data),
                                                 train_data.labels(), data.label_kind());
            out.per_lambda[g].test = fold_error(predict(model, test_data),
                                                test_data.labels(), data.label_kind());
        }
    };

    unsigned n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(item_count));

    if (n_threads <= 1) {
        for (std::size_t item = 0; item < item_count; ++item) run_item(item);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t item = next.fetch_add(1);
                    if (item >= item_count) return;
                    try {
                        run_item(item);
                    } catch (...) {
                        const std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        next.store(item_count); // drain remaining work
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // Deterministic merge in (grid index, trial, fold) order.
    SweepResult sweep;
    for (std::size_t g = 0; g < config.lambda_grid.size(); ++g) {
        for (std::size_t item = 0; item < item_count; ++item) {
            const ItemResult& r = results[item];
            if (r.degenerate) continue;
            SweepRow row;
            row.lambda = config.lambda_grid[g];
            row.trial = item / config.folds;
            row.fold = item % config.folds;
            row.train_error = r.per_lambda[g].train;
            row.test_error = r.per_lambda[g].test;
            sweep.rows.push_back(row);
        }
    }
    for (std::size_t item = 0; item < item_count; ++item) {
        const ItemResult& r = results[item];
        const std::size_t trial = item / config.folds;
        const std::size_t fold = item % config.folds;
        if (r.degenerate) {
            sweep.warnings.push_back("degenerate fold skipped (one-class training portion): trial " +
                                     std::to_string(trial) + ", fold " + std::to_string(fold));
            continue;
        }
        sweep.cart_rows.push_back({trial, fold, r.cart.train, r.cart.test});
        sweep.gbs_rows.push_back({trial, fold, r.gbs.train, r.gbs.test});
    }

    for (std::size_t g = 0; g < config.lambda_grid.size(); ++g) {
        std::vector<double> train_errs;
        std::vector<double> test_errs;
        for (const SweepRow& row : sweep.rows) {
            if (row.lambda == config.lambda_grid[g]) {
                train_errs.push_back(row.train_error);
                test_errs.push_back(row.test_error);
            }
        }
        SweepAggregate agg;
        agg.lambda = config.lambda_grid[g];
        agg.count = train_errs.size();
        aggregate_errors(train_errs, test_errs, agg.mean_train, agg.se_train,
                         agg.mean_test, agg.se_test);
        sweep.aggregates.push_back(agg);
    }

    const auto baseline_agg = [](const std::vector<BaselineRow>& rows) {
        std::vector<double> train_errs;
        std::vector<double> test_errs;
        for (const BaselineRow& row : rows) {
            train_errs.push_back(row.train_error);
            test_errs.push_back(row.test_error);
        }
        BaselineAggregate agg;
        agg.count = rows.size();
        aggregate_errors(train_errs, test_errs, agg.mean_train, agg.se_train,
                         agg.mean_test, agg.se_test);
        return agg;
    };
    sweep.cart = baseline_agg(sweep.cart_rows);
    sweep.gbs = baseline_agg(sweep.gbs_rows);
    return sweep;
}

Dataset generate_synthetic(std::size_t n_red, std::size_t n_green, std::uint64_t seed,
                           const SynthParams& params) {
    if (n_red < 1 || n_green < 1) throw UsageError("class counts must be at least 1");

    SplitMix64 rng(seed);
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(2 * (n_red + n_green));
    y.reserve(n_red + n_green);

    for (std::size_t i = 0; i < n_red; ++i) {
        x.push_back(params.red_center_x + params.sigma * rng.next_gaussian());
        x.push_back(params.red_center_y + params.sigma * rng.next_gaussian());
        y.push_back(1.0);
    }
    for (std::size_t i = 0; i < n_green; ++i) {
        x.push_back(params.green_center_x + params.sigma * rng.next_gaussian());
        x.push_back(params.green_center_y + params.sigma * rng.next_gaussian());
        y.push_back(-1.0);
    }
    return Dataset(std::move(x), 2, std::move(y), {"x1", "x2"}, LabelKind::Binary);
}

std::vector<LeafCondition> parse_leaf_predicate(const std::string& text) {
    // Split on '&' runs, the word "and", or the UTF-8 conjunction sign.
    std::vector<std::string> parts;
    std::string current;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '&') {
            parts.push_back(current);
            current.clear();
            while (i < text.size() && text[i] == '&') ++i;
        } else if (text.compare(i, 3, "\xE2\x88\xA7") == 0) {
            parts.push_back(current);
            current.clear();
            i += 3;
        } else if ((text.compare(i, 3, "and") == 0 || text.compare(i, 3, "AND") == 0) &&
                   (i + 3 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 3]))) &&
                   (i == 0 || std::isspace(static_cast<unsigned char>(text[i - 1])))) {
            parts.push_back(current);
            current.clear();
            i += 3;
        } else {
            current.push_back(text[i]);
            ++i;
        }
    }
    parts.push_back(current);

    std::vector<LeafCondition> conditions;
    for (const std::string& raw : parts) {
        std::string s;
        for (char c : raw) {
            if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
        }
        if (s.empty()) throw UsageError("empty conjunct in leaf predicate");
        if (s[0] != 'X' && s[0] != 'x') {
            throw UsageError("leaf predicate conjunct must start with X: '" + raw + "'");
        }
        std::size_t pos = 1;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) throw UsageError("missing feature number in '" + raw + "'");
        const std::size_t feature_1based = std::stoull(s.substr(1, digits));
        if (feature_1based == 0) throw UsageError("features are 1-indexed in leaf predicates");

        LeafCondition cond;
        cond.feature = feature_1based - 1;
        if (s.compare(pos, 2, "<=") == 0) {
            cond.greater = false;
            pos += 2;
        } else if (s[pos] == '<') {
            cond.greater = false;
            pos += 1;
        } else if (s[pos] == '>') {
            cond.greater = true;
            pos += 1;
        } else {
            throw UsageError("expected > or <= in '" + raw + "'");
        }
        try {
            std::size_t consumed = 0;
            cond.value = std::stod(s.substr(pos), &consumed);
            if (consumed != s.size() - pos) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw UsageError("cannot parse threshold in '" + raw + "'");
        }
        conditions.push_back(cond);
    }
    return conditions;
}

namespace {

struct PathStep {
    Stump stump;
    bool went_left;
};

void collect_paths(const TsbNode* node, std::vector<PathStep>& prefix,
                   std::vector<std::vector<PathStep>>& out) {
    if (node->leaf) {
        out.push_back(prefix);
        return;
    }
    prefix.push_back({node->stump, true});
    collect_paths(node->left.get(), prefix, out);
    prefix.back().went_left = false;
    collect_paths(node->right.get(), prefix, out);
    prefix.pop_back();
}

bool path_matches(const std::vector<PathStep>& path,
                  const std::vector<LeafCondition>& selector, double tolerance) {
    if (path.size() != selector.size()) return false;
    std::vector<bool> used(selector.size(), false);
    for (const PathStep& step : path) {
        bool matched = false;
        for (std::size_t c = 0; c < selector.size(); ++c) {
            if (used[c]) continue;
            const LeafCondition& cond = selector[c];
            if (cond.feature != step.stump.feature) continue;
            if (cond.greater == step.went_left) continue; // left branch is <=
            if (std::fabs(cond.value - step.stump.threshold) > tolerance) continue;
            used[c] = true;
            matched = true;
            break;
        }
        if (!matched) return false;
    }
    return true;
}

} // namespace

std::vector<double> export_leaf_weights(const Dataset& data,
                                        const LeafWeightConfig& config,
                                        const std::vector<LeafCondition>& selector) {
    TrainConfig tc;
    tc.depth = config.depth;
    tc.lambda = config.lambda;
    tc.loss = config.loss;
    tc.shrinkage = config.shrinkage;
    const TsbModel model = train(data, tc);

    std::vector<std::vector<PathStep>> paths;
    std::vector<PathStep> prefix;
    collect_paths(model.root.get(), prefix, paths);

    constexpr double kThresholdTolerance = 5e-3; // values quoted to two decimals
    const std::vector<PathStep>* match = nullptr;
    for (const auto& path : paths) {
        if (path_matches(path, selector, kThresholdTolerance)) {
            if (match != nullptr) throw UsageError("leaf predicate matches multiple leaves");
            match = &path;
        }
    }
    if (match == nullptr) throw UsageError("leaf predicate matches no leaf of the trained tree");

    WeightVector w = WeightVector::uniform(data.size());
    for (const PathStep& step : *match) {
        Mask member(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            member[i] = step.stump.goes_left(data.row(i)) ? 1 : 0;
        }
        w = reweight_side(w, member, config.lambda, step.went_left ? Side::Left : Side::Right);
    }
    return w.values();
}

} // namespace tsb
