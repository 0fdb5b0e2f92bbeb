// Command-line front end: train/predict for TSB and the CART/GBS baselines,
// cross-validated lambda sweeps, synthetic data generation, and per-leaf
// instance-weight export. All outputs are deterministic functions of
// (inputs, flags, seed).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsb/csv.hpp"
#include "tsb/experiments.hpp"
#include "tsb/model_io.hpp"
#include "tsb/trainer.hpp"

namespace {

using namespace tsb;

LossKind resolve_loss(const std::string& flag, const Dataset& data) {
    if (flag == "squared") return LossKind::SquaredError;
    if (flag == "deviance") return LossKind::BinomialDeviance;
    if (flag == "auto") {
        return data.label_kind() == LabelKind::Binary ? LossKind::BinomialDeviance
                                                      : LossKind::SquaredError;
    }
    throw UsageError("unknown loss '" + flag + "' (expected squared, deviance, or auto)");
}

std::vector<Lambda> parse_lambda_list(const std::string& text) {
    if (text == "default") return default_lambda_grid();
    std::vector<Lambda> grid;
    std::string token;
    for (char c : text) {
        if (c == ',') {
            grid.push_back(Lambda::parse(token));
            token.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            token.push_back(c);
        }
    }
    if (!token.empty()) grid.push_back(Lambda::parse(token));
    if (grid.empty()) throw UsageError("empty lambda list");
    return grid;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    return out;
}

std::string derived_path(const std::string& out, const std::string& tag) {
    const std::size_t dot = out.rfind('.');
    if (dot == std::string::npos || out.find('/', dot) != std::string::npos) {
        return out + "." + tag;
    }
    return out.substr(0, dot) + "." + tag + out.substr(dot);
}

void write_margin_csv(std::ofstream& out, const std::vector<double>& margins,
                      LossKind loss) {
    if (loss == LossKind::BinomialDeviance) {
        out << "id,margin,label,probability\n";
        for (std::size_t i = 0; i < margins.size(); ++i) {
            const double f = margins[i];
            const double p = 1.0 / (1.0 + std::exp(std::min(500.0, std::max(-500.0, -2.0 * f))));
            out << i << ',' << format_double(f) << ',' << (f >= 0.0 ? 1 : -1) << ','
                << format_double(p) << '\n';
        }
    } else {
        out << "id,prediction\n";
        for (std::size_t i = 0; i < margins.size(); ++i) {
            out << i << ',' << format_double(margins[i]) << '\n';
        }
    }
}

struct CommonTrainFlags {
    std::string data_path;
    std::string label_column = "label";
    std::optional<std::string> positive_label;
    std::string loss = "auto";
    std::size_t depth = 1;
    std::string lambda = "0";
    double shrinkage = 1.0;
    std::uint64_t seed = 0; // reserved: training itself is deterministic
    std::string out_path;
};

void add_common_train_flags(CLI::App* cmd, CommonTrainFlags& flags, bool with_lambda) {
    cmd->add_option("--data", flags.data_path, "training data CSV")->required();
    cmd->add_option("--label", flags.label_column, "label column name");
    cmd->add_option("--positive-label", flags.positive_label,
                    "label value mapped to +1 (two-valued label columns)");
    cmd->add_option("--loss", flags.loss, "squared | deviance | auto");
    cmd->add_option("--depth", flags.depth, "tree depth (stump levels)")->required();
    if (with_lambda) cmd->add_option("--lambda", flags.lambda, "re-weighting ratio, or 'inf'");
    cmd->add_option("--shrinkage", flags.shrinkage, "learning rate in (0,1]");
    cmd->add_option("--seed", flags.seed, "random seed");
    cmd->add_option("--out", flags.out_path, "output model JSON")->required();
}

int cmd_train(const CommonTrainFlags& flags) {
    const Dataset data = load_csv(flags.data_path, flags.label_column, flags.positive_label);
    TrainConfig config;
    config.depth = flags.depth;
    config.lambda = Lambda::parse(flags.lambda);
    config.loss = resolve_loss(flags.loss, data);
    config.shrinkage = flags.shrinkage;
    const TsbModel model = train(data, config);
    save_model(model, flags.out_path);
    return 0;
}

int cmd_baseline(const CommonTrainFlags& flags, const std::string& algo) {
    const Dataset data = load_csv(flags.data_path, flags.label_column, flags.positive_label);
    if (algo == "cart") {
        save_model(fit_cart(data, flags.depth), flags.out_path);
        return 0;
    }
    if (algo == "gbs") {
        GbsConfig config;
        config.rounds = flags.depth;
        config.loss = resolve_loss(flags.loss, data);
        config.shrinkage = flags.shrinkage;
        save_model(fit_gbs(data, config), flags.out_path);
        return 0;
    }
    throw UsageError("unknown baseline algorithm '" + algo + "' (expected cart or gbs)");
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
    const AnyModel any = load_model(model_path);
    std::ofstream out = open_output(out_path);

    if (const auto* tsb_model = std::get_if<TsbModel>(&any)) {
        const auto rows = load_feature_rows(data_path, tsb_model->feature_names);
        std::vector<double> margins;
        margins.reserve(rows.size());
        for (const auto& row : rows) margins.push_back(predict(*tsb_model, row));
        write_margin_csv(out, margins, tsb_model->loss);
    } else if (const auto* cart_model = std::get_if<CartModel>(&any)) {
        const auto rows = load_feature_rows(data_path, cart_model->feature_names);
        std::vector<double> values;
        values.reserve(rows.size());
        for (const auto& row : rows) values.push_back(predict_cart(*cart_model, row));
        write_margin_csv(out, values, LossKind::SquaredError);
    } else {
        const auto& gbs_model = std::get<GbsModel>(any);
        const auto rows = load_feature_rows(data_path, gbs_model.feature_names);
        std::vector<double> margins;
        margins.reserve(rows.size());
        for (const auto& row : rows) margins.push_back(predict_gbs(gbs_model, row));
        write_margin_csv(out, margins, gbs_model.loss);
    }
    return 0;
}

int cmd_sweep(const CommonTrainFlags& flags, const std::string& lambdas,
              std::size_t folds, std::size_t trials, unsigned threads) {
    const Dataset data = load_csv(flags.data_path, flags.label_column, flags.positive_label);

    SweepConfig config;
    config.lambda_grid = parse_lambda_list(lambdas);
    config.depth = flags.depth;
    config.loss = resolve_loss(flags.loss, data);
    config.shrinkage = flags.shrinkage;
    config.folds = folds;
    config.trials = trials;
    config.seed = flags.seed;
    config.threads = threads;

    const SweepResult result = run_sweep(data, config);
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << '\n';

    std::ofstream agg = open_output(flags.out_path);
    agg << "lambda,mean_train_error,se_train,mean_test_error,se_test\n";
    for (const SweepAggregate& a : result.aggregates) {
        agg << a.lambda.str() << ',' << format_double(a.mean_train) << ','
            << format_double(a.se_train) << ',' << format_double(a.mean_test) << ','
            << format_double(a.se_test) << '\n';
    }

    std::ofstream rows = open_output(derived_path(flags.out_path, "rows"));
    rows << "lambda,trial,fold,train_error,test_error\n";
    for (const SweepRow& r : result.rows) {
        rows << r.lambda.str() << ',' << r.trial << ',' << r.fold << ','
             << format_double(r.train_error) << ',' << format_double(r.test_error) << '\n';
    }

    std::ofstream base = open_output(derived_path(flags.out_path, "baselines"));
    base << "algo,trial,fold,train_error,test_error\n";
    for (const BaselineRow& r : result.cart_rows) {
        base << "cart," << r.trial << ',' << r.fold << ',' << format_double(r.train_error)
             << ',' << format_double(r.test_error) << '\n';
    }
    for (const BaselineRow& r : result.gbs_rows) {
        base << "gbs," << r.trial << ',' << r.fold << ',' << format_double(r.train_error)
             << ',' << format_double(r.test_error) << '\n';
    }
    return 0;
}

int cmd_synth(std::size_t red, std::size_t green, std::uint64_t seed, double sigma,
              const std::string& out_path) {
    SynthParams params;
    params.sigma = sigma;
    const Dataset data = generate_synthetic(red, green, seed, params);
    write_dataset_csv(data, out_path);
    return 0;
}

int cmd_leaf_weights(const CommonTrainFlags& flags, const std::string& predicate) {
    const Dataset data = load_csv(flags.data_path, flags.label_column, flags.positive_label);

    LeafWeightConfig config;
    config.depth = flags.depth;
    config.lambda = Lambda::parse(flags.lambda);
    config.loss = resolve_loss(flags.loss, data);
    config.shrinkage = flags.shrinkage;

    const auto selector = parse_leaf_predicate(predicate);
    const std::vector<double> weights = export_leaf_weights(data, config, selector);

    std::ofstream out = open_output(flags.out_path);
    for (const auto& name : data.feature_names()) out << name << ',';
    out << "weight\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) out << format_double(data.at(i, j)) << ',';
        out << format_double(weights[i]) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tree-structured boosting: a single tunable knob between CART and "
                 "gradient boosted stumps"};
    app.require_subcommand(1);

    CommonTrainFlags train_flags;
    CLI::App* train_cmd = app.add_subcommand("train", "fit a TSB model");
    add_common_train_flags(train_cmd, train_flags, true);

    CommonTrainFlags baseline_flags;
    std::string baseline_algo;
    CLI::App* baseline_cmd = app.add_subcommand("baseline", "fit a CART or GBS baseline");
    baseline_cmd->add_option("--algo", baseline_algo, "cart | gbs")->required();
    add_common_train_flags(baseline_cmd, baseline_flags, false);

    std::string predict_model;
    std::string predict_data;
    std::string predict_out;
    CLI::App* predict_cmd = app.add_subcommand("predict", "apply a saved model");
    predict_cmd->add_option("--model", predict_model, "model JSON")->required();
    predict_cmd->add_option("--data", predict_data, "input CSV (label column ignored)")->required();
    predict_cmd->add_option("--out", predict_out, "output CSV")->required();

    CommonTrainFlags sweep_flags;
    sweep_flags.depth = 10;
    sweep_flags.shrinkage = 0.3;
    std::string sweep_lambdas = "default";
    std::size_t sweep_folds = 10;
    std::size_t sweep_trials = 20;
    unsigned sweep_threads = 0;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "repeated k-fold CV over a lambda grid");
    sweep_cmd->add_option("--data", sweep_flags.data_path, "data CSV")->required();
    sweep_cmd->add_option("--label", sweep_flags.label_column, "label column name");
    sweep_cmd->add_option("--positive-label", sweep_flags.positive_label,
                          "label value mapped to +1");
    sweep_cmd->add_option("--lambdas", sweep_lambdas, "comma list or 'default'");
    sweep_cmd->add_option("--depth", sweep_flags.depth, "tree depth");
    sweep_cmd->add_option("--loss", sweep_flags.loss, "squared | deviance | auto");
    sweep_cmd->add_option("--shrinkage", sweep_flags.shrinkage, "learning rate in (0,1]");
    sweep_cmd->add_option("--folds", sweep_folds, "folds per trial");
    sweep_cmd->add_option("--trials", sweep_trials, "shuffled CV repetitions");
    sweep_cmd->add_option("--seed", sweep_flags.seed, "random seed");
    sweep_cmd->add_option("--threads", sweep_threads, "worker threads (0 = hardware)");
    sweep_cmd->add_option("--out", sweep_flags.out_path,
                          "aggregate CSV; row/baseline files derive from this path")
        ->required();

    std::size_t synth_red = 58;
    std::size_t synth_green = 42;
    std::uint64_t synth_seed = 0;
    double synth_sigma = 1.5;
    std::string synth_out;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate the two-Gaussian dataset");
    synth_cmd->add_option("--red", synth_red, "+1 class count");
    synth_cmd->add_option("--green", synth_green, "-1 class count");
    synth_cmd->add_option("--seed", synth_seed, "random seed");
    synth_cmd->add_option("--sigma", synth_sigma, "class spread");
    synth_cmd->add_option("--out", synth_out, "output CSV")->required();

    CommonTrainFlags leaf_flags;
    leaf_flags.depth = 2;
    leaf_flags.shrinkage = 0.1;
    std::string leaf_predicate;
    CLI::App* leaf_cmd =
        app.add_subcommand("leaf-weights", "instance weights carried at one leaf");
    leaf_cmd->add_option("--data", leaf_flags.data_path, "data CSV")->required();
    leaf_cmd->add_option("--label", leaf_flags.label_column, "label column name");
    leaf_cmd->add_option("--positive-label", leaf_flags.positive_label,
                         "label value mapped to +1");
    leaf_cmd->add_option("--lambda", leaf_flags.lambda, "re-weighting ratio, or 'inf'")
        ->required();
    leaf_cmd->add_option("--depth", leaf_flags.depth, "tree depth");
    leaf_cmd->add_option("--loss", leaf_flags.loss, "squared | deviance | auto");
    leaf_cmd->add_option("--shrinkage", leaf_flags.shrinkage, "learning rate in (0,1]");
    leaf_cmd->add_option("--leaf", leaf_predicate,
                         "path predicate, e.g. \"X2>2.95 && X1<=5.55\"")
        ->required();
    leaf_cmd->add_option("--out", leaf_flags.out_path, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 1;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_flags);
        if (baseline_cmd->parsed()) return cmd_baseline(baseline_flags, baseline_algo);
        if (predict_cmd->parsed()) return cmd_predict(predict_model, predict_data, predict_out);
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sweep_flags, sweep_lambdas, sweep_folds, sweep_trials,
                             sweep_threads);
        }
        if (synth_cmd->parsed()) {
            return cmd_synth(synth_red, synth_green, synth_seed, synth_sigma, synth_out);
        }
        if (leaf_cmd->parsed()) return cmd_leaf_weights(leaf_flags, leaf_predicate);
    } catch (const UsageError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: data: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: numerical: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
