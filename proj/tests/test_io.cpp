#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "tsb/csv.hpp"
#include "tsb/experiments.hpp"
#include "tsb/model_io.hpp"
#include "tsb/trainer.hpp"

using namespace tsb;
using namespace tsb::testing;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("tsb_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }

    static int& counter() {
        static int c = 0;
        return c;
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("csv round trip") {
    TempDir dir;
    const Dataset data = generate_synthetic(12, 9, 77);
    write_dataset_csv(data, dir.file("data.csv"));
    const Dataset loaded = load_csv(dir.file("data.csv"), "label");

    REQUIRE(loaded.size() == data.size());
    REQUIRE(loaded.dim() == data.dim());
    CHECK(loaded.feature_names() == data.feature_names());
    CHECK(loaded.label_kind() == data.label_kind());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(loaded.label(i) == data.label(i));
        for (std::size_t j = 0; j < data.dim(); ++j) {
            CHECK(loaded.at(i, j) == data.at(i, j));
        }
    }
}

TEST_CASE("label mapping") {
    TempDir dir;
    SUBCASE("zero-one labels become plus-minus one") {
        write_file(dir.file("d.csv"), "a,label\n1,0\n2,1\n3,0\n");
        const Dataset data = load_csv(dir.file("d.csv"), "label");
        CHECK(data.label_kind() == LabelKind::Binary);
        CHECK(data.labels() == std::vector<double>{-1.0, 1.0, -1.0});
    }
    SUBCASE("plus-minus one kept as is") {
        write_file(dir.file("d.csv"), "a,label\n1,-1\n2,1\n");
        const Dataset data = load_csv(dir.file("d.csv"), "label");
        CHECK(data.label_kind() == LabelKind::Binary);
        CHECK(data.labels() == std::vector<double>{-1.0, 1.0});
    }
    SUBCASE("other numeric labels stay continuous") {
        write_file(dir.file("d.csv"), "a,label\n1,0.5\n2,1.5\n");
        const Dataset data = load_csv(dir.file("d.csv"), "label");
        CHECK(data.label_kind() == LabelKind::Continuous);
    }
    SUBCASE("positive-label mapping") {
        write_file(dir.file("d.csv"), "a,label\n1,2\n2,4\n3,2\n");
        const Dataset data = load_csv(dir.file("d.csv"), "label", std::string("4"));
        CHECK(data.label_kind() == LabelKind::Binary);
        CHECK(data.labels() == std::vector<double>{-1.0, 1.0, -1.0});

        CHECK_THROWS_AS(load_csv(dir.file("d.csv"), "label", std::string("9")), DataError);
    }
}

TEST_CASE("csv error reporting") {
    TempDir dir;
    SUBCASE("header only") {
        write_file(dir.file("d.csv"), "a,b,label\n");
        CHECK_THROWS_WITH_AS(load_csv(dir.file("d.csv"), "label"),
                             doctest::Contains("fewer than 2 rows"), DataError);
    }
    SUBCASE("single data row") {
        write_file(dir.file("d.csv"), "a,label\n1,2\n");
        CHECK_THROWS_WITH_AS(load_csv(dir.file("d.csv"), "label"),
                             doctest::Contains("fewer than 2 rows"), DataError);
    }
    SUBCASE("non-numeric cell names row and column") {
        std::string contents = "c1,c2,c3,c4,label\n";
        for (int row = 1; row <= 8; ++row) {
            if (row == 7) contents += "1,2,abc,4,0\n";
            else contents += "1,2,3,4,1\n";
        }
        write_file(dir.file("d.csv"), contents);
        try {
            load_csv(dir.file("d.csv"), "label");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string what = e.what();
            CHECK(what.find("abc") != std::string::npos);
            CHECK(what.find("row 7") != std::string::npos);
            CHECK(what.find("column 3") != std::string::npos);
        }
    }
    SUBCASE("missing values rejected") {
        write_file(dir.file("d.csv"), "a,b,label\n1,,0\n2,3,1\n");
        CHECK_THROWS_WITH_AS(load_csv(dir.file("d.csv"), "label"),
                             doctest::Contains("missing value"), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv(dir.file("nope.csv"), "label"), DataError);
    }
    SUBCASE("missing label column") {
        write_file(dir.file("d.csv"), "a,b\n1,2\n3,4\n");
        CHECK_THROWS_WITH_AS(load_csv(dir.file("d.csv"), "y"),
                             doctest::Contains("missing label column 'y'"), DataError);
    }
    SUBCASE("ragged row") {
        write_file(dir.file("d.csv"), "a,b,label\n1,2,0\n1,2\n");
        CHECK_THROWS_AS(load_csv(dir.file("d.csv"), "label"), DataError);
    }
}

TEST_CASE("feature-row loading for prediction") {
    TempDir dir;
    write_file(dir.file("d.csv"), "extra,x2,x1\n9,4,1\n9,5,2\n");
    const auto rows = load_feature_rows(dir.file("d.csv"), {"x1", "x2"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<double>{1.0, 4.0});
    CHECK(rows[1] == std::vector<double>{2.0, 5.0});

    CHECK_THROWS_AS(load_feature_rows(dir.file("d.csv"), {"x1", "x9"}), DataError);
}

TEST_CASE("model round trips") {
    TempDir dir;
    SplitMix64 rng(918);

    SUBCASE("depth-0 model keeps its base value") {
        const Dataset data = random_regression_dataset(rng, 10, 2);
        TrainConfig config;
        config.depth = 0;
        config.lambda = Lambda(0.5);
        config.loss = LossKind::SquaredError;
        const TsbModel model = train(data, config);
        save_model(model, dir.file("m.json"));
        const auto loaded = std::get<TsbModel>(load_model(dir.file("m.json")));
        CHECK(loaded.base_value == model.base_value);
        CHECK(loaded.lambda == model.lambda);
    }

    SUBCASE("deep model predicts identically after reload") {
        const Dataset data = random_regression_dataset(rng, 60, 3);
        TrainConfig config;
        config.depth = 5;
        config.lambda = Lambda(0.7);
        config.loss = LossKind::SquaredError;
        const TsbModel model = train(data, config);
        save_model(model, dir.file("m.json"));
        const auto loaded = std::get<TsbModel>(load_model(dir.file("m.json")));
        for (const auto& probe : random_probes(rng, data, 1000)) {
            CHECK(std::fabs(predict(model, probe) - predict(loaded, probe)) <= 1e-12);
        }
    }

    SUBCASE("infinite lambda and -inf thresholds survive") {
        TsbModel model;
        model.base_value = 0.25;
        model.lambda = Lambda::infinity();
        model.loss = LossKind::BinomialDeviance;
        model.feature_names = {"x1"};
        model.depth = 1;
        model.root = TsbNode::make_internal(
            Stump{0, -std::numeric_limits<double>::infinity(), 0.125, 0.125}, 0.0625,
            -0.0625);
        save_model(model, dir.file("m.json"));
        const auto loaded = std::get<TsbModel>(load_model(dir.file("m.json")));
        CHECK(loaded.lambda.is_infinite());
        CHECK(loaded.root->stump.threshold == -std::numeric_limits<double>::infinity());
        CHECK(predict(loaded, std::vector<double>{1.0}) == 0.25 - 0.0625);
    }

    SUBCASE("cart and gbs models") {
        const Dataset data = random_regression_dataset(rng, 30, 2);
        save_model(fit_cart(data, 3), dir.file("cart.json"));
        const auto cart = std::get<CartModel>(load_model(dir.file("cart.json")));
        const CartModel original = fit_cart(data, 3);
        for (const auto& probe : random_probes(rng, data, 200)) {
            CHECK(predict_cart(cart, probe) == predict_cart(original, probe));
        }

        const GbsModel gbs = fit_gbs(data, {4, LossKind::SquaredError, 0.5});
        save_model(gbs, dir.file("gbs.json"));
        const auto loaded = std::get<GbsModel>(load_model(dir.file("gbs.json")));
        for (const auto& probe : random_probes(rng, data, 200)) {
            CHECK(predict_gbs(loaded, probe) == predict_gbs(gbs, probe));
        }
    }

    SUBCASE("malformed documents") {
        write_file(dir.file("bad.json"), "{\"schema_version\": \"1\", \"kind\": \"tsb\"");
        CHECK_THROWS_AS(load_model(dir.file("bad.json")), DataError);

        write_file(dir.file("old.json"), "{\"schema_version\": \"0\", \"kind\": \"tsb\"}");
        CHECK_THROWS_WITH_AS(load_model(dir.file("old.json")),
                             doctest::Contains("schema_version"), DataError);

        write_file(dir.file("kind.json"), "{\"schema_version\": \"1\", \"kind\": \"mlp\"}");
        CHECK_THROWS_AS(load_model(dir.file("kind.json")), DataError);

        CHECK_THROWS_AS(load_model(dir.file("absent.json")), DataError);
    }
}
