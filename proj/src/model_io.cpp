#include "tsb/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace tsb {

namespace {

using nlohmann::json;

// JSON has no inf, so non-finite numbers travel as strings.
json encode_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) throw NumericError("cannot serialize NaN");
    return v > 0 ? "inf" : "-inf";
}

double decode_number(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw DataError(std::string("bad numeric field: ") + what);
}

json encode_stump(const Stump& s) {
    return json{{"feature", s.feature},
                {"threshold", encode_number(s.threshold)},
                {"left_value", s.left_value},
                {"right_value", s.right_value}};
}

Stump decode_stump(const json& j) {
    Stump s;
    s.feature = j.at("feature").get<std::size_t>();
    s.threshold = decode_number(j.at("threshold"), "threshold");
    s.left_value = decode_number(j.at("left_value"), "left_value");
    s.right_value = decode_number(j.at("right_value"), "right_value");
    return s;
}

json encode_tsb_node(const TsbNode& node) {
    if (node.leaf) return json{{"leaf", true}};
    return json{{"stump", encode_stump(node.stump)},
                {"left_increment", node.left_increment},
                {"right_increment", node.right_increment},
                {"left", encode_tsb_node(*node.left)},
                {"right", encode_tsb_node(*node.right)}};
}

std::unique_ptr<TsbNode> decode_tsb_node(const json& j) {
    if (j.contains("leaf")) return TsbNode::make_leaf();
    auto node = TsbNode::make_internal(decode_stump(j.at("stump")),
                                       decode_number(j.at("left_increment"), "left_increment"),
                                       decode_number(j.at("right_increment"), "right_increment"));
    node->left = decode_tsb_node(j.at("left"));
    node->right = decode_tsb_node(j.at("right"));
    return node;
}

json encode_cart_node(const CartNode& node) {
    if (node.leaf) return json{{"value", node.value}};
    return json{{"feature", node.feature},
                {"threshold", encode_number(node.threshold)},
                {"left", encode_cart_node(*node.left)},
                {"right", encode_cart_node(*node.right)}};
}

std::unique_ptr<CartNode> decode_cart_node(const json& j) {
    auto node = std::make_unique<CartNode>();
    if (j.contains("value")) {
        node->leaf = true;
        node->value = decode_number(j.at("value"), "value");
        return node;
    }
    node->leaf = false;
    node->feature = j.at("feature").get<std::size_t>();
    node->threshold = decode_number(j.at("threshold"), "threshold");
    node->left = decode_cart_node(j.at("left"));
    node->right = decode_cart_node(j.at("right"));
    return node;
}

const char* loss_name(LossKind loss) {
    return loss == LossKind::SquaredError ? "squared" : "deviance";
}

LossKind parse_loss(const std::string& s) {
    if (s == "squared") return LossKind::SquaredError;
    if (s == "deviance") return LossKind::BinomialDeviance;
    throw DataError("unknown loss '" + s + "'");
}

json common_header(const char* kind) {
    return json{{"schema_version", kModelSchemaVersion}, {"kind", kind}};
}

void write_document(const json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

json read_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("malformed model document " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw DataError("malformed model document " + path);
    const auto version = doc.value("schema_version", std::string{});
    if (version != kModelSchemaVersion) {
        throw DataError("unknown schema_version '" + version + "' in " + path);
    }
    return doc;
}

} // namespace

void save_model(const TsbModel& model, const std::string& path) {
    json doc = common_header("tsb");
    doc["loss"] = loss_name(model.loss);
    doc["lambda"] = model.lambda.is_infinite() ? json("inf") : json(model.lambda.value());
    doc["shrinkage"] = model.shrinkage;
    doc["depth"] = model.depth;
    doc["base_value"] = model.base_value;
    doc["feature_names"] = model.feature_names;
    doc["root"] = encode_tsb_node(*model.root);
    write_document(doc, path);
}

void save_model(const CartModel& model, const std::string& path) {
    json doc = common_header("cart");
    doc["depth"] = model.depth;
    doc["feature_names"] = model.feature_names;
    doc["root"] = encode_cart_node(*model.root);
    write_document(doc, path);
}

void save_model(const GbsModel& model, const std::string& path) {
    json doc = common_header("gbs");
    doc["loss"] = loss_name(model.loss);
    doc["shrinkage"] = model.shrinkage;
    doc["base_value"] = model.base_value;
    doc["feature_names"] = model.feature_names;
    json stages = json::array();
    for (const GbsStage& stage : model.stages) {
        stages.push_back(json{{"stump", encode_stump(stage.stump)},
                              {"left_increment", stage.left_increment},
                              {"right_increment", stage.right_increment}});
    }
    doc["stages"] = stages;
    write_document(doc, path);
}

AnyModel load_model(const std::string& path) {
    const json doc = read_document(path);
    const std::string kind = doc.value("kind", std::string{});
    try {
        if (kind == "tsb") {
            TsbModel model;
            model.loss = parse_loss(doc.at("loss").get<std::string>());
            const json& lam = doc.at("lambda");
            model.lambda = lam.is_string() ? Lambda::parse(lam.get<std::string>())
                                           : Lambda(lam.get<double>());
            model.shrinkage = doc.at("shrinkage").get<double>();
            model.depth = doc.at("depth").get<std::size_t>();
            model.base_value = doc.at("base_value").get<double>();
            model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
            model.root = decode_tsb_node(doc.at("root"));
            return model;
        }
        if (kind == "cart") {
            CartModel model;
            model.depth = doc.at("depth").get<std::size_t>();
            model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
            model.root = decode_cart_node(doc.at("root"));
            return model;
        }
        if (kind == "gbs") {
            GbsModel model;
            model.loss = parse_loss(doc.at("loss").get<std::string>());
            model.shrinkage = doc.at("shrinkage").get<double>();
            model.base_value = doc.at("base_value").get<double>();
            model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
            for (const json& stage_doc : doc.at("stages")) {
                GbsStage stage;
                stage.stump = decode_stump(stage_doc.at("stump"));
                stage.left_increment = decode_number(stage_doc.at("left_increment"), "left_increment");
                stage.right_increment =
                    decode_number(stage_doc.at("right_increment"), "right_increment");
                model.stages.push_back(stage);
            }
            return model;
        }
    } catch (const json::exception& e) {
        throw DataError("malformed model document " + path + ": " + e.what());
    }
    throw DataError("unknown model kind '" + kind + "' in " + path);
}

} // namespace tsb
