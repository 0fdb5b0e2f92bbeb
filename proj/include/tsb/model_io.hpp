#pragma once

#include <string>
#include <variant>

#include "tsb/baselines.hpp"
#include "tsb/tree.hpp"

namespace tsb {

using AnyModel = std::variant<TsbModel, CartModel, GbsModel>;

inline constexpr const char* kModelSchemaVersion = "1";

/// JSON model documents. Numbers round-trip exactly; non-finite thresholds
/// and the infinite lambda are encoded as "-inf"/"inf" strings.
void save_model(const TsbModel& model, const std::string& path);
void save_model(const CartModel& model, const std::string& path);
void save_model(const GbsModel& model, const std::string& path);

/// Throws DataError on I/O failure, malformed documents, or an unknown
/// schema version.
AnyModel load_model(const std::string& path);

} // namespace tsb
