#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsb/types.hpp"

namespace tsb {

/// Loads a headered numeric CSV. All non-label columns become features; the
/// label column is mapped to -1/+1 when binary ({0,1} and {-1,+1} are
/// recognized; `positive_label` forces a two-valued column to +1/-1).
/// Rejects missing files, absent label columns, non-numeric or empty cells
/// (reported by 1-based data row and column), and files with fewer than two
/// data rows.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::optional<std::string>& positive_label = std::nullopt);

/// Feature rows for prediction: the file must contain every column named in
/// `feature_names`; extra columns (e.g. the label) are ignored.
std::vector<std::vector<double>> load_feature_rows(
    const std::string& path, const std::vector<std::string>& feature_names);

void write_dataset_csv(const Dataset& data, const std::string& path,
                       const std::string& label_column = "label");

/// Shortest round-trip decimal form, "." decimal point, locale-free.
std::string format_double(double v);

} // namespace tsb
