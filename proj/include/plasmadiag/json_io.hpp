#pragma once

// JSON and file helpers shared by the dataset layer and the CLI. Documents are
// built with nlohmann::ordered_json and written by to_text(), which prints every
// floating-point value with a fixed number of significant digits (17 by default,
// enough to round-trip).

#include "plasmadiag/acquisition.hpp"
#include "plasmadiag/calibration.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace plasmadiag::io {

using Json = nlohmann::ordered_json;

std::string to_text(const Json& doc, int indent = 2, int digits = 17);

// Parse errors become SchemaError, unreadable files IoError.
Json read_json_file(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// {kind, a0, a1, a2, a3[, input_range: [lo, hi]]}
Json curve_to_json(const calibration::CalibrationCurve& curve);
calibration::CalibrationCurve curve_from_json(const Json& doc);

// Fields named as in ChannelConfig; absent fields keep the values from `base`.
acquisition::ChannelConfig config_from_json(const Json& doc, acquisition::ChannelConfig base = {});
Json config_to_json(const acquisition::ChannelConfig& cfg);

// Required numeric member; SchemaError if absent or not a number.
double require_number(const Json& doc, const char* key);

} // namespace plasmadiag::io
