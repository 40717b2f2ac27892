#include "plasmadiag/json_io.hpp"

#include "plasmadiag/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace plasmadiag::io {

namespace {

void emit(std::string& out, const Json& value, int indent, int digits, int depth) {
  const auto newline = [&](int level) {
    if (indent > 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent * level), ' ');
    }
  };
  switch (value.type()) {
  case Json::value_t::object: {
    if (value.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto& [key, member] : value.items()) {
      if (!first)
        out += ',';
      first = false;
      newline(depth + 1);
      out += Json(key).dump();
      out += indent > 0 ? ": " : ":";
      emit(out, member, indent, digits, depth + 1);
    }
    newline(depth);
    out += '}';
    return;
  }
  case Json::value_t::array: {
    // Arrays of scalars stay on one line.
    out += '[';
    bool first = true;
    for (const auto& item : value) {
      if (!first)
        out += indent > 0 ? ", " : ",";
      first = false;
      emit(out, item, indent, digits, depth + 1);
    }
    out += ']';
    return;
  }
  case Json::value_t::number_float: {
    const double x = value.get<double>();
    out += std::isfinite(x) ? fmt::format("{:.{}g}", x, digits) : "null";
    return;
  }
  default:
    out += value.dump();
  }
}

} // namespace

std::string to_text(const Json& doc, int indent, int digits) {
  std::string out;
  emit(out, doc, indent, digits, 0);
  out += '\n';
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError(fmt::format("cannot open '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    out << contents;
    out.flush();
    if (!out)
      throw IoError(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(fmt::format("cannot rename into '{}'", path.string()));
  }
}

double require_number(const Json& doc, const char* key) {
  if (!doc.is_object())
    throw SchemaError("expected a JSON object");
  const auto it = doc.find(key);
  if (it == doc.end())
    throw SchemaError(fmt::format("missing field '{}'", key));
  if (!it->is_number())
    throw SchemaError(fmt::format("field '{}' must be a number", key));
  return it->get<double>();
}

Json curve_to_json(const calibration::CalibrationCurve& curve) {
  Json doc;
  doc["kind"] = std::string(calibration::to_string(curve.kind));
  doc["a0"] = curve.a0;
  doc["a1"] = curve.a1;
  doc["a2"] = curve.a2;
  doc["a3"] = curve.a3;
  if (curve.fitted_range)
    doc["input_range"] = Json::array({curve.fitted_range->lo, curve.fitted_range->hi});
  return doc;
}

calibration::CalibrationCurve curve_from_json(const Json& doc) {
  if (!doc.is_object())
    throw SchemaError("curve must be a JSON object");
  const auto kind = doc.find("kind");
  if (kind == doc.end() || !kind->is_string())
    throw SchemaError("curve lacks string field 'kind'");

  calibration::CalibrationCurve curve;
  curve.kind = calibration::parse_input_kind(kind->get<std::string>());
  curve.a0 = require_number(doc, "a0");
  curve.a1 = require_number(doc, "a1");
  curve.a2 = require_number(doc, "a2");
  curve.a3 = require_number(doc, "a3");
  if (const auto range = doc.find("input_range"); range != doc.end()) {
    if (!range->is_array() || range->size() != 2 || !(*range)[0].is_number() || !(*range)[1].is_number())
      throw SchemaError("input_range must be [lo, hi]");
    curve.fitted_range = calibration::InputRange{(*range)[0].get<double>(), (*range)[1].get<double>()};
  }
  curve.validate();
  return curve;
}

acquisition::ChannelConfig config_from_json(const Json& doc, acquisition::ChannelConfig base) {
  if (!doc.is_object())
    throw SchemaError("channel config must be a JSON object");
  if (doc.contains("probe_ratio"))
    base.probe_ratio = require_number(doc, "probe_ratio");
  if (doc.contains("shunt_ohms"))
    base.shunt_ohms = require_number(doc, "shunt_ohms");
  if (doc.contains("offset_volts"))
    base.offset_volts = require_number(doc, "offset_volts");
  if (doc.contains("adc_bits")) {
    const double bits = require_number(doc, "adc_bits");
    if (bits != std::floor(bits) || bits < 8 || bits > 24)
      throw SchemaError("adc_bits must be an integer in [8, 24]");
    base.adc_bits = static_cast<int>(bits);
  }
  if (doc.contains("adc_fullscale_volts"))
    base.adc_fullscale_volts = require_number(doc, "adc_fullscale_volts");
  base.validate();
  return base;
}

Json config_to_json(const acquisition::ChannelConfig& cfg) {
  Json doc;
  doc["probe_ratio"] = cfg.probe_ratio;
  doc["shunt_ohms"] = cfg.shunt_ohms;
  doc["offset_volts"] = cfg.offset_volts;
  doc["adc_bits"] = cfg.adc_bits;
  doc["adc_fullscale_volts"] = cfg.adc_fullscale_volts;
  return doc;
}

} // namespace plasmadiag::io
