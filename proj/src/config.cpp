#include "roughman/config.hpp"

#include <cmath>
#include <sstream>

#include "roughman/errors.hpp"

namespace roughman {

using nlohmann::json;

namespace {

json number_array() { return {{"type", "array"}, {"items", {{"type", "number"}}}}; }

json matrix() { return {{"type", "array"}, {"items", number_array()}}; }

json build_schema() {
  json scenarios = json::array({"spinning_line_bracket_flow", "sphere_horizontal_lift", "geodesic_recovery",
                                "cartan_roundtrip", "canonical_rep_check", "lie_group_no_explosion",
                                "pure_rough_path_lift", "blow_up_detection"});
  json manifold = {
      {"type", "object"},
      {"required", {"manifold"}},
      {"properties",
       {{"manifold", {{"type", "string"}, {"enum", {"plane", "sphere", "so3", "product"}}}},
        {"radius", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"dim", {{"type", "integer"}, {"minimum", 1}, {"maximum", 16}}},
        {"factors", {{"type", "array"}, {"minItems", 1}, {"items", {{"$ref", "#/definitions/manifold"}}}}}}}};
  json driver = {
      {"type", "object"},
      {"required", {"kind"}},
      {"properties",
       {{"kind", {{"type", "string"}, {"enum", {"lift_smooth", "pure_area", "spinning_line", "log_linear"}}}},
        {"p", {{"type", "number"}, {"minimum", 1}}},
        {"horizon", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"e", number_array()},
        {"A", matrix()},
        {"lambda",
         {{"type", "object"},
          {"required", {"dim", "level", "data"}},
          {"properties",
           {{"dim", {{"type", "integer"}, {"minimum", 1}}},
            {"level", {{"type", "integer"}, {"minimum", 1}}},
            {"data", {{"type", "array"}}}}}}},
        {"times", number_array()},
        {"values", matrix()},
        {"signal",
         {{"type", "object"},
          {"required", {"name", "n"}},
          {"properties",
           {{"name", {{"type", "string"}, {"enum", {"spinning"}}}},
            {"n", {{"type", "integer"}, {"minimum", 1}}},
            {"samples", {{"type", "integer"}, {"minimum", 2}}}}}}}}}};
  json params = {
      {"type", "object"},
      {"properties",
       {{"n_values", {{"type", "array"}, {"minItems", 1}, {"items", {{"type", "integer"}, {"minimum", 1}}}}},
        {"samples", {{"type", "integer"}, {"minimum", 2}}},
        {"radius", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"thetas", number_array()},
        {"omega_radii", number_array()},
        {"blowup_bound", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"tolerance", {{"type", "number"}, {"exclusiveMinimum", 0}}}}}};
  return {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "roughman scenario configuration"},
      {"type", "object"},
      {"definitions", {{"manifold", manifold}}},
      {"properties",
       {{"scenario", {{"type", "string"}, {"enum", scenarios}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"mesh", {{"type", "integer"}, {"minimum", 1}, {"maximum", 20}}},
        {"substeps", {{"type", "integer"}, {"minimum", 1}, {"maximum", 64}}},
        {"horizon", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"manifold", {{"$ref", "#/definitions/manifold"}}},
        {"driver", driver},
        {"initial", {{"type", "object"}, {"properties", {{"x0", number_array()}}}}},
        {"params", params},
        {"output",
         {{"type", "object"},
          {"properties",
           {{"dir", {{"type", "string"}}}, {"format", {{"type", "string"}, {"enum", {"csv", "json"}}}}}}}},
        {"sweep",
         {{"type", "object"},
          {"required", {"parameter", "values"}},
          {"properties",
           {{"parameter", {{"type", "string"}, {"enum", {"mesh", "n"}}}},
            {"values", number_array()}}}}}}}};
}

bool has_type(const json& doc, const std::string& t) {
  if (t == "object") return doc.is_object();
  if (t == "array") return doc.is_array();
  if (t == "string") return doc.is_string();
  if (t == "boolean") return doc.is_boolean();
  if (t == "number") return doc.is_number();
  if (t == "integer") {
    if (doc.is_number_integer()) return true;
    if (doc.is_number_float()) {
      double v = doc.get<double>();
      return std::isfinite(v) && v == std::floor(v);
    }
    return false;
  }
  if (t == "null") return doc.is_null();
  return false;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& doc, const json& schema, const std::string& path) {
    if (schema.contains("$ref")) {
      const std::string ref = schema["$ref"].get<std::string>();
      const std::string prefix = "#/definitions/";
      if (ref.rfind(prefix, 0) != 0 || !root_.contains("definitions") ||
          !root_["definitions"].contains(ref.substr(prefix.size())))
        throw ConfigError("schema: unresolved reference " + ref);
      check(doc, root_["definitions"][ref.substr(prefix.size())], path);
      return;
    }
    if (schema.contains("type")) {
      const json& t = schema["type"];
      bool ok = false;
      std::string expected;
      if (t.is_string()) {
        ok = has_type(doc, t.get<std::string>());
        expected = t.get<std::string>();
      } else {
        for (const auto& alt : t) {
          ok = ok || has_type(doc, alt.get<std::string>());
          expected += (expected.empty() ? "" : "|") + alt.get<std::string>();
        }
      }
      if (!ok) {
        fail(path, "expected " + expected + ", got " + std::string(doc.type_name()));
        return;
      }
    }
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& v : schema["enum"]) found = found || v == doc;
      if (!found) {
        std::string names;
        for (const auto& v : schema["enum"]) names += (names.empty() ? "" : ", ") + v.dump();
        fail(path, "value " + doc.dump() + " not one of " + names);
      }
    }
    if (doc.is_number()) {
      double v = doc.get<double>();
      if (schema.contains("minimum") && v < schema["minimum"].get<double>())
        fail(path, "value " + doc.dump() + " below minimum " + schema["minimum"].dump());
      if (schema.contains("maximum") && v > schema["maximum"].get<double>())
        fail(path, "value " + doc.dump() + " above maximum " + schema["maximum"].dump());
      if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>())
        fail(path, "value " + doc.dump() + " must exceed " + schema["exclusiveMinimum"].dump());
    }
    if (doc.is_array()) {
      if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
        fail(path, "expected at least " + schema["minItems"].dump() + " items");
      if (schema.contains("items"))
        for (std::size_t i = 0; i < doc.size(); ++i)
          check(doc[i], schema["items"], path + "[" + std::to_string(i) + "]");
    }
    if (doc.is_object()) {
      if (schema.contains("required"))
        for (const auto& key : schema["required"])
          if (!doc.contains(key.get<std::string>()))
            fail(path + "." + key.get<std::string>(), "required field missing");
      const json empty = json::object();
      const json& props = schema.contains("properties") ? schema["properties"] : empty;
      for (const auto& [key, value] : doc.items()) {
        if (!props.contains(key)) {
          fail(path + "." + key, "unknown key");
          continue;
        }
        check(value, props[key], path + "." + key);
      }
    }
  }

  std::vector<SchemaError> errors;

 private:
  void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }
  const json& root_;
};

}  // namespace

const json& config_schema() {
  static const json schema = build_schema();
  return schema;
}

std::vector<SchemaError> validate_schema(const json& doc, const json& schema) {
  Validator v(schema);
  v.check(doc, schema, "$");
  return std::move(v.errors);
}

std::vector<SchemaError> validate_config(const json& doc) { return validate_schema(doc, config_schema()); }

std::vector<std::vector<double>> matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of rows");
  std::vector<std::vector<double>> m;
  for (const auto& row : j) {
    if (!row.is_array()) throw ConfigError(what + ": expected an array of rows");
    m.push_back(row.get<std::vector<double>>());
  }
  return m;
}

ManifoldPtr manifold_from_json(const json& spec) {
  const std::string name = spec.at("manifold").get<std::string>();
  if (name == "plane") return make_plane(spec.value("dim", 2));
  if (name == "sphere") return make_sphere(spec.value("radius", 1.0));
  if (name == "so3") return make_so3();
  if (name == "product") {
    if (!spec.contains("factors") || spec["factors"].empty())
      throw ConfigError("product manifold needs a non-empty factors list");
    std::vector<ManifoldPtr> factors;
    for (const auto& f : spec["factors"]) factors.push_back(manifold_from_json(f));
    return make_product(std::move(factors));
  }
  throw ConfigError("unknown manifold '" + name + "'");
}

DriverPtr driver_from_json(const json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  const double horizon = spec.value("horizon", 1.0);
  if (kind == "lift_smooth") {
    const double p = spec.value("p", 2.5);
    if (spec.contains("signal")) {
      const auto& s = spec["signal"];
      int n = s.at("n").get<int>();
      int samples = s.value("samples", 1 << 14);
      return lift_spinning_signal(n, samples, p, horizon);
    }
    if (!spec.contains("times") || !spec.contains("values"))
      throw ConfigError("lift_smooth driver needs times and values, or a signal");
    return lift_smooth_path(spec["times"].get<std::vector<double>>(), matrix_from_json(spec["values"], "values"), p);
  }
  if (kind == "pure_area") {
    if (!spec.contains("A")) throw ConfigError("pure_area driver needs A");
    return pure_area(matrix_from_json(spec["A"], "A"), spec.value("p", 2.5), horizon);
  }
  if (kind == "spinning_line") {
    if (!spec.contains("e") || !spec.contains("A")) throw ConfigError("spinning_line driver needs e and A");
    return spinning_line(spec["e"].get<std::vector<double>>(), matrix_from_json(spec["A"], "A"),
                         spec.value("p", 2.5), horizon);
  }
  if (kind == "log_linear") {
    if (!spec.contains("lambda")) throw ConfigError("log_linear driver needs lambda");
    TruncatedTensor t = tensor_from_json(spec["lambda"]);
    double p = spec.value("p", static_cast<double>(t.level()) + 0.5);
    return log_linear(LieElement(t, 1e-10), p, horizon);
  }
  throw ConfigError("unknown driver kind '" + kind + "'");
}

}  // namespace roughman
