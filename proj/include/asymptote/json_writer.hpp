#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace asymptote {

// Fixed float formatting: 17 significant digits in machine-readable output
// (round-trip exact), 9 in human-readable text.
inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Order-preserving JSON tree with deterministic serialization. Reports are
// emitted through this writer so identical runs produce byte-identical files.
class JsonValue {
 public:
  enum class Kind { Null, Bool, Int, Double, String, Array, Object };

  JsonValue() : kind_(Kind::Null) {}
  static JsonValue boolean(bool b) { JsonValue v; v.kind_ = Kind::Bool; v.bool_ = b; return v; }
  static JsonValue integer(long long i) { JsonValue v; v.kind_ = Kind::Int; v.int_ = i; return v; }
  static JsonValue number(double d) { JsonValue v; v.kind_ = Kind::Double; v.double_ = d; return v; }
  static JsonValue string(std::string s) {
    JsonValue v;
    v.kind_ = Kind::String;
    v.string_ = std::move(s);
    return v;
  }
  static JsonValue array() { JsonValue v; v.kind_ = Kind::Array; return v; }
  static JsonValue object() { JsonValue v; v.kind_ = Kind::Object; return v; }

  Kind kind() const { return kind_; }

  JsonValue& push(JsonValue v) {
    items_.push_back(std::move(v));
    return items_.back();
  }

  JsonValue& set(std::string key, JsonValue v) {
    fields_.emplace_back(std::move(key), std::move(v));
    return fields_.back().second;
  }

  std::string dump(int indent = 2) const {
    std::string out;
    write(out, indent, 0);
    out.push_back('\n');
    return out;
  }

 private:
  static void append_escaped(std::string& out, const std::string& s) {
    out.push_back('"');
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
          } else {
            out.push_back(c);
          }
      }
    }
    out.push_back('"');
  }

  void write(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
    switch (kind_) {
      case Kind::Null: out += "null"; break;
      case Kind::Bool: out += bool_ ? "true" : "false"; break;
      case Kind::Int: out += std::to_string(int_); break;
      case Kind::Double:
        if (std::isfinite(double_)) {
          out += fmt_g17(double_);
        } else {
          // Non-finite values are not expected in reports; keep JSON valid.
          out += std::isnan(double_) ? "\"nan\"" : (double_ > 0 ? "\"inf\"" : "\"-inf\"");
        }
        break;
      case Kind::String: append_escaped(out, string_); break;
      case Kind::Array:
        if (items_.empty()) {
          out += "[]";
          break;
        }
        out += "[\n";
        for (std::size_t i = 0; i < items_.size(); ++i) {
          out += pad;
          items_[i].write(out, indent, depth + 1);
          if (i + 1 < items_.size()) out.push_back(',');
          out.push_back('\n');
        }
        out += close_pad + "]";
        break;
      case Kind::Object:
        if (fields_.empty()) {
          out += "{}";
          break;
        }
        out += "{\n";
        for (std::size_t i = 0; i < fields_.size(); ++i) {
          out += pad;
          append_escaped(out, fields_[i].first);
          out += ": ";
          fields_[i].second.write(out, indent, depth + 1);
          if (i + 1 < fields_.size()) out.push_back(',');
          out.push_back('\n');
        }
        out += close_pad + "}";
        break;
    }
  }

  Kind kind_;
  bool bool_ = false;
  long long int_ = 0;
  double double_ = 0.0;
  std::string string_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> fields_;
};

}  // namespace asymptote
