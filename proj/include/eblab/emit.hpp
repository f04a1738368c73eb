#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "eblab/errors.hpp"

namespace eblab {

inline constexpr int kSchemaVersion = 1;

/// Floats are printed with 17 significant digits so that emitted files are
/// byte-reproducible and round-trip exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal ordered JSON value for result emission.
class Json {
 public:
  using Object = std::vector<std::pair<std::string, Json>>;
  using Array = std::vector<Json>;

  Json() : value_(nullptr) {}
  Json(std::nullptr_t) : value_(nullptr) {}
  Json(bool b) : value_(b) {}
  Json(double d) : value_(d) {}
  Json(int i) : value_(static_cast<double>(i)) {}
  Json(long i) : value_(static_cast<double>(i)) {}
  Json(std::size_t i) : value_(static_cast<double>(i)) {}
  Json(const char* s) : value_(std::string(s)) {}
  Json(std::string s) : value_(std::move(s)) {}
  Json(Array a) : value_(std::move(a)) {}

  static Json object() {
    Json j;
    j.value_ = Object{};
    return j;
  }

  Json& set(const std::string& key, Json v) {
    auto& obj = std::get<Object>(value_);
    obj.emplace_back(key, std::move(v));
    return *this;
  }

  void push_back(Json v) {
    if (!std::holds_alternative<Array>(value_)) value_ = Array{};
    std::get<Array>(value_).push_back(std::move(v));
  }

  void dump(std::string& out) const {
    if (std::holds_alternative<std::nullptr_t>(value_)) {
      out += "null";
    } else if (std::holds_alternative<bool>(value_)) {
      out += std::get<bool>(value_) ? "true" : "false";
    } else if (std::holds_alternative<double>(value_)) {
      out += format_double(std::get<double>(value_));
    } else if (std::holds_alternative<std::string>(value_)) {
      out += '"';
      for (char c : std::get<std::string>(value_)) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          default: out += c;
        }
      }
      out += '"';
    } else if (std::holds_alternative<Array>(value_)) {
      out += '[';
      const auto& arr = std::get<Array>(value_);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (i) out += ',';
        arr[i].dump(out);
      }
      out += ']';
    } else {
      out += '{';
      const auto& obj = std::get<Object>(value_);
      for (std::size_t i = 0; i < obj.size(); ++i) {
        if (i) out += ',';
        out += '"';
        out += obj[i].first;
        out += "\":";
        obj[i].second.dump(out);
      }
      out += '}';
    }
  }

  std::string dump() const {
    std::string out;
    dump(out);
    return out;
  }

 private:
  std::variant<std::nullptr_t, bool, double, std::string, Array, Object> value_;
};

/// Schema-versioned CSV table writer.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw IoError("csv row width mismatch");
    rows_.push_back(cells);
  }

  std::string to_string() const {
    std::string out = "# eblab-schema " + std::to_string(kSchemaVersion) + "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (i) out += ',';
      out += header_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += row[i];
      }
      out += '\n';
    }
    return out;
  }

  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

/// Wrap a JSON payload with the schema version stamp.
inline Json versioned(Json payload) {
  Json root = Json::object();
  root.set("schema_version", kSchemaVersion);
  root.set("result", std::move(payload));
  return root;
}

}  // namespace eblab
