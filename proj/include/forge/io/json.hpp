#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

namespace forge::io {

using Json = nlohmann::json;

/// Sorted keys, two-space indent, shortest round-trip doubles, trailing newline.
/// Throws Error(kNumeric) if the value holds a non-finite number.
std::string canonical_dump(const Json& value);

/// Throws Error(kSchema) with the byte offset on a syntax error.
Json parse_json(std::string_view text);

/// Strict, path-qualified view of a JSON value. Every failure throws
/// Error(kSchema) with a message of the form "$.parts[0].pose: ...".
class JsonReader {
 public:
  explicit JsonReader(const Json& value, std::string path = "$") : value_(&value), path_(std::move(path)) {}

  const Json& json() const { return *value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const;

  /// Requires an object whose keys are all listed and which has every required key.
  void expect_object(std::initializer_list<std::string_view> required,
                     std::initializer_list<std::string_view> optional = {}) const;
  bool has(std::string_view key) const;
  JsonReader at(std::string_view key) const;
  JsonReader at(std::size_t index) const;
  std::size_t array_size() const;
  bool is_null() const { return value_->is_null(); }

  std::string string() const;
  double number() const;  // finite
  long long integer() const;
  bool boolean() const;

 private:
  const Json* value_;
  std::string path_;
};

}  // namespace forge::io
