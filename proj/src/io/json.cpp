#include "forge/io/json.hpp"

#include <cmath>

#include "forge/core/error.hpp"

namespace forge::io {
namespace {

void check_finite(const Json& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) {
    throw Error(ErrorKind::kNumeric, "cannot serialize a non-finite number");
  }
  if (v.is_structured()) {
    for (const auto& c : v) check_finite(c);
  }
}

const char* type_name(const Json& v) {
  if (v.is_number()) return "number";
  return v.type_name();
}

}  // namespace

std::string canonical_dump(const Json& value) {
  check_finite(value);
  return value.dump(2) + "\n";
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kSchema, "invalid JSON at byte " + std::to_string(e.byte));
  }
}

void JsonReader::fail(const std::string& message) const {
  throw Error(ErrorKind::kSchema, path_ + ": " + message);
}

void JsonReader::expect_object(std::initializer_list<std::string_view> required,
                               std::initializer_list<std::string_view> optional) const {
  if (!value_->is_object()) fail(std::string("expected object, got ") + type_name(*value_));
  for (const auto& [key, _] : value_->items()) {
    bool known = false;
    for (auto k : required) known = known || k == key;
    for (auto k : optional) known = known || k == key;
    if (!known) fail("unknown field '" + key + "'");
  }
  for (auto k : required) {
    if (!value_->contains(k)) fail("missing field '" + std::string(k) + "'");
  }
}

bool JsonReader::has(std::string_view key) const { return value_->is_object() && value_->contains(key); }

JsonReader JsonReader::at(std::string_view key) const {
  if (!value_->is_object()) fail(std::string("expected object, got ") + type_name(*value_));
  auto it = value_->find(key);
  if (it == value_->end()) fail("missing field '" + std::string(key) + "'");
  return JsonReader(*it, path_ + "." + std::string(key));
}

JsonReader JsonReader::at(std::size_t index) const {
  if (!value_->is_array() || index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
  return JsonReader((*value_)[index], path_ + "[" + std::to_string(index) + "]");
}

std::size_t JsonReader::array_size() const {
  if (!value_->is_array()) fail(std::string("expected array, got ") + type_name(*value_));
  return value_->size();
}

std::string JsonReader::string() const {
  if (!value_->is_string()) fail(std::string("expected string, got ") + type_name(*value_));
  return value_->get<std::string>();
}

double JsonReader::number() const {
  if (!value_->is_number()) fail(std::string("expected number, got ") + type_name(*value_));
  const double v = value_->get<double>();
  if (!std::isfinite(v)) fail("number is not finite");
  return v;
}

long long JsonReader::integer() const {
  if (value_->is_number_integer()) return value_->get<long long>();
  if (value_->is_number_float()) {
    const double v = value_->get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  fail(std::string("expected integer, got ") + type_name(*value_));
}

bool JsonReader::boolean() const {
  if (!value_->is_boolean()) fail(std::string("expected boolean, got ") + type_name(*value_));
  return value_->get<bool>();
}

}  // namespace forge::io
