#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/correspondence/conceptualization.hpp"
#include "forge/io/json.hpp"

namespace forge::io {

inline constexpr int kDocumentSchemaVersion = 1;

/// Object categories by three-character code.
class CategoryRegistry {
 public:
  /// Throws Error(kInvalidArgument) for a malformed code and Error(kConflict)
  /// for a duplicate.
  void add(Category category);
  bool contains(std::string_view code) const { return names_.count(code) > 0; }
  /// Throws Error(kNotFound).
  const std::string& name(std::string_view code) const;
  std::vector<Category> all() const;

 private:
  std::map<std::string, std::string, std::less<>> names_;
};

/// Codes of the reference asset whose full names are unambiguous.
CategoryRegistry builtin_categories();

/// Three ASCII letters or digits.
bool is_category_code(std::string_view code);

/// Part records as they appear under "parts"; no validation.
Json parts_to_json(const TemplateRegistry& registry, const std::vector<ConceptPart>& parts);
ConceptPart part_from_json(const TemplateRegistry& registry, const JsonReader& reader);

/// Validates `c`, then builds the document tree.
Json document_to_json(const TemplateRegistry& registry, const Conceptualization& c);
std::string serialize_document(const TemplateRegistry& registry, const Conceptualization& c);

/// Strict parse: unknown or missing fields throw Error(kSchema) with a JSON
/// path, unknown template ids throw Error(kNotFound) naming the id, and the
/// result is validated against the registry. When `categories` is given the
/// category code must be registered.
Conceptualization document_from_json(const TemplateRegistry& registry, const JsonReader& reader,
                                     const CategoryRegistry* categories = nullptr);
Conceptualization parse_document(const TemplateRegistry& registry, std::string_view text,
                                 const CategoryRegistry* categories = nullptr);

Conceptualization load_document(const TemplateRegistry& registry, const std::filesystem::path& path,
                                const CategoryRegistry* categories = nullptr);
void save_document(const TemplateRegistry& registry, const std::filesystem::path& path, const Conceptualization& c);

}  // namespace forge::io
