#include "forge/io/document.hpp"

#include "forge/core/error.hpp"
#include "forge/io/files.hpp"
#include "forge/io/payload.hpp"

namespace forge::io {

bool is_category_code(std::string_view code) {
  if (code.size() != 3) return false;
  for (char ch : code) {
    if (!std::isalnum(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

void CategoryRegistry::add(Category category) {
  if (!is_category_code(category.code)) {
    throw Error(ErrorKind::kInvalidArgument, "category code must be 3 letters or digits: '" + category.code + "'");
  }
  if (category.name.empty()) throw Error(ErrorKind::kInvalidArgument, "category '" + category.code + "' needs a name");
  if (contains(category.code)) throw Error(ErrorKind::kConflict, "category '" + category.code + "' already registered");
  names_.emplace(std::move(category.code), std::move(category.name));
}

const std::string& CategoryRegistry::name(std::string_view code) const {
  auto it = names_.find(code);
  if (it == names_.end()) throw Error(ErrorKind::kNotFound, "unknown category code '" + std::string(code) + "'");
  return it->second;
}

std::vector<Category> CategoryRegistry::all() const {
  std::vector<Category> out;
  for (const auto& [c, n] : names_) out.push_back({c, n});
  return out;
}

CategoryRegistry builtin_categories() {
  CategoryRegistry r;
  const std::pair<const char*, const char*> known[] = {
      {"Bot", "Bottle"},         {"Box", "Box"},
      {"Bkt", "Bucket"},         {"Chr", "Chair"},
      {"Dsw", "Dishwasher"},     {"Dsp", "Dispenser"},
      {"Dpl", "Display"},        {"Dor", "Door"},
      {"Egl", "Eyeglasses"},     {"Fct", "Faucet"},
      {"Fdr", "FoldingChair"},   {"Glb", "Globe"},
      {"Ket", "Kettle"},         {"Ktp", "KitchenPot"},
      {"Knf", "Knife"},          {"Ltp", "Laptop"},
      {"Lgt", "Lighter"},        {"Mcw", "Microwave"},
      {"Mug", "Mug"},            {"Ovn", "Oven"},
      {"Pen", "Pen"},            {"Plr", "Pliers"},
      {"Rfg", "Refrigerator"},   {"Saf", "Safe"},
      {"Scs", "Scissors"},       {"Stp", "Stapler"},
      {"Stf", "StorageFurniture"}, {"Swt", "Switch"},
      {"Tab", "Table"},          {"Tcn", "TrashCan"},
      {"USB", "USB"},            {"Wsm", "WashingMachine"},
      {"Win", "Window"},
  };
  for (const auto& [c, n] : known) r.add({c, n});
  return r;
}

namespace {

Json part_to_json(const TemplateRegistry& registry, const ConceptPart& part) {
  Json j = instance_to_json(registry, part.instance);
  j["part_name"] = part.name;
  Json children = Json::array();
  for (const auto& c : part.children) children.push_back(part_to_json(registry, c));
  j["children"] = std::move(children);
  return j;
}

}  // namespace

ConceptPart part_from_json(const TemplateRegistry& registry, const JsonReader& r) {
  r.expect_object({"part_name", "template_id", "continuous_params", "discrete_params", "pose", "children"});
  ConceptPart part;
  part.name = r.at("part_name").string();
  Json inst = r.json();
  inst.erase("part_name");
  inst.erase("children");
  part.instance = instance_from_json(registry, JsonReader(inst, r.path()));
  const JsonReader ch = r.at("children");
  for (std::size_t i = 0; i < ch.array_size(); ++i) part.children.push_back(part_from_json(registry, ch.at(i)));
  return part;
}

Json parts_to_json(const TemplateRegistry& registry, const std::vector<ConceptPart>& parts) {
  Json out = Json::array();
  for (const auto& p : parts) out.push_back(part_to_json(registry, p));
  return out;
}

Json document_to_json(const TemplateRegistry& registry, const Conceptualization& c) {
  if (c.parts.empty()) throw Error(ErrorKind::kSchema, "$.parts: at least 1 part required");
  validate_conceptualization(registry, c);
  if (!is_category_code(c.category.code)) {
    throw Error(ErrorKind::kSchema, "category code must be 3 letters or digits: '" + c.category.code + "'");
  }
  Json parts = parts_to_json(registry, c.parts);
  return Json{{"schema_version", kDocumentSchemaVersion},
              {"object_id", c.object_id},
              {"category", Json{{"code", c.category.code}, {"name", c.category.name}}},
              {"source_mesh", c.source_mesh},
              {"parts", std::move(parts)}};
}

std::string serialize_document(const TemplateRegistry& registry, const Conceptualization& c) {
  return canonical_dump(document_to_json(registry, c));
}

Conceptualization document_from_json(const TemplateRegistry& registry, const JsonReader& r,
                                     const CategoryRegistry* categories) {
  r.expect_object({"schema_version", "object_id", "category", "source_mesh", "parts"});
  const JsonReader ver = r.at("schema_version");
  if (ver.integer() != kDocumentSchemaVersion) {
    ver.fail("unsupported schema version " + std::to_string(ver.integer()) + " (expected " +
             std::to_string(kDocumentSchemaVersion) + ")");
  }
  Conceptualization c;
  c.object_id = r.at("object_id").string();
  const JsonReader cat = r.at("category");
  cat.expect_object({"code", "name"});
  c.category.code = cat.at("code").string();
  c.category.name = cat.at("name").string();
  if (!is_category_code(c.category.code)) cat.at("code").fail("expected a 3-character category code");
  if (categories && !categories->contains(c.category.code)) {
    cat.at("code").fail("unknown category code '" + c.category.code + "'");
  }
  c.source_mesh = r.at("source_mesh").string();
  const JsonReader parts = r.at("parts");
  if (parts.array_size() == 0) parts.fail("at least 1 part required");
  for (std::size_t i = 0; i < parts.array_size(); ++i) c.parts.push_back(part_from_json(registry, parts.at(i)));
  try {
    validate_conceptualization(registry, c);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw Error(ErrorKind::kSchema, "$.parts: " + std::string(e.what()));
    throw;
  }
  return c;
}

Conceptualization parse_document(const TemplateRegistry& registry, std::string_view text,
                                 const CategoryRegistry* categories) {
  const Json j = parse_json(text);
  return document_from_json(registry, JsonReader(j), categories);
}

Conceptualization load_document(const TemplateRegistry& registry, const std::filesystem::path& path,
                                const CategoryRegistry* categories) {
  const std::string text = read_file(path);
  try {
    return parse_document(registry, text, categories);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_document(const TemplateRegistry& registry, const std::filesystem::path& path, const Conceptualization& c) {
  write_file_atomic(path, serialize_document(registry, c));
}

}  // namespace forge::io
