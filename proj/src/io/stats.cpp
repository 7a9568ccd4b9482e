#include "forge/io/stats.hpp"

#include <algorithm>
#include <map>

#include "forge/core/error.hpp"
#include "forge/io/document.hpp"

namespace forge::io {
namespace {

std::size_t count_parameters(const std::vector<ConceptPart>& parts) {
  std::size_t p = 0;
  for (const auto& part : parts) {
    p += part.instance.continuous.size() + part.instance.discrete.size() + 7;
    p += count_parameters(part.children);
  }
  return p;
}

// Leaf counts do not depend on tessellation, so expand coarsely.
constexpr int kCountResolution = 4;

}  // namespace

ObjectCounts count_object(const TemplateRegistry& registry, const Conceptualization& c) {
  ObjectCounts out;
  for (const FlatPart& fp : flatten(registry, c, kCountResolution)) out.instances += fp.expansion.leaves.size();
  out.parameters = count_parameters(c.parts);
  return out;
}

std::size_t lower_median(std::vector<std::size_t> values) {
  if (values.empty()) return 0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

AssetStats aggregate_stats(const std::vector<std::pair<Category, ObjectCounts>>& objects) {
  struct Acc {
    std::string name;
    std::vector<std::size_t> i, p;
  };
  std::map<std::string, Acc> groups;
  AssetStats out;
  for (const auto& [cat, counts] : objects) {
    auto [it, fresh] = groups.try_emplace(cat.code, Acc{cat.name, {}, {}});
    if (!fresh && cat.name < it->second.name) it->second.name = cat.name;
    it->second.i.push_back(counts.instances);
    it->second.p.push_back(counts.parameters);
    ++out.n;
    out.i_ttl += counts.instances;
    out.p_ttl += counts.parameters;
  }
  for (const auto& [code, acc] : groups) {
    CategoryStats s;
    s.code = code;
    s.name = acc.name;
    s.n = acc.i.size();
    for (std::size_t k = 0; k < s.n; ++k) {
      s.i_ttl += acc.i[k];
      s.p_ttl += acc.p[k];
      s.i_max = std::max(s.i_max, acc.i[k]);
      s.p_max = std::max(s.p_max, acc.p[k]);
    }
    s.i_med = lower_median(acc.i);
    s.p_med = lower_median(acc.p);
    out.categories.push_back(std::move(s));
  }
  return out;
}

AssetStats compute_stats(const TemplateRegistry& registry, const std::filesystem::path& directory) {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec)) {
    throw Error(ErrorKind::kNotFound, "no such directory: " + directory.string());
  }
  std::vector<std::filesystem::path> files;
  for (auto it = std::filesystem::recursive_directory_iterator(directory, ec);
       !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".json") files.push_back(it->path());
  }
  if (ec) throw Error(ErrorKind::kIo, "cannot list " + directory.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<std::pair<Category, ObjectCounts>> objects;
  std::vector<SkippedFile> skipped;
  for (const auto& f : files) {
    const std::string rel = f.lexically_relative(directory).generic_string();
    try {
      const Conceptualization c = load_document(registry, f);
      objects.emplace_back(c.category, count_object(registry, c));
    } catch (const Error& e) {
      std::string reason = e.what();
      // Drop the absolute path that load_document prefixes.
      if (reason.rfind(f.string() + ": ", 0) == 0) reason = reason.substr(f.string().size() + 2);
      skipped.push_back({rel, reason});
    }
  }
  AssetStats out = aggregate_stats(objects);
  out.skipped = std::move(skipped);
  return out;
}

std::string format_stats_table(const AssetStats& s) {
  std::vector<std::string> header{""};
  std::vector<std::vector<std::string>> rows(7);
  const char* labels[7] = {"N", "I_ttl", "I_med", "I_max", "P_ttl", "P_med", "P_max"};
  for (int r = 0; r < 7; ++r) rows[static_cast<std::size_t>(r)].push_back(labels[r]);
  for (const auto& c : s.categories) {
    header.push_back(c.code);
    const std::size_t v[7] = {c.n, c.i_ttl, c.i_med, c.i_max, c.p_ttl, c.p_med, c.p_max};
    for (int r = 0; r < 7; ++r) rows[static_cast<std::size_t>(r)].push_back(std::to_string(v[r]));
  }
  header.push_back("TTL");
  const std::string ttl[7] = {std::to_string(s.n), std::to_string(s.i_ttl), "-", "-", std::to_string(s.p_ttl), "-", "-"};
  for (int r = 0; r < 7; ++r) rows[static_cast<std::size_t>(r)].push_back(ttl[r]);

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += "  ";
      out += cells[c];
      if (c + 1 < cells.size()) out.append(width[c] - cells[c].size(), ' ');
    }
    return out + "\n";
  };
  std::string out = line(header);
  for (const auto& row : rows) out += line(row);
  return out;
}

Json stats_to_json(const AssetStats& s) {
  Json cats = Json::array(), skipped = Json::array();
  for (const auto& c : s.categories) {
    cats.push_back(Json{{"code", c.code}, {"name", c.name}, {"N", c.n},
                        {"I_ttl", c.i_ttl}, {"I_med", c.i_med}, {"I_max", c.i_max},
                        {"P_ttl", c.p_ttl}, {"P_med", c.p_med}, {"P_max", c.p_max}});
  }
  for (const auto& f : s.skipped) skipped.push_back(Json{{"file", f.file}, {"reason", f.reason}});
  return Json{{"counting_rule", kCountingRule},
              {"categories", std::move(cats)},
              {"total", Json{{"N", s.n}, {"I_ttl", s.i_ttl}, {"P_ttl", s.p_ttl}}},
              {"skipped", std::move(skipped)}};
}

AssetStats stats_from_json(const JsonReader& r) {
  r.expect_object({"counting_rule", "categories", "total", "skipped"});
  if (r.at("counting_rule").string() != kCountingRule) r.at("counting_rule").fail("unsupported counting rule");
  auto count = [](const JsonReader& v) {
    const long long k = v.integer();
    if (k < 0) v.fail("expected a non-negative count");
    return static_cast<std::size_t>(k);
  };
  AssetStats s;
  const JsonReader cats = r.at("categories");
  for (std::size_t i = 0; i < cats.array_size(); ++i) {
    const JsonReader c = cats.at(i);
    c.expect_object({"code", "name", "N", "I_ttl", "I_med", "I_max", "P_ttl", "P_med", "P_max"});
    s.categories.push_back({c.at("code").string(), c.at("name").string(), count(c.at("N")),
                            count(c.at("I_ttl")), count(c.at("I_med")), count(c.at("I_max")),
                            count(c.at("P_ttl")), count(c.at("P_med")), count(c.at("P_max"))});
  }
  const JsonReader t = r.at("total");
  t.expect_object({"N", "I_ttl", "P_ttl"});
  s.n = count(t.at("N"));
  s.i_ttl = count(t.at("I_ttl"));
  s.p_ttl = count(t.at("P_ttl"));
  const JsonReader sk = r.at("skipped");
  for (std::size_t i = 0; i < sk.array_size(); ++i) {
    const JsonReader f = sk.at(i);
    f.expect_object({"file", "reason"});
    s.skipped.push_back({f.at("file").string(), f.at("reason").string()});
  }
  return s;
}

}  // namespace forge::io
