#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "forge/correspondence/conceptualization.hpp"
#include "forge/io/json.hpp"

namespace forge::io {

// Parameter counting rule: for every part node of a document, its continuous
// and discrete parameters plus 7 pose numbers (quaternion + translation).
inline constexpr const char* kCountingRule = "part-continuous+discrete+7/v1";

struct ObjectCounts {
  std::size_t instances = 0;   // leaf geometry instances after full expansion
  std::size_t parameters = 0;  // per kCountingRule
};

ObjectCounts count_object(const TemplateRegistry& registry, const Conceptualization& c);

struct CategoryStats {
  std::string code;
  std::string name;
  std::size_t n = 0;
  std::size_t i_ttl = 0, i_med = 0, i_max = 0;
  std::size_t p_ttl = 0, p_med = 0, p_max = 0;

  friend bool operator==(const CategoryStats&, const CategoryStats&) = default;
};

struct SkippedFile {
  std::string file;  // relative to the scanned directory
  std::string reason;

  friend bool operator==(const SkippedFile&, const SkippedFile&) = default;
};

struct AssetStats {
  std::vector<CategoryStats> categories;  // sorted by code
  std::size_t n = 0, i_ttl = 0, p_ttl = 0;
  std::vector<SkippedFile> skipped;  // sorted by file

  friend bool operator==(const AssetStats&, const AssetStats&) = default;
};

/// Lower median: element (n - 1) / 2 of the sorted values; 0 when empty.
std::size_t lower_median(std::vector<std::size_t> values);

/// Groups by category code; a code seen with several names reports the
/// smallest one.
AssetStats aggregate_stats(const std::vector<std::pair<Category, ObjectCounts>>& objects);

/// Every *.json file below `directory`. Files that fail to load are reported
/// in `skipped`. Throws Error(kNotFound) when the directory does not exist.
AssetStats compute_stats(const TemplateRegistry& registry, const std::filesystem::path& directory);

/// Rows N, I_ttl, I_med, I_max, P_ttl, P_med, P_max; one column per category
/// plus TTL (medians and maxima of TTL shown as "-").
std::string format_stats_table(const AssetStats& stats);

Json stats_to_json(const AssetStats& stats);
AssetStats stats_from_json(const JsonReader& reader);

}  // namespace forge::io
