#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "forge/correspondence/correspondence.hpp"

namespace forge::io {

inline constexpr std::uint32_t kSidecarVersion = 1;
// Bytes per entry: part, face (u32) then barycentric, point, offset, distance (f64).
inline constexpr std::size_t kSidecarRecordSize = 4 + 4 + 8 * 10;

/// Little-endian binary layout:
///   "CFCM" u32 version, i32 resolution, u32 part_count, u64 entry_count
///   per part: u32 length + path bytes, u32 length + template id bytes, u32 face_count
///   entry_count fixed-width records
std::string encode_sidecar(const CorrespondenceMap& map);
/// Throws Error(kSchema) on a bad magic, version, truncation or trailing bytes.
CorrespondenceMap decode_sidecar(std::string_view bytes);

void save_sidecar(const std::filesystem::path& path, const CorrespondenceMap& map);
CorrespondenceMap load_sidecar(const std::filesystem::path& path);

}  // namespace forge::io
