#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "forge/core/mesh.hpp"

namespace forge::io {

enum class MeshFormat { kObj, kPly };

/// Format from the file extension (.obj / .ply, case-insensitive).
MeshFormat format_of(const std::filesystem::path& path);

/// ASCII OBJ or PLY. Polygons are fan-triangulated; errors carry the line
/// number. Throws Error(kInvalidArgument) for malformed input.
TriMesh parse_obj(std::string_view text);
TriMesh parse_ply(std::string_view text);
TriMesh load_mesh(const std::filesystem::path& path);

/// Vertices only; faces, if any, are ignored.
PointCloud load_points(const std::filesystem::path& path);

/// Coordinates printed with 9 significant digits.
std::string format_obj(const TriMesh& mesh);
std::string format_ply(const TriMesh& mesh);
std::string format_ply(const PointCloud& cloud);
void save_mesh(const std::filesystem::path& path, const TriMesh& mesh);
void save_points(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace forge::io
