#include "forge/io/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <optional>
#include <vector>

#include "forge/core/error.hpp"
#include "forge/io/files.hpp"

namespace forge::io {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::kInvalidArgument, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Splits into lines, numbering from 1.
template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    ++line;
    if (!f(line, text.substr(pos, end - pos))) return;
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

void add_polygon(TriMesh& m, const std::vector<long long>& idx, std::size_t line) {
  if (idx.size() < 3) fail(line, "face needs at least 3 vertices");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) fail(line, "polygon repeats vertex " + std::to_string(idx[i]) + " and cannot be triangulated");
    }
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    m.faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                       static_cast<std::uint32_t>(idx[k + 1])});
  }
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

MeshFormat format_of(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return MeshFormat::kObj;
  if (ext == ".ply") return MeshFormat::kPly;
  throw Error(ErrorKind::kInvalidArgument, "unsupported mesh format '" + ext + "' (expected .obj or .ply)");
}

TriMesh parse_obj(std::string_view text) {
  TriMesh m;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    const auto hash = raw.find('#');
    const auto t = tokens(hash == std::string_view::npos ? raw : raw.substr(0, hash));
    if (t.empty()) return true;
    if (t[0] == "v") {
      if (t.size() != 4 && t.size() != 5 && t.size() != 7) fail(line, "vertex needs 3 coordinates");
      Vec3 v;
      for (int a = 0; a < 3; ++a) {
        auto d = to_double(t[static_cast<std::size_t>(a) + 1]);
        if (!d) fail(line, "bad coordinate '" + std::string(t[static_cast<std::size_t>(a) + 1]) + "'");
        v[a] = *d;
      }
      m.vertices.push_back(v);
    } else if (t[0] == "f") {
      std::vector<long long> idx;
      for (std::size_t i = 1; i < t.size(); ++i) {
        const auto slash = t[i].find('/');
        auto k = to_int(t[i].substr(0, slash));
        if (!k || *k == 0) fail(line, "bad face index '" + std::string(t[i]) + "'");
        const auto n = static_cast<long long>(m.vertices.size());
        const long long r = *k > 0 ? *k - 1 : n + *k;
        if (r < 0 || r >= n) fail(line, "face index " + std::to_string(*k) + " out of range");
        idx.push_back(r);
      }
      add_polygon(m, idx, line);
    } else if (t[0] == "vn" || t[0] == "vt" || t[0] == "vp" || t[0] == "o" || t[0] == "g" || t[0] == "s" ||
               t[0] == "usemtl" || t[0] == "mtllib" || t[0] == "l") {
      // not geometry we keep
    } else {
      fail(line, "unknown statement '" + std::string(t[0]) + "'");
    }
    return true;
  });
  return m;
}

TriMesh parse_ply(std::string_view text) {
  struct Element {
    std::string name;
    long long count = 0;
    std::vector<std::string> props;  // scalar property names; "list:<name>" for lists
  };
  std::vector<Element> elements;
  bool header = true, saw_magic = false, saw_format = false;
  std::size_t body_line = 0;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    const auto t = tokens(raw);
    if (line == 1) {
      if (t.size() != 1 || t[0] != "ply") fail(line, "missing 'ply' magic");
      saw_magic = true;
      return true;
    }
    if (t.empty()) return true;
    if (t[0] == "format") {
      if (t.size() < 2 || t[1] != "ascii") fail(line, "only ASCII PLY is supported");
      saw_format = true;
    } else if (t[0] == "comment" || t[0] == "obj_info") {
    } else if (t[0] == "element") {
      if (t.size() != 3) fail(line, "malformed element");
      auto n = to_int(t[2]);
      if (!n || *n < 0) fail(line, "bad element count");
      elements.push_back({std::string(t[1]), *n, {}});
    } else if (t[0] == "property") {
      if (elements.empty()) fail(line, "property before element");
      if (t.size() == 5 && t[1] == "list") {
        elements.back().props.push_back("list:" + std::string(t[4]));
      } else if (t.size() == 3) {
        elements.back().props.push_back(std::string(t[2]));
      } else {
        fail(line, "malformed property");
      }
    } else if (t[0] == "end_header") {
      header = false;
      body_line = line;
      return false;
    } else {
      fail(line, "unknown header line '" + std::string(t[0]) + "'");
    }
    return true;
  });
  if (!saw_magic) fail(1, "missing 'ply' magic");
  if (header) fail(1, "missing end_header");
  if (!saw_format) fail(body_line, "missing format line");

  TriMesh m;
  std::size_t el = 0;
  long long done = 0;
  int ix = -1, iy = -1, iz = -1;
  auto setup = [&] {
    while (el < elements.size() && elements[el].count == 0) ++el;
    if (el < elements.size() && elements[el].name == "vertex") {
      const auto& p = elements[el].props;
      for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        if (p[static_cast<std::size_t>(i)] == "x") ix = i;
        if (p[static_cast<std::size_t>(i)] == "y") iy = i;
        if (p[static_cast<std::size_t>(i)] == "z") iz = i;
      }
      if (ix < 0 || iy < 0 || iz < 0) fail(body_line, "vertex element lacks x, y, z");
    }
  };
  setup();
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    if (line <= body_line) return true;
    const auto t = tokens(raw);
    if (t.empty()) return true;
    if (el >= elements.size()) fail(line, "data after the last element");
    const Element& e = elements[el];
    if (e.name == "vertex") {
      if (t.size() != e.props.size()) fail(line, "vertex has " + std::to_string(t.size()) + " values, expected " + std::to_string(e.props.size()));
      Vec3 v;
      const int idx[3] = {ix, iy, iz};
      for (int a = 0; a < 3; ++a) {
        auto d = to_double(t[static_cast<std::size_t>(idx[a])]);
        if (!d) fail(line, "bad coordinate");
        v[a] = *d;
      }
      m.vertices.push_back(v);
    } else if (e.name == "face") {
      auto n = to_int(t[0]);
      if (!n || *n < 0 || static_cast<std::size_t>(*n) + 1 != t.size()) fail(line, "malformed face list");
      std::vector<long long> idx;
      for (std::size_t i = 1; i < t.size(); ++i) {
        auto k = to_int(t[i]);
        if (!k || *k < 0 || *k >= static_cast<long long>(m.vertices.size())) fail(line, "face index out of range");
        idx.push_back(*k);
      }
      add_polygon(m, idx, line);
    }
    if (++done == e.count) {
      ++el;
      done = 0;
      setup();
    }
    return true;
  });
  if (el < elements.size()) fail(body_line, "file ends before element '" + elements[el].name + "' is complete");
  return m;
}

TriMesh load_mesh(const std::filesystem::path& path) {
  const MeshFormat f = format_of(path);
  const std::string text = read_file(path);
  try {
    return f == MeshFormat::kObj ? parse_obj(text) : parse_ply(text);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

PointCloud load_points(const std::filesystem::path& path) {
  PointCloud pc;
  pc.points = load_mesh(path).vertices;
  return pc;
}

std::string format_obj(const TriMesh& mesh) {
  std::string out;
  for (const Vec3& v : mesh.vertices) out += "v " + fmt9(v.x) + " " + fmt9(v.y) + " " + fmt9(v.z) + "\n";
  for (const Face& f : mesh.faces) {
    out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
  }
  return out;
}

namespace {
std::string ply_header(std::size_t vertices, std::size_t faces, bool with_faces) {
  std::string h = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(vertices) +
                  "\nproperty double x\nproperty double y\nproperty double z\n";
  if (with_faces) h += "element face " + std::to_string(faces) + "\nproperty list uchar int vertex_indices\n";
  return h + "end_header\n";
}
}  // namespace

std::string format_ply(const TriMesh& mesh) {
  std::string out = ply_header(mesh.vertices.size(), mesh.faces.size(), true);
  for (const Vec3& v : mesh.vertices) out += fmt9(v.x) + " " + fmt9(v.y) + " " + fmt9(v.z) + "\n";
  for (const Face& f : mesh.faces) {
    out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  }
  return out;
}

std::string format_ply(const PointCloud& cloud) {
  std::string out = ply_header(cloud.points.size(), 0, false);
  for (const Vec3& v : cloud.points) out += fmt9(v.x) + " " + fmt9(v.y) + " " + fmt9(v.z) + "\n";
  return out;
}

void save_mesh(const std::filesystem::path& path, const TriMesh& mesh) {
  write_file_atomic(path, format_of(path) == MeshFormat::kObj ? format_obj(mesh) : format_ply(mesh));
}

void save_points(const std::filesystem::path& path, const PointCloud& cloud) {
  if (format_of(path) == MeshFormat::kObj) {
    write_file_atomic(path, format_obj(TriMesh{cloud.points, {}, false}));
  } else {
    write_file_atomic(path, format_ply(cloud));
  }
}

}  // namespace forge::io
