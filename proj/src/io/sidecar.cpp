#include "forge/io/sidecar.hpp"

#include <bit>
#include <cstring>

#include "forge/core/error.hpp"
#include "forge/io/files.hpp"

namespace forge::io {
namespace {

constexpr char kMagic[4] = {'C', 'F', 'C', 'M'};

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out += s;
  }
  std::string out;

 private:
  void put(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
};

class Reader {
 public:
  explicit Reader(std::string_view b) : bytes_(b) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::kSchema, "correspondence sidecar truncated at byte " + std::to_string(pos_));
    }
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_sidecar(const CorrespondenceMap& map) {
  Writer w;
  w.out.append(kMagic, 4);
  w.u32(kSidecarVersion);
  w.u32(static_cast<std::uint32_t>(map.resolution));
  w.u32(static_cast<std::uint32_t>(map.parts.size()));
  w.u64(map.entries.size());
  for (const auto& p : map.parts) {
    w.str(p.path);
    w.str(p.template_id);
    w.u32(p.face_count);
  }
  w.out.reserve(w.out.size() + map.entries.size() * kSidecarRecordSize);
  for (const auto& e : map.entries) {
    w.u32(e.part);
    w.u32(e.face);
    for (double b : e.barycentric) w.f64(b);
    for (int a = 0; a < 3; ++a) w.f64(e.point[a]);
    for (int a = 0; a < 3; ++a) w.f64(e.offset[a]);
    w.f64(e.distance);
  }
  return std::move(w.out);
}

CorrespondenceMap decode_sidecar(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::kSchema, "not a correspondence sidecar (bad magic)");
  }
  Reader r(bytes.substr(4));
  const std::uint32_t version = r.u32();
  if (version != kSidecarVersion) {
    throw Error(ErrorKind::kSchema, "unsupported sidecar version " + std::to_string(version));
  }
  CorrespondenceMap map;
  map.resolution = static_cast<int>(r.u32());
  const std::uint32_t part_count = r.u32();
  const std::uint64_t entry_count = r.u64();
  for (std::uint32_t i = 0; i < part_count; ++i) {
    CorrespondencePart p;
    p.path = r.str();
    p.template_id = r.str();
    p.face_count = r.u32();
    map.parts.push_back(std::move(p));
  }
  if (r.remaining() != entry_count * kSidecarRecordSize) {
    throw Error(ErrorKind::kSchema, "sidecar holds " + std::to_string(r.remaining()) + " record bytes, expected " +
                                        std::to_string(entry_count * kSidecarRecordSize));
  }
  map.entries.resize(entry_count);
  for (auto& e : map.entries) {
    e.part = r.u32();
    e.face = r.u32();
    for (double& b : e.barycentric) b = r.f64();
    for (int a = 0; a < 3; ++a) e.point[a] = r.f64();
    for (int a = 0; a < 3; ++a) e.offset[a] = r.f64();
    e.distance = r.f64();
    if (e.part >= part_count) throw Error(ErrorKind::kSchema, "sidecar record references part " + std::to_string(e.part));
    if (e.face >= map.parts[e.part].face_count) {
      throw Error(ErrorKind::kSchema, "sidecar record references face " + std::to_string(e.face) + " of part " +
                                          std::to_string(e.part));
    }
  }
  return map;
}

void save_sidecar(const std::filesystem::path& path, const CorrespondenceMap& map) {
  write_file_atomic(path, encode_sidecar(map));
}

CorrespondenceMap load_sidecar(const std::filesystem::path& path) {
  try {
    return decode_sidecar(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw Error(e.kind(), path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace forge::io
