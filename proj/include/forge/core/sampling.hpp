#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "forge/core/mesh.hpp"

namespace forge {

/// Deterministic uniform doubles in [0, 1) built from raw 64-bit draws, so
/// streams are identical across standard library implementations.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
  std::uint64_t next_raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct SurfaceSample {
  std::uint32_t face = 0;
  std::array<double, 3> barycentric{};
  Vec3 point;
};

/// Area-weighted samples. Face selection is stratified over the cumulative
/// area, so each face receives its expected count to within two samples.
/// Throws Error(kInvalidArgument) if n == 0 or the mesh has no area.
std::vector<SurfaceSample> sample_surface_detailed(const TriMesh& mesh, std::size_t n,
                                                   std::uint64_t seed);

/// As above; tags hold the source face of each point.
PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

}  // namespace forge
