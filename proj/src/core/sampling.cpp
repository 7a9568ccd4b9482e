#include "forge/core/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "forge/core/error.hpp"

namespace forge {

std::vector<SurfaceSample> sample_surface_detailed(const TriMesh& mesh, std::size_t n,
                                                   std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "sample count must be at least 1");
  std::vector<double> cdf(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cdf[f] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::kInvalidArgument, "cannot sample a mesh with zero surface area");
  }

  UniformRng rng(seed);
  std::vector<SurfaceSample> out(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + rng.next()) * inv_n * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) it = std::lower_bound(cdf.begin(), cdf.end(), total);
    const auto face = static_cast<std::uint32_t>(it - cdf.begin());

    const double s = std::sqrt(rng.next());
    const double r2 = rng.next();
    SurfaceSample& smp = out[i];
    smp.face = face;
    smp.barycentric = {1.0 - s, s * (1.0 - r2), s * r2};
    const Face& t = mesh.faces[face];
    smp.point = mesh.vertices[t[0]] * smp.barycentric[0] + mesh.vertices[t[1]] * smp.barycentric[1] +
                mesh.vertices[t[2]] * smp.barycentric[2];
  }
  return out;
}

PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  PointCloud cloud;
  const auto samples = sample_surface_detailed(mesh, n, seed);
  cloud.points.reserve(n);
  cloud.tags.reserve(n);
  for (const SurfaceSample& s : samples) {
    cloud.points.push_back(s.point);
    cloud.tags.push_back(static_cast<std::int32_t>(s.face));
  }
  return cloud;
}

}  // namespace forge
