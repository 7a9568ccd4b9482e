#include "forge/core/point_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "forge/core/error.hpp"

namespace forge {

PointIndex::PointIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorKind::kInvalidArgument, "point index needs at least one point");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  axis_.assign(points_.size(), 0);
  build(0, static_cast<std::uint32_t>(points_.size()), 0);
}

void PointIndex::build(std::uint32_t begin, std::uint32_t end, int depth) {
  if (end - begin <= 1) return;
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = cwise_min(lo, points_[order_[i]]);
    hi = cwise_max(hi, points_[order_[i]]);
  }
  const Vec3 ext = hi - lo;
  int axis = 0;
  if (ext.y > ext[axis]) axis = 1;
  if (ext.z > ext[axis]) axis = 2;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  axis_[mid] = static_cast<std::uint8_t>(axis);
  build(begin, mid, depth + 1);
  build(mid + 1, end, depth + 1);
}

void PointIndex::search(std::uint32_t begin, std::uint32_t end, const Vec3& q,
                        Neighbor& best) const {
  if (begin >= end) return;
  const std::uint32_t mid = begin + (end - begin) / 2;
  const std::uint32_t idx = order_[mid];
  const double d = squared_norm(points_[idx] - q);
  if (d < best.squared_distance || (d == best.squared_distance && idx < best.index)) {
    best = {idx, d};
  }
  if (end - begin == 1) return;
  const int axis = axis_[mid];
  const double diff = q[axis] - points_[idx][axis];
  const bool left_first = diff <= 0.0;
  if (left_first) {
    search(begin, mid, q, best);
    if (diff * diff <= best.squared_distance) search(mid + 1, end, q, best);
  } else {
    search(mid + 1, end, q, best);
    if (diff * diff <= best.squared_distance) search(begin, mid, q, best);
  }
}

PointIndex::Neighbor PointIndex::nearest(const Vec3& q) const {
  Neighbor best{std::numeric_limits<std::uint32_t>::max(), std::numeric_limits<double>::infinity()};
  search(0, static_cast<std::uint32_t>(order_.size()), q, best);
  return best;
}

}  // namespace forge
