#pragma once

#include <cstdint>
#include <vector>

#include "forge/core/vec.hpp"

namespace forge {

/// k-d tree for exact nearest-neighbour queries; ties go to the lowest index.
class PointIndex {
 public:
  explicit PointIndex(std::vector<Vec3> points);

  struct Neighbor {
    std::uint32_t index = 0;
    double squared_distance = 0.0;
  };

  Neighbor nearest(const Vec3& q) const;
  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  void build(std::uint32_t begin, std::uint32_t end, int depth);
  void search(std::uint32_t begin, std::uint32_t end, const Vec3& q, Neighbor& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;  // tree layout: median of each range is the node
  std::vector<std::uint8_t> axis_;    // split axis, indexed by tree position
};

}  // namespace forge
