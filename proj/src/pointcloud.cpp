#include "shm/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace shm {

void validate(const PointCloud& pc) {
  if (pc.colors && pc.colors->cols() != pc.points.cols())
    throw Error(Errc::InvalidCloud, "color count differs from point count");
  if (!pc.points.allFinite()) throw Error(Errc::InvalidCloud, "non-finite coordinate");
}

PointCloud apply_transform(const PointCloud& pc, const RigidTransformd& t) {
  PointCloud out = pc;
  out.points = apply_transform(pc.points, t);
  return out;
}

Eigen::Matrix<std::int64_t, 3, 1> voxel_index(const Eigen::Vector3d& p, const Eigen::Vector3d& anchor,
                                              double voxel_size) {
  Eigen::Matrix<std::int64_t, 3, 1> idx;
  for (int a = 0; a < 3; ++a) idx[a] = static_cast<std::int64_t>(std::floor((p[a] - anchor[a]) / voxel_size));
  return idx;
}

VoxelDownsample voxel_downsample_with_grid(const PointCloud& pc, double voxel_size,
                                           std::optional<Eigen::Vector3d> anchor) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size))
    throw Error(Errc::NonPositiveVoxelSize, "voxel size must be positive");
  validate(pc);

  VoxelDownsample result;
  result.cloud.name = pc.name;
  result.cloud.precision = pc.precision;
  result.anchor = anchor ? *anchor : (pc.empty() ? Eigen::Vector3d::Zero() : bounding_box(pc).min);

  const Eigen::Index n = pc.size();
  Eigen::Matrix<std::int64_t, 3, Eigen::Dynamic> keys(3, n);
  for (Eigen::Index i = 0; i < n; ++i) keys.col(i) = voxel_index(pc.points.col(i), result.anchor, voxel_size);

  // Stable so that members of a voxel are summed in file order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::lexicographical_compare(keys.col(a).data(), keys.col(a).data() + 3, keys.col(b).data(),
                                        keys.col(b).data() + 3);
  });

  std::vector<Eigen::Vector3d> centroids;
  std::vector<Eigen::Matrix<std::uint8_t, 3, 1>> colors;
  std::vector<Eigen::Matrix<std::int64_t, 3, 1>> cells;

  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    const auto key = keys.col(order[begin]);
    while (end < order.size() && keys.col(order[end]) == key) ++end;

    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    Eigen::Matrix<std::uint64_t, 3, 1> color_sum = Eigen::Matrix<std::uint64_t, 3, 1>::Zero();
    for (std::size_t k = begin; k < end; ++k) {
      sum += pc.points.col(order[k]);
      if (pc.colors) color_sum += pc.colors->col(order[k]).cast<std::uint64_t>();
    }
    const auto count = static_cast<std::uint64_t>(end - begin);
    centroids.emplace_back(sum / static_cast<double>(count));
    cells.emplace_back(key);
    if (pc.colors) {
      // round half-up of sum / count in integer arithmetic
      colors.emplace_back(((2 * color_sum.array() + count) / (2 * count)).cast<std::uint8_t>());
    }
    begin = end;
  }

  const auto m = static_cast<Eigen::Index>(centroids.size());
  result.cloud.points.resize(3, m);
  result.voxel_indices.resize(3, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    result.cloud.points.col(i) = centroids[static_cast<std::size_t>(i)];
    result.voxel_indices.col(i) = cells[static_cast<std::size_t>(i)];
  }
  if (pc.colors) {
    Colors3u8 c(3, m);
    for (Eigen::Index i = 0; i < m; ++i) c.col(i) = colors[static_cast<std::size_t>(i)];
    result.cloud.colors = std::move(c);
  }
  return result;
}

}  // namespace shm
