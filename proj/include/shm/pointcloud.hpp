#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "shm/error.hpp"

namespace shm {

using Points3d = Eigen::Matrix3Xd;
using Colors3u8 = Eigen::Matrix<std::uint8_t, 3, Eigen::Dynamic>;

// Width of the coordinate properties a cloud was read from. Saving re-emits it.
enum class CoordinatePrecision { Float32, Float64 };

/// A captured asset as a point set in meters, one column per point.
struct PointCloud {
  Points3d points;
  std::optional<Colors3u8> colors;
  std::string name;
  CoordinatePrecision precision = CoordinatePrecision::Float64;

  Eigen::Index size() const noexcept { return points.cols(); }
  bool empty() const noexcept { return points.cols() == 0; }
};

/// Throws InvalidCloud when colors and points disagree in length or a
/// coordinate is not finite.
void validate(const PointCloud& pc);

template <typename Scalar>
struct Aabb {
  Eigen::Matrix<Scalar, 3, 1> min;
  Eigen::Matrix<Scalar, 3, 1> max;

  Eigen::Matrix<Scalar, 3, 1> extent() const { return max - min; }
  bool contains(const Eigen::Matrix<Scalar, 3, 1>& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};
using Aabbd = Aabb<double>;

/// Componentwise min/max over a non-empty point matrix.
template <typename Derived>
Aabb<typename Derived::Scalar> bounding_box(const Eigen::MatrixBase<Derived>& points) {
  static_assert(Derived::RowsAtCompileTime == 3, "points must be 3xN");
  if (points.cols() == 0) throw Error(Errc::EmptyCloud, "bounding box of an empty cloud");
  return {points.rowwise().minCoeff(), points.rowwise().maxCoeff()};
}

inline Aabbd bounding_box(const PointCloud& pc) { return bounding_box(pc.points); }

template <typename Scalar>
struct RigidTransform {
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

  Matrix3 rotation = Matrix3::Identity();
  Vector3 translation = Vector3::Zero();

  static RigidTransform identity() { return {}; }

  // RᵀR = I and det R = +1, both to 1e-9.
  bool is_valid(Scalar tol = Scalar(1e-9)) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    const Scalar ortho = (rotation.transpose() * rotation - Matrix3::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(rotation.determinant() - Scalar(1)) <= tol;
  }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  // (this * other)(p) = this(other(p))
  RigidTransform operator*(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
  }
};
using RigidTransformd = RigidTransform<double>;

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, Eigen::Dynamic> apply_transform(
    const Eigen::MatrixBase<Derived>& points, const RigidTransform<typename Derived::Scalar>& t) {
  static_assert(Derived::RowsAtCompileTime == 3, "points must be 3xN");
  if (!t.is_valid()) throw Error(Errc::NonOrthonormalRotation, "rotation is not a proper orthonormal matrix");
  return (t.rotation * points).colwise() + t.translation;
}

PointCloud apply_transform(const PointCloud& pc, const RigidTransformd& t);

/// Result of a voxel reduction; `anchor` is the grid origin actually used.
struct VoxelDownsample {
  PointCloud cloud;
  Eigen::Vector3d anchor;
  Eigen::Matrix<std::int64_t, 3, Eigen::Dynamic> voxel_indices;
};

// floor((p - anchor) / size) per axis.
Eigen::Matrix<std::int64_t, 3, 1> voxel_index(const Eigen::Vector3d& p, const Eigen::Vector3d& anchor,
                                              double voxel_size);

/// Replaces the points of every occupied cubic voxel by their centroid.
///
/// The grid is anchored at the cloud's AABB minimum unless `anchor` is given.
/// Output is ordered by ascending (ix, iy, iz); colors, when present, are the
/// per-voxel mean rounded half-up.
VoxelDownsample voxel_downsample_with_grid(const PointCloud& pc, double voxel_size,
                                           std::optional<Eigen::Vector3d> anchor = std::nullopt);

inline PointCloud voxel_downsample(const PointCloud& pc, double voxel_size) {
  return voxel_downsample_with_grid(pc, voxel_size).cloud;
}

}  // namespace shm
