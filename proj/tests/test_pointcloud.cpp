#include <doctest.h>

#include <random>

#include <Eigen/Geometry>

#include "shm/pointcloud.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using shm::Errc;
using shm::PointCloud;

namespace {

PointCloud cloud_of(std::initializer_list<Eigen::Vector3d> pts) {
  PointCloud pc;
  pc.points.resize(3, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index i = 0;
  for (const auto& p : pts) pc.points.col(i++) = p;
  return pc;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const shm::Error& e) {
    return e.code();
  }
  FAIL("expected shm::Error");
  return Errc::Io;
}

shm::RigidTransformd random_rigid(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  shm::RigidTransformd t;
  t.rotation = q.toRotationMatrix();
  t.translation = Eigen::Vector3d(n(rng), n(rng), n(rng)) * 10.0;
  return t;
}

}  // namespace

TEST_CASE("bounding box") {
  const PointCloud single = cloud_of({{1, -2, 3}});
  const auto box = shm::bounding_box(single);
  CHECK(box.min == Eigen::Vector3d(1, -2, 3));
  CHECK(box.max == Eigen::Vector3d(1, -2, 3));

  PointCloud cube = cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}});
  CHECK(shm::bounding_box(cube).min == Eigen::Vector3d::Zero());
  CHECK(shm::bounding_box(cube).max == Eigen::Vector3d::Ones());

  const PointCloud random = fixture::box_cloud(3, 500, {4, 5, 6}, false);
  Eigen::Vector3d lo = random.points.col(0), hi = lo;
  for (Eigen::Index i = 0; i < random.size(); ++i)
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], random.points(d, i));
      hi[d] = std::max(hi[d], random.points(d, i));
    }
  CHECK(shm::bounding_box(random).min == lo);
  CHECK(shm::bounding_box(random).max == hi);

  CHECK(code_of([] { shm::bounding_box(PointCloud{}); }) == Errc::EmptyCloud);
}

TEST_CASE("voxel downsample examples") {
  const PointCloud one = cloud_of({{0.3, 0.7, -1.1}});
  for (double size : {1e-6, 0.5, 100.0}) CHECK(shm::voxel_downsample(one, size).points == one.points);

  PointCloud cube = cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}});
  const PointCloud out = shm::voxel_downsample(cube, 2.0);
  REQUIRE(out.size() == 1);
  CHECK(out.points.col(0) == Eigen::Vector3d(0.5, 0.5, 0.5));

  CHECK(code_of([&] { shm::voxel_downsample(cube, 0.0); }) == Errc::NonPositiveVoxelSize);
  CHECK(code_of([&] { shm::voxel_downsample(cube, -1.0); }) == Errc::NonPositiveVoxelSize);
}

TEST_CASE("voxel downsample matches brute-force grouping") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const bool colors = seed % 2 == 1;
    const PointCloud pc = fixture::box_cloud(seed, 1000, {1, 1, 1}, colors);
    for (double size : {0.5, 0.13, 0.05}) {
      const auto got = shm::voxel_downsample_with_grid(pc, size);
      const auto want = oracle::voxel_grid(pc, size);
      REQUIRE(got.cloud.size() == static_cast<Eigen::Index>(want.keys.size()));
      if (size == 0.5) CHECK(got.cloud.size() <= 8);
      for (Eigen::Index i = 0; i < got.cloud.size(); ++i) {
        for (int d = 0; d < 3; ++d) CHECK(got.voxel_indices(d, i) == want.keys[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)]);
        CHECK((got.cloud.points.col(i) - want.centroids.col(i)).cwiseAbs().maxCoeff() <= 1e-12);
        if (colors)
          for (int d = 0; d < 3; ++d) CHECK(int((*got.cloud.colors)(d, i)) == want.colors[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)]);
      }
      CHECK(got.cloud.colors.has_value() == colors);
    }
  }
}

TEST_CASE("voxel boundary points go to the higher voxel") {
  const PointCloud pc = cloud_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  const auto out = shm::voxel_downsample_with_grid(pc, 1.0);
  REQUIRE(out.cloud.size() == 3);
  CHECK(out.voxel_indices(0, 1) == 1);
  CHECK(out.voxel_indices(0, 2) == 2);
}

TEST_CASE("color means round half up") {
  PointCloud pc = cloud_of({{0, 0, 0}, {0.1, 0, 0}});
  shm::Colors3u8 c(3, 2);
  c << 0, 1, 10, 11, 254, 255;
  pc.colors = c;
  const PointCloud out = shm::voxel_downsample(pc, 1.0);
  REQUIRE(out.colors);
  CHECK(int((*out.colors)(0, 0)) == 1);    // 0.5 -> 1
  CHECK(int((*out.colors)(1, 0)) == 11);   // 10.5 -> 11
  CHECK(int((*out.colors)(2, 0)) == 255);  // 254.5 -> 255
}

TEST_CASE("voxel downsample properties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> count(1, 400);
    std::uniform_real_distribution<double> size_dist(0.01, 0.7);
    const PointCloud pc = fixture::box_cloud(rng(), count(rng), {1.0, 2.0, 0.5}, trial % 2 == 0);
    const double size = size_dist(rng);
    const auto out = shm::voxel_downsample_with_grid(pc, size);

    CHECK(out.cloud.size() <= pc.size());
    for (Eigen::Index i = 1; i < out.cloud.size(); ++i) {
      const Eigen::Matrix<std::int64_t, 3, 1> a = out.voxel_indices.col(i - 1), b = out.voxel_indices.col(i);
      CHECK(std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3));
    }
    for (Eigen::Index i = 0; i < out.cloud.size(); ++i) {
      const Eigen::Vector3d lo = out.anchor + out.voxel_indices.col(i).cast<double>() * size;
      const Eigen::Vector3d p = out.cloud.points.col(i);
      CHECK((p.array() >= lo.array() - 1e-12).all());
      CHECK((p.array() <= lo.array() + size + 1e-12).all());
    }

    // Idempotent at a fixed anchor.
    const auto again = shm::voxel_downsample_with_grid(out.cloud, size, out.anchor);
    CHECK(again.cloud.points == out.cloud.points);
    CHECK(again.voxel_indices == out.voxel_indices);
    if (out.cloud.colors) CHECK(*again.cloud.colors == *out.cloud.colors);
  }
}

TEST_CASE("rigid transforms") {
  const PointCloud origin = cloud_of({{0, 0, 0}});
  shm::RigidTransformd shift;
  shift.translation = {1, 2, 3};
  CHECK(shm::apply_transform(origin, shift).points.col(0) == Eigen::Vector3d(1, 2, 3));

  const PointCloud pc = fixture::box_cloud(5, 60, {3, 3, 3}, true);
  const PointCloud same = shm::apply_transform(pc, shm::RigidTransformd::identity());
  CHECK(same.points == pc.points);
  CHECK(*same.colors == *pc.colors);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_rigid(rng);
    const PointCloud moved = shm::apply_transform(pc, t);
    CHECK(*moved.colors == *pc.colors);
    for (Eigen::Index i = 0; i < pc.size(); ++i)
      for (Eigen::Index j = i + 1; j < pc.size(); ++j) {
        const double before = (pc.points.col(i) - pc.points.col(j)).norm();
        const double after = (moved.points.col(i) - moved.points.col(j)).norm();
        CHECK(std::abs(after - before) <= 1e-9 * before);
      }
    const PointCloud back = shm::apply_transform(moved, t.inverse());
    CHECK((back.points - pc.points).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(((t.inverse() * t).rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  shm::RigidTransformd bad;
  bad.rotation(0, 0) = 2.0;
  CHECK(code_of([&] { shm::apply_transform(pc, bad); }) == Errc::NonOrthonormalRotation);
  shm::RigidTransformd mirror;
  mirror.rotation(2, 2) = -1.0;  // orthonormal but improper
  CHECK(code_of([&] { shm::apply_transform(pc, mirror); }) == Errc::NonOrthonormalRotation);
}

TEST_CASE("transforms are templated on the scalar") {
  shm::RigidTransform<float> t;
  t.translation = {1.f, 0.f, 0.f};
  Eigen::Matrix3Xf pts = Eigen::Matrix3Xf::Zero(3, 2);
  const Eigen::Matrix3Xf moved = shm::apply_transform(pts, t);
  CHECK(moved(0, 1) == 1.f);
  const auto box = shm::bounding_box(moved);
  CHECK(box.max.x() == 1.f);
}

TEST_CASE("cloud validation") {
  PointCloud pc = cloud_of({{0, 0, 0}});
  pc.colors = shm::Colors3u8::Zero(3, 2);
  CHECK(code_of([&] { shm::validate(pc); }) == Errc::InvalidCloud);
  PointCloud nan = cloud_of({{0, std::nan(""), 0}});
  CHECK(code_of([&] { shm::validate(nan); }) == Errc::InvalidCloud);
}
