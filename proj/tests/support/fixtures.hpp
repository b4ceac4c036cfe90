#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "shm/deformation.hpp"
#include "shm/pointcloud.hpp"
#include "shm/simulate.hpp"
#include "shm/ssi.hpp"

namespace fixture {

// Three-storey shear chain, 1 kg masses, 5 % modal damping.
// Natural frequencies are about 8.06, 20.13 and 30.79 Hz.
struct ThreeDof {
  static constexpr double kDt = 0.01;
  static constexpr double kDuration = 112.0;
  static constexpr double kDamping = 0.05;
  static constexpr int kSubsteps = 20;
  static constexpr Eigen::Index kBlockRows = 15;
  static constexpr Eigen::Index kOrder = 6;

  shm::MdofSystem system;
  shm::VibrationRecord record;
};

shm::MdofSystem three_dof_system();
ThreeDof three_dof(std::uint64_t seed = 1);

// Unit-mass oscillator with the given natural frequency and damping ratio.
shm::MdofSystem sdof_system(double freq_hz, double zeta);

// Simply supported line of nodes over a 128 in span. Every node follows a
// half-sine envelope peaking at 0.100 in; the midspan nodes are amplified to
// 0.130 in against the 0.128 in limit.
struct Serviceability {
  static constexpr double kSpanIn = 128.0;
  shm::FeaModel model;
  shm::DisplacementHistory history;
  std::vector<int> amplified;
};
Serviceability serviceability(bool amplify = true);

// All-zero history on the same model.
shm::DisplacementHistory zero_history(const shm::FeaModel& model, double dt, double duration);

// Random cloud for round-trip style properties. Float32 clouds hold values
// representable in single precision.
shm::PointCloud random_cloud(std::mt19937_64& rng, Eigen::Index n, bool colors, shm::CoordinatePrecision precision);

// Uniform cloud in a box.
shm::PointCloud box_cloud(std::uint64_t seed, Eigen::Index n, const Eigen::Vector3d& size, bool colors);

}  // namespace fixture
