#pragma once

// Independent reference computations for the tests. These are deliberately
// naive: plain loops, no shared code with the library beyond its types.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "shm/deformation.hpp"
#include "shm/pointcloud.hpp"

namespace oracle {

// Block Toeplitz of output correlations built entry by entry.
Eigen::MatrixXd toeplitz(const Eigen::MatrixXd& y, int p);

using VoxelKey = std::array<std::int64_t, 3>;

struct VoxelResult {
  std::vector<VoxelKey> keys;  // sorted
  Eigen::Matrix3Xd centroids;
  std::vector<std::array<int, 3>> colors;  // empty when the cloud has none
};

// Groups by floor((p - min) / size) in a std::map, sums members in file order.
VoxelResult voxel_grid(const shm::PointCloud& pc, double size);

// Id of the closest node by exhaustive search; ties to the lowest id.
int nearest_node(const Eigen::Vector3d& p, const std::vector<shm::FeaNode>& nodes);

// Maximum total MAC over all one-to-one assignments (rows <= cols).
double best_assignment_total(const Eigen::MatrixXd& mac);

// |a^H b|^2 / (|a|^2 |b|^2) written out with explicit sums.
double mac(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// Undamped natural frequencies (Hz, ascending) and mass-normalized shapes
// from the characteristic equation det(K - w^2 M) = 0 via a generalized
// symmetric eigenproblem.
struct NormalModes {
  Eigen::VectorXd frequency_hz;
  Eigen::MatrixXd shapes;  // columns
};
NormalModes normal_modes(const Eigen::MatrixXd& M, const Eigen::MatrixXd& K);

// Closed-form free response of m x'' + c x' + k x = 0 (underdamped).
struct Sdof {
  double wn;
  double zeta;
  double x0;
  double v0;
  double displacement(double t) const;
  double acceleration(double t) const;
  double damped_period() const;
};

// Ids of nodes whose |vertical| exceeds span/1000 inches at any sample.
std::vector<int> threshold_violations(const shm::DisplacementHistory& h, double span_in, int axis);

}  // namespace oracle
