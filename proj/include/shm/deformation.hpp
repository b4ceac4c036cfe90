#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shm/pointcloud.hpp"

namespace shm {

inline constexpr double kMetersPerInch = 0.0254;

enum class Axis { X = 0, Y = 1, Z = 2 };

struct FeaNode {
  int id = 0;
  Eigen::Vector3d position;  // meters
};

/// FEA node geometry plus the span used for the L/1000 deflection limit.
struct FeaModel {
  std::vector<FeaNode> nodes;
  double span_length_in = 0.0;
  Axis vertical_axis = Axis::Z;
  std::vector<int> midspan_nodes;

  // Derived from the span, never stored.
  double limit_in() const noexcept { return span_length_in / 1000.0; }
  double limit_m() const noexcept { return limit_in() * kMetersPerInch; }
};

void validate(const FeaModel& model);

/// Per-node displacement time series in meters, sampled at t = k * dt.
struct DisplacementHistory {
  double dt = 0.0;
  double duration = 0.0;
  std::map<int, Eigen::Matrix3Xd> samples;

  Eigen::Index sample_count() const noexcept {
    return samples.empty() ? 0 : samples.begin()->second.cols();
  }
};

void validate(const DisplacementHistory& h);

struct BindingMap {
  std::vector<int> node_of_point;
};

/// Visual playback settings. The serviceability verdict never depends on them.
struct PlaybackConfig {
  double scale = 1.0;
  double speed = 1.0;
  std::array<bool, 3> axis_mask{true, true, true};

  Eigen::Vector3d mask() const {
    return {axis_mask[0] ? 1.0 : 0.0, axis_mask[1] ? 1.0 : 0.0, axis_mask[2] ? 1.0 : 0.0};
  }
  bool operator==(const PlaybackConfig&) const = default;
};

void validate(const PlaybackConfig& cfg);

// Each point goes to its nearest node; exact ties go to the lowest node id.
BindingMap bind_points(const PointCloud& pc, const FeaModel& model);

// Linear interpolation between bracketing samples; exact at t = k * dt.
Eigen::Vector3d sample_displacement(const DisplacementHistory& h, int node_id, double t);

/// s * (m ⊙ u_node(i)(t)) per point, i.e. the offset added to the base cloud.
Eigen::Matrix3Xd displacement_field(const BindingMap& binding, const DisplacementHistory& h, double t,
                                    const PlaybackConfig& cfg);

Eigen::Matrix3Xd deformed_positions(const PointCloud& pc, const BindingMap& binding, const DisplacementHistory& h,
                                    double t, const PlaybackConfig& cfg);

/// Blue (0) -> green (limit/2) -> red (limit and above), rounded half-up.
Colors3u8 color_by_displacement(const Eigen::Ref<const Eigen::VectorXd>& magnitudes, double limit);

struct NodePeak {
  int node_id = 0;
  double peak_in = 0.0;
  double time_of_peak = 0.0;
  bool violated = false;
};

struct ServiceabilityReport {
  double limit_in = 0.0;
  std::vector<NodePeak> nodes;  // ascending node id
  std::vector<int> violations;
};

/// Peak |vertical displacement| per node against span/1000, in inches.
ServiceabilityReport check_serviceability(const DisplacementHistory& h, const FeaModel& model);

struct WarningInterval {
  double t_enter = 0.0;
  double t_exit = 0.0;
};

struct TrackTrace {
  int node_id = 0;
  Eigen::VectorXd times;
  Eigen::VectorXd vertical;  // meters
  std::vector<WarningInterval> warnings;
};

// Warning intervals are runs of samples with |vertical| above the limit, at
// sample resolution.
std::vector<TrackTrace> track_nodes(const DisplacementHistory& h, const std::vector<int>& node_ids,
                                    const FeaModel& model);

/// One CSV row per point: index, deformed x/y/z and color, 9 significant
/// digits. Colors follow the unscaled masked displacement magnitude.
std::string export_frame(const PointCloud& pc, const BindingMap& binding, const DisplacementHistory& h,
                         const FeaModel& model, double t, const PlaybackConfig& cfg);

}  // namespace shm
