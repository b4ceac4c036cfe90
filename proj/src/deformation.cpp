#include "shm/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <unordered_map>

namespace shm {

void validate(const FeaModel& model) {
  if (model.nodes.empty()) throw Error(Errc::EmptyModel, "FEA model has no nodes");
  if (!(model.span_length_in > 0.0) || !std::isfinite(model.span_length_in))
    throw Error(Errc::MalformedModel, "span length must be positive");
  std::set<int> ids;
  for (const auto& n : model.nodes) {
    if (!ids.insert(n.id).second) throw Error(Errc::MalformedModel, "duplicate node id " + std::to_string(n.id));
    if (!n.position.allFinite()) throw Error(Errc::MalformedModel, "non-finite node position");
  }
  for (int id : model.midspan_nodes)
    if (!ids.count(id)) throw Error(Errc::MalformedModel, "midspan node " + std::to_string(id) + " is not a model node");
}

void validate(const DisplacementHistory& h) {
  if (!(h.dt > 0.0) || !std::isfinite(h.dt)) throw Error(Errc::MalformedHistory, "dt must be positive");
  if (!(h.duration >= 0.0)) throw Error(Errc::MalformedHistory, "duration must be non-negative");
  const auto expected = static_cast<Eigen::Index>(std::floor(h.duration / h.dt + 1e-9)) + 1;
  for (const auto& [id, series] : h.samples) {
    if (series.cols() != expected)
      throw Error(Errc::MalformedHistory, "node " + std::to_string(id) + " has " + std::to_string(series.cols()) +
                                              " samples, expected " + std::to_string(expected));
    if (!series.allFinite()) throw Error(Errc::MalformedHistory, "non-finite displacement");
  }
}

void validate(const PlaybackConfig& cfg) {
  if (!(cfg.scale >= 0.0) || !std::isfinite(cfg.scale))
    throw Error(Errc::InvalidConfigValue, "scale must be finite and non-negative");
  if (!(cfg.speed > 0.0) || !std::isfinite(cfg.speed))
    throw Error(Errc::InvalidConfigValue, "speed must be finite and positive");
}

BindingMap bind_points(const PointCloud& pc, const FeaModel& model) {
  if (pc.empty()) throw Error(Errc::EmptyCloud, "cannot bind an empty cloud");
  if (model.nodes.empty()) throw Error(Errc::EmptyModel, "cannot bind to a model without nodes");

  std::vector<FeaNode> nodes = model.nodes;
  std::sort(nodes.begin(), nodes.end(), [](const FeaNode& a, const FeaNode& b) { return a.id < b.id; });
  Eigen::Matrix3Xd positions(3, static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t j = 0; j < nodes.size(); ++j) positions.col(static_cast<Eigen::Index>(j)) = nodes[j].position;

  BindingMap out;
  out.node_of_point.resize(static_cast<std::size_t>(pc.size()));
  for (Eigen::Index i = 0; i < pc.size(); ++i) {
    const Eigen::RowVectorXd d2 = (positions.colwise() - pc.points.col(i)).colwise().squaredNorm();
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < d2.size(); ++j)
      if (d2[j] < d2[best]) best = j;
    out.node_of_point[static_cast<std::size_t>(i)] = nodes[static_cast<std::size_t>(best)].id;
  }
  return out;
}

Eigen::Vector3d sample_displacement(const DisplacementHistory& h, int node_id, double t) {
  const auto it = h.samples.find(node_id);
  if (it == h.samples.end()) throw Error(Errc::UnknownNode, "node " + std::to_string(node_id) + " not in history");
  const Eigen::Matrix3Xd& series = it->second;
  const Eigen::Index last = series.cols() - 1;
  const double end = static_cast<double>(last) * h.dt;
  if (!(t >= 0.0) || t > end * (1.0 + 1e-12) + 1e-15)
    throw Error(Errc::OutOfRange, "time " + std::to_string(t) + " outside [0, " + std::to_string(end) + "]");

  const double position = t / h.dt;
  const double nearest = std::round(position);
  if (std::abs(position - nearest) <= 1e-9) return series.col(std::min(static_cast<Eigen::Index>(nearest), last));
  const auto k = std::min(static_cast<Eigen::Index>(std::floor(position)), last - 1);
  const double w = position - static_cast<double>(k);
  return (1.0 - w) * series.col(k) + w * series.col(k + 1);
}

Eigen::Matrix3Xd displacement_field(const BindingMap& binding, const DisplacementHistory& h, double t,
                                    const PlaybackConfig& cfg) {
  validate(cfg);
  std::unordered_map<int, Eigen::Vector3d> per_node;
  const Eigen::Vector3d mask = cfg.mask();
  Eigen::Matrix3Xd out(3, static_cast<Eigen::Index>(binding.node_of_point.size()));
  for (std::size_t i = 0; i < binding.node_of_point.size(); ++i) {
    const int id = binding.node_of_point[i];
    auto it = per_node.find(id);
    if (it == per_node.end()) it = per_node.emplace(id, mask.cwiseProduct(sample_displacement(h, id, t))).first;
    out.col(static_cast<Eigen::Index>(i)) = cfg.scale * it->second;
  }
  return out;
}

Eigen::Matrix3Xd deformed_positions(const PointCloud& pc, const BindingMap& binding, const DisplacementHistory& h,
                                    double t, const PlaybackConfig& cfg) {
  if (static_cast<Eigen::Index>(binding.node_of_point.size()) != pc.size())
    throw Error(Errc::InvalidCloud, "binding does not cover the cloud");
  return pc.points + displacement_field(binding, h, t, cfg);
}

Colors3u8 color_by_displacement(const Eigen::Ref<const Eigen::VectorXd>& magnitudes, double limit) {
  if (!(limit > 0.0)) throw Error(Errc::NonPositiveLimit, "color limit must be positive");
  auto channel = [](double x) { return static_cast<std::uint8_t>(std::floor(255.0 * x + 0.5)); };
  Colors3u8 out(3, magnitudes.size());
  for (Eigen::Index i = 0; i < magnitudes.size(); ++i) {
    const double v = std::clamp(std::abs(magnitudes[i]) / limit, 0.0, 1.0);
    if (v <= 0.5) {
      const double s = v / 0.5;
      out.col(i) << 0, channel(s), channel(1.0 - s);
    } else {
      const double s = (v - 0.5) / 0.5;
      out.col(i) << channel(s), channel(1.0 - s), 0;
    }
  }
  return out;
}

namespace {

void check_node_sets(const DisplacementHistory& h, const FeaModel& model) {
  std::set<int> model_ids;
  for (const auto& n : model.nodes) model_ids.insert(n.id);
  std::set<int> history_ids;
  for (const auto& [id, series] : h.samples) history_ids.insert(id);
  if (model_ids != history_ids) throw Error(Errc::NodeSetMismatch, "history and model node ids differ");
}

}  // namespace

ServiceabilityReport check_serviceability(const DisplacementHistory& h, const FeaModel& model) {
  validate(model);
  validate(h);
  check_node_sets(h, model);
  const auto axis = static_cast<Eigen::Index>(model.vertical_axis);

  ServiceabilityReport report;
  report.limit_in = model.limit_in();
  for (const auto& [id, series] : h.samples) {
    Eigen::Index at = 0;
    double peak_m = 0.0;
    for (Eigen::Index k = 0; k < series.cols(); ++k) {
      if (std::abs(series(axis, k)) > peak_m) {
        peak_m = std::abs(series(axis, k));
        at = k;
      }
    }
    NodePeak peak{id, peak_m / kMetersPerInch, static_cast<double>(at) * h.dt, false};
    peak.violated = peak.peak_in > report.limit_in;
    if (peak.violated) report.violations.push_back(id);
    report.nodes.push_back(peak);
  }
  return report;
}

std::vector<TrackTrace> track_nodes(const DisplacementHistory& h, const std::vector<int>& node_ids,
                                    const FeaModel& model) {
  validate(h);
  const auto axis = static_cast<Eigen::Index>(model.vertical_axis);
  const double limit_in = model.limit_in();
  std::vector<TrackTrace> out;
  for (int id : node_ids) {
    const auto it = h.samples.find(id);
    if (it == h.samples.end()) throw Error(Errc::UnknownNode, "node " + std::to_string(id) + " not in history");
    TrackTrace trace;
    trace.node_id = id;
    const Eigen::Index n = it->second.cols();
    trace.times = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) * h.dt;
    trace.vertical = it->second.row(axis).transpose();
    std::optional<Eigen::Index> run_start;
    for (Eigen::Index k = 0; k <= n; ++k) {
      const bool over = k < n && std::abs(trace.vertical[k]) / kMetersPerInch > limit_in;
      if (over && !run_start) run_start = k;
      if (!over && run_start) {
        trace.warnings.push_back({trace.times[*run_start], trace.times[k - 1]});
        run_start.reset();
      }
    }
    out.push_back(std::move(trace));
  }
  return out;
}

std::string export_frame(const PointCloud& pc, const BindingMap& binding, const DisplacementHistory& h,
                         const FeaModel& model, double t, const PlaybackConfig& cfg) {
  const Eigen::Matrix3Xd positions = deformed_positions(pc, binding, h, t, cfg);
  PlaybackConfig unscaled = cfg;
  unscaled.scale = 1.0;
  const Eigen::VectorXd magnitude = displacement_field(binding, h, t, unscaled).colwise().norm().transpose();
  const Colors3u8 colors = color_by_displacement(magnitude, model.limit_m());

  std::string out = "index,x,y,z,red,green,blue\n";
  char line[160];
  for (Eigen::Index i = 0; i < positions.cols(); ++i) {
    std::snprintf(line, sizeof line, "%ld,%.9g,%.9g,%.9g,%u,%u,%u\n", static_cast<long>(i), positions(0, i),
                  positions(1, i), positions(2, i), static_cast<unsigned>(colors(0, i)),
                  static_cast<unsigned>(colors(1, i)), static_cast<unsigned>(colors(2, i)));
    out += line;
  }
  return out;
}

}  // namespace shm
