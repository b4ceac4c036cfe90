#include "shm/deformation_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shm/io.hpp"

namespace shm {
namespace {

[[noreturn]] void bad_model(const std::string& what) { throw Error(Errc::MalformedModel, "FEA model: " + what); }
[[noreturn]] void bad_history(const std::string& what) { throw Error(Errc::MalformedHistory, "history CSV: " + what); }

std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "z";
}

int as_int(const nlohmann::json& v, const char* what) {
  if (!v.is_number_integer()) bad_model(std::string(what) + " must be an integer");
  return v.get<int>();
}

double as_number(const nlohmann::json& v, const char* what) {
  if (!v.is_number()) bad_model(std::string(what) + " must be a number");
  return v.get<double>();
}

}  // namespace

FeaModel parse_fea_model(std::string_view text) {
  const nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) bad_model("not a JSON object");

  FeaModel model;
  if (!doc.contains("span_length_in")) bad_model("missing span_length_in");
  model.span_length_in = as_number(doc["span_length_in"], "span_length_in");

  const std::string axis = doc.value("vertical_axis", std::string("z"));
  if (axis == "x") model.vertical_axis = Axis::X;
  else if (axis == "y") model.vertical_axis = Axis::Y;
  else if (axis == "z") model.vertical_axis = Axis::Z;
  else bad_model("vertical_axis must be x, y or z");

  if (doc.contains("midspan_nodes")) {
    if (!doc["midspan_nodes"].is_array()) bad_model("midspan_nodes must be an array");
    for (const auto& v : doc["midspan_nodes"]) model.midspan_nodes.push_back(as_int(v, "midspan node"));
  }
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) bad_model("missing nodes array");
  for (const auto& n : doc["nodes"]) {
    if (!n.is_object() || !n.contains("id") || !n.contains("x") || !n.contains("y") || !n.contains("z"))
      bad_model("node needs id, x, y, z");
    model.nodes.push_back({as_int(n["id"], "id"),
                           {as_number(n["x"], "x"), as_number(n["y"], "y"), as_number(n["z"], "z")}});
  }
  validate(model);
  return model;
}

std::string dump_fea_model(const FeaModel& model) {
  nlohmann::ordered_json j;
  j["span_length_in"] = model.span_length_in;
  j["vertical_axis"] = std::string(axis_name(model.vertical_axis));
  j["midspan_nodes"] = model.midspan_nodes;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : model.nodes)
    nodes.push_back({{"id", n.id}, {"x", n.position.x()}, {"y", n.position.y()}, {"z", n.position.z()}});
  j["nodes"] = std::move(nodes);
  return j.dump(2) + "\n";
}

DisplacementHistory parse_history_csv(std::string_view text) {
  const auto lines = text_lines(text);
  if (lines.empty()) bad_history("empty document");
  const auto header = split_csv_line(lines[0]);
  if (header.size() != 5 || header[0] != "time" || header[1] != "node_id" || header[2] != "ux" ||
      header[3] != "uy" || header[4] != "uz")
    bad_history("header must be time,node_id,ux,uy,uz");

  struct Row {
    double t;
    int node;
    Eigen::Vector3d u;
  };
  std::vector<Row> rows;
  rows.reserve(lines.size() - 1);
  std::set<double> times;
  std::set<int> nodes;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 5) bad_history("row " + std::to_string(i) + " needs 5 fields");
    Row r{};
    long long id = 0;
    if (!parse_number(f[0], r.t) || !parse_number(f[1], id) || !parse_number(f[2], r.u.x()) ||
        !parse_number(f[3], r.u.y()) || !parse_number(f[4], r.u.z()))
      bad_history("bad value on row " + std::to_string(i));
    if (!r.u.allFinite() || !std::isfinite(r.t)) bad_history("non-finite value on row " + std::to_string(i));
    r.node = static_cast<int>(id);
    times.insert(r.t);
    nodes.insert(r.node);
    rows.push_back(r);
  }
  if (rows.empty()) bad_history("no samples");

  const std::vector<double> t(times.begin(), times.end());
  if (rows.size() != t.size() * nodes.size()) bad_history("every node must appear exactly once at every time step");

  DisplacementHistory h;
  h.dt = t.size() > 1 ? (t.back() - t.front()) / static_cast<double>(t.size() - 1) : 1.0;
  if (std::abs(t.front()) > 1e-6 * h.dt) bad_history("time must start at 0");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs((t[k] - t[k - 1]) - h.dt) > 1e-6 * h.dt) bad_history("non-uniform time step");
  h.duration = static_cast<double>(t.size() - 1) * h.dt;

  const auto steps = static_cast<Eigen::Index>(t.size());
  for (int id : nodes) h.samples.emplace(id, Eigen::Matrix3Xd::Constant(3, steps, std::nan("")));
  for (const auto& r : rows) {
    const auto k = static_cast<Eigen::Index>(std::lower_bound(t.begin(), t.end(), r.t) - t.begin());
    auto col = h.samples.at(r.node).col(k);
    if (!std::isnan(col.x())) bad_history("duplicate sample for node " + std::to_string(r.node));
    col = r.u;
  }
  validate(h);
  return h;
}

std::string history_to_csv(const DisplacementHistory& h) {
  validate(h);
  std::string out = "time,node_id,ux,uy,uz\n";
  for (Eigen::Index k = 0; k < h.sample_count(); ++k) {
    const std::string t = format_double(static_cast<double>(k) * h.dt);
    for (const auto& [id, series] : h.samples) {
      out += t + "," + std::to_string(id) + "," + format_double(series(0, k)) + "," + format_double(series(1, k)) +
             "," + format_double(series(2, k)) + "\n";
    }
  }
  return out;
}

nlohmann::ordered_json serviceability_to_json(const ServiceabilityReport& report, const FeaModel& model,
                                              const std::vector<TrackTrace>& tracks, int digits) {
  nlohmann::ordered_json j;
  j["span_length_in"] = round_significant(model.span_length_in, digits);
  j["limit_in"] = round_significant(report.limit_in, digits);
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : report.nodes) {
    nodes.push_back({{"node_id", n.node_id},
                     {"peak_in", round_significant(n.peak_in, digits)},
                     {"time_of_peak_s", round_significant(n.time_of_peak, digits)},
                     {"violated", n.violated}});
  }
  j["nodes"] = std::move(nodes);
  j["violations"] = report.violations;
  auto tracked = nlohmann::ordered_json::array();
  for (const auto& tr : tracks) {
    auto warnings = nlohmann::ordered_json::array();
    for (const auto& w : tr.warnings)
      warnings.push_back({round_significant(w.t_enter, digits), round_significant(w.t_exit, digits)});
    tracked.push_back({{"node_id", tr.node_id}, {"warnings", std::move(warnings)}});
  }
  j["tracked"] = std::move(tracked);
  return j;
}

nlohmann::ordered_json binding_to_json(const BindingMap& binding) {
  nlohmann::ordered_json j;
  j["points"] = binding.node_of_point.size();
  j["node_of_point"] = binding.node_of_point;
  return j;
}

}  // namespace shm
