#include "shm/modal_io.hpp"

#include <algorithm>
#include <cmath>

#include "shm/io.hpp"

namespace shm {
namespace {

[[noreturn]] void bad_record(const std::string& what) { throw Error(Errc::MalformedRecord, "record CSV: " + what); }
[[noreturn]] void bad_modal(const std::string& what) { throw Error(Errc::MalformedModalSet, "modal set: " + what); }

nlohmann::ordered_json mode_to_json(const Mode& m, int digits) {
  nlohmann::ordered_json j;
  j["frequency_hz"] = round_significant(m.frequency, digits);
  j["damping_ratio"] = round_significant(m.damping, digits);
  auto re = nlohmann::ordered_json::array();
  auto im = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.shape.size(); ++i) {
    re.push_back(round_significant(m.shape[i].real(), digits));
    im.push_back(round_significant(m.shape[i].imag(), digits));
  }
  j["shape_re"] = std::move(re);
  j["shape_im"] = std::move(im);
  return j;
}

}  // namespace

VibrationRecord parse_record_csv(std::string_view text) {
  const auto lines = text_lines(text);
  if (lines.empty()) bad_record("empty document");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "time") bad_record("header must be time,<label>,...");

  VibrationRecord rec;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty()) bad_record("empty channel label");
    rec.channel_labels.emplace_back(header[i]);
  }
  const auto channels = static_cast<Eigen::Index>(header.size() - 1);
  const auto samples = static_cast<Eigen::Index>(lines.size() - 1);
  if (samples < 2) bad_record("need at least two samples");

  std::vector<double> times(static_cast<std::size_t>(samples));
  rec.data.resize(channels, samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const auto fields = split_csv_line(lines[static_cast<std::size_t>(k + 1)]);
    if (static_cast<Eigen::Index>(fields.size()) != channels + 1)
      bad_record("row " + std::to_string(k + 1) + " has the wrong number of fields");
    if (!parse_number(fields[0], times[static_cast<std::size_t>(k)]))
      bad_record("bad time on row " + std::to_string(k + 1));
    for (Eigen::Index c = 0; c < channels; ++c) {
      double v = 0.0;
      if (!parse_number(fields[static_cast<std::size_t>(c + 1)], v) || !std::isfinite(v))
        bad_record("bad sample on row " + std::to_string(k + 1));
      rec.data(c, k) = v;
    }
  }

  rec.dt = (times.back() - times.front()) / static_cast<double>(samples - 1);
  if (!(rec.dt > 0.0)) bad_record("time must be strictly increasing");
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double step = times[k] - times[k - 1];
    if (!(step > 0.0)) bad_record("time must be strictly increasing");
    if (std::abs(step - rec.dt) > 1e-6 * rec.dt) bad_record("non-uniform sample spacing at row " + std::to_string(k + 1));
  }
  return rec;
}

std::string record_to_csv(const VibrationRecord& rec) {
  validate(rec);
  std::string out = "time";
  for (Eigen::Index c = 0; c < rec.channels(); ++c)
    out += "," + (rec.channel_labels.empty() ? "ch" + std::to_string(c + 1)
                                              : rec.channel_labels[static_cast<std::size_t>(c)]);
  out += '\n';
  for (Eigen::Index k = 0; k < rec.samples(); ++k) {
    out += format_double(static_cast<double>(k) * rec.dt);
    for (Eigen::Index c = 0; c < rec.channels(); ++c) out += "," + format_double(rec.data(c, k));
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json modal_set_to_json(const ModalSet& set, int digits) {
  nlohmann::ordered_json j;
  j["source"] = std::string(to_string(set.source));
  auto modes = nlohmann::ordered_json::array();
  for (const auto& m : set.modes) modes.push_back(mode_to_json(m, digits));
  j["modes"] = std::move(modes);
  return j;
}

ModalSet modal_set_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) bad_modal("document must be an object");
  ModalSet set;
  const auto source = doc.find("source");
  if (source == doc.end() || !source->is_string()) bad_modal("missing source");
  if (*source == "oma") set.source = ModalSource::Oma;
  else if (*source == "fea") set.source = ModalSource::Fea;
  else bad_modal("source must be oma or fea");

  const auto modes = doc.find("modes");
  if (modes == doc.end() || !modes->is_array()) bad_modal("missing modes array");
  for (const auto& m : *modes) {
    if (!m.is_object()) bad_modal("mode must be an object");
    auto number = [&](const char* key) {
      const auto it = m.find(key);
      if (it == m.end() || !it->is_number()) bad_modal(std::string("mode lacks numeric ") + key);
      return it->get<double>();
    };
    auto array = [&](const char* key) {
      const auto it = m.find(key);
      if (it == m.end() || !it->is_array()) bad_modal(std::string("mode lacks array ") + key);
      std::vector<double> out;
      for (const auto& v : *it) {
        if (!v.is_number()) bad_modal(std::string("non-numeric entry in ") + key);
        out.push_back(v.get<double>());
      }
      return out;
    };
    Mode mode;
    mode.frequency = number("frequency_hz");
    mode.damping = number("damping_ratio");
    const auto re = array("shape_re");
    const auto im = array("shape_im");
    if (re.size() != im.size() || re.empty()) bad_modal("shape_re and shape_im must be non-empty and equal length");
    if (!(mode.frequency > 0.0)) bad_modal("frequency_hz must be positive");
    mode.shape.resize(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) mode.shape[static_cast<Eigen::Index>(i)] = {re[i], im[i]};
    if (mode.shape.norm() == 0.0) bad_modal("zero mode shape");
    set.modes.push_back(std::move(mode));
  }
  std::stable_sort(set.modes.begin(), set.modes.end(),
                   [](const Mode& a, const Mode& b) { return a.frequency < b.frequency; });
  return set;
}

std::string dump_modal_set(const ModalSet& set, int digits) { return modal_set_to_json(set, digits).dump(2) + "\n"; }

ModalSet parse_modal_set(std::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) bad_modal("not valid JSON");
  return modal_set_from_json(doc);
}

nlohmann::ordered_json stabilization_to_json(const StabilizationDiagram& diagram, int digits) {
  nlohmann::ordered_json j;
  j["block_rows"] = diagram.block_rows;
  j["tolerances"] = {{"freq_rel", diagram.tolerances.freq_rel},
                     {"damping_rel", diagram.tolerances.damping_rel},
                     {"mac_min", diagram.tolerances.mac_min}};
  auto orders = nlohmann::ordered_json::array();
  for (const auto& o : diagram.orders) {
    nlohmann::ordered_json entry;
    entry["order"] = o.order;
    entry["error"] = o.error ? nlohmann::ordered_json(std::string(to_string(*o.error))) : nlohmann::ordered_json();
    auto poles = nlohmann::ordered_json::array();
    for (const auto& p : o.poles) {
      auto pj = mode_to_json(p.mode, digits);
      pj["stable"] = p.stable;
      poles.push_back(std::move(pj));
    }
    entry["poles"] = std::move(poles);
    orders.push_back(std::move(entry));
  }
  j["orders"] = std::move(orders);
  return j;
}

nlohmann::ordered_json match_report_to_json(const ModeMatchReport& report, int digits) {
  nlohmann::ordered_json j;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"oma_index", p.oma_index},
                     {"fea_index", p.fea_index},
                     {"oma_frequency_hz", round_significant(p.oma.frequency, digits)},
                     {"fea_frequency_hz", round_significant(p.fea.frequency, digits)},
                     {"oma_damping_ratio", round_significant(p.oma.damping, digits)},
                     {"fea_damping_ratio", round_significant(p.fea.damping, digits)},
                     {"mac", round_significant(p.mac, digits)},
                     {"freq_diff_rel", round_significant(p.freq_diff_rel, digits)}});
  }
  j["pairs"] = std::move(pairs);
  j["unmatched_oma"] = report.unmatched_oma;
  j["unmatched_fea"] = report.unmatched_fea;
  return j;
}

}  // namespace shm
