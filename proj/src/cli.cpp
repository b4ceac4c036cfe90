#include "shm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shm/deformation_io.hpp"
#include "shm/io.hpp"
#include "shm/modal_io.hpp"
#include "shm/ply.hpp"
#include "shm/session/server.hpp"
#include "shm/simulate.hpp"

namespace shm::cli {
namespace {

using nlohmann::json;

// "a:b" or "a:b:step" (inclusive), or a comma list.
std::vector<long> parse_orders(const std::string& text) {
  std::vector<long> out;
  auto number = [&](std::string_view s) {
    long v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || v <= 0)
      throw UsageError("--orders: '" + std::string(s) + "' is not a positive integer");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    for (std::size_t colon; (colon = rest.find(':')) != std::string_view::npos; rest.remove_prefix(colon + 1))
      parts.push_back(rest.substr(0, colon));
    parts.push_back(rest);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("--orders expects first:last[:step]");
    const long first = number(parts[0]), last = number(parts[1]);
    const long step = parts.size() == 3 ? number(parts[2]) : 1;
    if (last < first) throw UsageError("--orders: last is below first");
    for (long n = first; n <= last; n += step) out.push_back(n);
  } else {
    for (const auto& field : split_csv_line(text)) out.push_back(number(field));
  }
  return out;
}

std::array<bool, 3> parse_mask(const std::string& text) {
  const auto fields = split_csv_line(text);
  if (fields.size() != 3) throw UsageError("--axis-mask expects three 0/1 flags, e.g. 1,1,0");
  std::array<bool, 3> mask{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (fields[i] != "0" && fields[i] != "1") throw UsageError("--axis-mask entries must be 0 or 1");
    mask[i] = fields[i] == "1";
  }
  return mask;
}

void emit(const Command& cmd, const std::string& text, std::ostream& out) {
  if (cmd.out) write_file(*cmd.out, text);
  else out << text;
}

void emit(const Command& cmd, const nlohmann::ordered_json& report, std::ostream& out) {
  emit(cmd, report.dump(2) + "\n", out);
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(Errc::InvalidConfig, std::string(what) + " must be a non-empty 2-D array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(Errc::InvalidConfig, std::string(what) + " rows must have equal length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw Error(Errc::InvalidConfig, std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

struct SystemSpec {
  MdofSystem system;
  InitialConditions initial;
};

// Either {masses, springs} for a grounded chain or explicit {mass, stiffness,
// damping?} matrices; optional damping_ratio, initial_displacement,
// initial_velocity.
SystemSpec parse_system(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::InvalidConfig, "system file is not a JSON object");
  SystemSpec spec;
  try {
    if (doc.contains("masses")) {
      spec.system = chain_system(vector_from_json(doc.at("masses"), "masses"), vector_from_json(doc.at("springs"), "springs"));
    } else {
      spec.system.mass = matrix_from_json(doc.at("mass"), "mass");
      spec.system.stiffness = matrix_from_json(doc.at("stiffness"), "stiffness");
      spec.system.damping = doc.contains("damping") ? matrix_from_json(doc["damping"], "damping")
                                                    : Eigen::MatrixXd::Zero(spec.system.mass.rows(), spec.system.mass.cols());
    }
    if (doc.contains("damping_ratio")) set_modal_damping(spec.system, doc["damping_ratio"].get<double>());
    if (doc.contains("initial_displacement"))
      spec.initial.displacement = vector_from_json(doc["initial_displacement"], "initial_displacement");
    if (doc.contains("initial_velocity")) spec.initial.velocity = vector_from_json(doc["initial_velocity"], "initial_velocity");
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("system file: ") + e.what());
  }
  return spec;
}

// {rotation: 3x3 rows, translation: [x, y, z]}
RigidTransformd parse_transform(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::NonOrthonormalRotation, "transform file is not a JSON object");
  RigidTransformd t;
  try {
    if (doc.contains("rotation")) {
      const Eigen::MatrixXd r = matrix_from_json(doc["rotation"], "rotation");
      if (r.rows() != 3 || r.cols() != 3) throw Error(Errc::NonOrthonormalRotation, "rotation must be 3x3");
      t.rotation = r;
    }
    if (doc.contains("translation")) {
      const Eigen::VectorXd v = vector_from_json(doc["translation"], "translation");
      if (v.size() != 3) throw Error(Errc::NonOrthonormalRotation, "translation must have 3 entries");
      t.translation = v;
    }
  } catch (const json::exception& e) {
    throw Error(Errc::NonOrthonormalRotation, std::string("transform file: ") + e.what());
  }
  return t;
}

FeaModel load_model(const std::string& path, const std::optional<double>& span_in) {
  std::string text = read_file(path);
  if (span_in) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::MalformedModel, "FEA model: not a JSON object");
    doc["span_length_in"] = *span_in;
    text = doc.dump();
  }
  return parse_fea_model(text);
}

int run_downsample(const Command& cmd) {
  PointCloud pc = read_ply_file(cmd.inputs.at(0));
  if (cmd.transform) pc = apply_transform(pc, parse_transform(read_file(*cmd.transform)));
  if (cmd.voxel > 0.0) pc = voxel_downsample(pc, cmd.voxel);
  write_ply_file(cmd.inputs.at(1), pc, cmd.ascii ? PlyEncoding::Ascii : PlyEncoding::BinaryLittleEndian);
  return kOk;
}

int run_identify(const Command& cmd, std::ostream& out) {
  const VibrationRecord rec = parse_record_csv(read_file(cmd.inputs.at(0)));
  SsiConfig cfg;
  cfg.block_rows = cmd.block_rows;
  cfg.model_order = cmd.order;
  cfg.max_damping = cmd.max_damping;
  emit(cmd, dump_modal_set(ssi_cov(rec, cfg).modes), out);
  return kOk;
}

int run_stabilize(const Command& cmd, std::ostream& out) {
  const VibrationRecord rec = parse_record_csv(read_file(cmd.inputs.at(0)));
  std::vector<Eigen::Index> orders(cmd.orders.begin(), cmd.orders.end());
  emit(cmd, stabilization_to_json(stabilization_sweep(rec, orders, cmd.block_rows, cmd.tolerances, cmd.max_damping)),
       out);
  return kOk;
}

int run_match(const Command& cmd, std::ostream& out) {
  const ModalSet oma = parse_modal_set(read_file(cmd.inputs.at(0)));
  const ModalSet fea = parse_modal_set(read_file(cmd.inputs.at(1)));
  emit(cmd, match_report_to_json(match_modes(oma, fea, cmd.mac_min)), out);
  return kOk;
}

int run_bind(const Command& cmd, std::ostream& out) {
  const PointCloud pc = read_ply_file(cmd.inputs.at(0));
  const FeaModel model = load_model(cmd.inputs.at(1), cmd.span_in);
  const BindingMap binding = bind_points(pc, model);
  std::string frame;
  if (cmd.frame_out) {
    if (!cmd.history) throw UsageError("--frame-out needs --history");
    const DisplacementHistory h = parse_history_csv(read_file(*cmd.history));
    frame = export_frame(pc, binding, h, model, cmd.time, cmd.playback);
  }
  const std::string report = binding_to_json(binding).dump() + "\n";
  if (cmd.frame_out) write_file(*cmd.frame_out, frame);
  emit(cmd, report, out);
  return kOk;
}

int run_check(const Command& cmd, std::ostream& out) {
  const FeaModel model = load_model(cmd.inputs.at(0), cmd.span_in);
  const DisplacementHistory h = parse_history_csv(read_file(cmd.inputs.at(1)));
  const ServiceabilityReport report = check_serviceability(h, model);
  const std::vector<int>& tracked = cmd.track.empty() ? model.midspan_nodes : cmd.track;
  emit(cmd, serviceability_to_json(report, model, track_nodes(h, tracked, model)), out);
  return report.violations.empty() ? kOk : kViolation;
}

int run_simulate(const Command& cmd, std::ostream& out) {
  const SystemSpec spec = parse_system(read_file(cmd.inputs.at(0)));
  const Eigen::Index n = sample_count(cmd.duration, cmd.dt);
  const Eigen::MatrixXd load = cmd.noise_std > 0.0 ? white_noise(spec.system.dofs(), n, cmd.noise_std, cmd.seed)
                                                   : Eigen::MatrixXd();
  const VibrationRecord rec = simulate_mdof(spec.system, load, cmd.dt, cmd.duration, spec.initial, cmd.substeps);
  const std::string csv = record_to_csv(rec);
  std::string modes;
  if (cmd.modes_out) modes = dump_modal_set(system_modes(spec.system));
  if (cmd.modes_out) write_file(*cmd.modes_out, modes);
  emit(cmd, csv, out);
  return kOk;
}

std::pair<std::string, unsigned short> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) throw UsageError("--bind expects address:port");
  long port = 0;
  const std::string port_text = bind.substr(colon + 1);
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() || port < 0 || port > 65535)
    throw UsageError("--bind: bad port '" + port_text + "'");
  return {bind.substr(0, colon), static_cast<unsigned short>(port)};
}

int run_serve(const Command& cmd, std::ostream& out) {
  session::ServerOptions opts;
  std::tie(opts.address, opts.port) = split_bind(cmd.bind);
  opts.limits.max_users = cmd.max_users;
  opts.limits.scan_buffer_points = cmd.scan_buffer;
  opts.heartbeat_interval = std::chrono::milliseconds(cmd.heartbeat_ms);
  opts.threads = cmd.threads;
  opts.stop_on_signal = true;
  session::Server server(opts);
  const unsigned short bound = server.start();
  out << "listening on " << opts.address << ":" << bound << std::endl;
  server.wait();
  return kOk;
}

}  // namespace

Command parse_args(const std::vector<std::string>& args) {
  Command cmd;
  CLI::App app{"Structural health monitoring workbench", "shm"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every verb");

  std::string in1, in2, orders_text, mask_text, track_text;

  auto* ds = app.add_subcommand("downsample", "Voxel down-sample (and optionally transform) a PLY cloud");
  ds->add_option("input", in1, "Input PLY")->required();
  ds->add_option("output", in2, "Output PLY")->required();
  ds->add_option("--voxel", cmd.voxel, "Voxel edge length, meters (0 keeps every point)")->check(CLI::NonNegativeNumber);
  ds->add_option("--transform", cmd.transform, "Rigid transform JSON applied before down-sampling");
  ds->add_flag("--ascii", cmd.ascii, "Write ASCII instead of binary little-endian");

  auto* id = app.add_subcommand("identify", "SSI-COV modal identification of a vibration record");
  id->add_option("record", in1, "Record CSV")->required();
  id->add_option("--order,-n", cmd.order, "Model order n")->required()->check(CLI::PositiveNumber);
  id->add_option("--block-rows,-p", cmd.block_rows, "Block rows p")->required()->check(CLI::PositiveNumber);
  id->add_option("--max-damping", cmd.max_damping, "Reject poles above this damping ratio")->check(CLI::PositiveNumber);
  id->add_option("--out,-o", cmd.out, "Report file (default stdout)");

  auto* st = app.add_subcommand("stabilize", "Stabilization diagram over a range of model orders");
  st->add_option("record", in1, "Record CSV")->required();
  st->add_option("--orders", orders_text, "first:last[:step] or a comma list")->required();
  st->add_option("--block-rows,-p", cmd.block_rows, "Block rows p")->required()->check(CLI::PositiveNumber);
  st->add_option("--df", cmd.tolerances.freq_rel, "Relative frequency tolerance")->check(CLI::PositiveNumber);
  st->add_option("--dz", cmd.tolerances.damping_rel, "Relative damping tolerance")->check(CLI::PositiveNumber);
  st->add_option("--mac", cmd.tolerances.mac_min, "Minimum MAC")->check(CLI::Range(0.0, 1.0));
  st->add_option("--max-damping", cmd.max_damping, "Reject poles above this damping ratio")->check(CLI::PositiveNumber);
  st->add_option("--out,-o", cmd.out, "Report file (default stdout)");

  auto* ma = app.add_subcommand("match", "Pair identified and reference modes by MAC");
  ma->add_option("oma", in1, "Identified modal set JSON")->required();
  ma->add_option("fea", in2, "Reference modal set JSON")->required();
  ma->add_option("--mac-min", cmd.mac_min, "Pairs below this MAC are not formed")->check(CLI::Range(0.0, 1.0));
  ma->add_option("--out,-o", cmd.out, "Report file (default stdout)");

  auto* bi = app.add_subcommand("bind", "Bind cloud points to FEA nodes; optionally export a deformed frame");
  bi->add_option("cloud", in1, "Point cloud PLY")->required();
  bi->add_option("model", in2, "FEA model JSON")->required();
  bi->add_option("--span-in", cmd.span_in, "Override the span length, inches")->check(CLI::PositiveNumber);
  bi->add_option("--history", cmd.history, "Displacement history CSV (for --frame-out)");
  bi->add_option("--frame-out", cmd.frame_out, "Write the deformed, colored frame CSV here");
  bi->add_option("--time,-t", cmd.time, "Frame time, seconds")->check(CLI::NonNegativeNumber);
  bi->add_option("--scale", cmd.playback.scale, "Displacement scale factor")->check(CLI::NonNegativeNumber);
  bi->add_option("--axis-mask", mask_text, "Per-axis displacement flags, e.g. 1,1,0");
  bi->add_option("--out,-o", cmd.out, "Binding report file (default stdout)");

  auto* ch = app.add_subcommand("check", "Serviceability check against span/1000");
  ch->add_option("model", in1, "FEA model JSON")->required();
  ch->add_option("history", in2, "Displacement history CSV")->required();
  ch->add_option("--span-in", cmd.span_in, "Override the span length, inches")->check(CLI::PositiveNumber);
  ch->add_option("--track", track_text, "Comma list of node ids to trace (default: model midspan nodes)");
  ch->add_option("--out,-o", cmd.out, "Report file (default stdout)");

  auto* si = app.add_subcommand("simulate", "Simulate an acceleration record of a linear MDOF system");
  si->add_option("system", in1, "System JSON")->required();
  si->add_option("--dt", cmd.dt, "Sample interval, seconds")->check(CLI::PositiveNumber);
  si->add_option("--duration", cmd.duration, "Record length, seconds")->check(CLI::NonNegativeNumber);
  si->add_option("--noise-std", cmd.noise_std, "White-noise load standard deviation (0: free response)")
      ->check(CLI::NonNegativeNumber);
  si->add_option("--seed", cmd.seed, "Load RNG seed");
  si->add_option("--substeps", cmd.substeps, "Integration steps per sample")->check(CLI::PositiveNumber);
  si->add_option("--modes-out", cmd.modes_out, "Write the analytic modal set here");
  si->add_option("--out,-o", cmd.out, "Record CSV (default stdout)");

  auto* se = app.add_subcommand("serve", "Run the collaboration session server");
  se->add_option("--bind", cmd.bind, "address:port");
  se->add_option("--max-users", cmd.max_users, "Room capacity")->check(CLI::PositiveNumber);
  se->add_option("--scan-buffer", cmd.scan_buffer, "Buffered scan points per room");
  se->add_option("--heartbeat-ms", cmd.heartbeat_ms, "Heartbeat interval; 3 missed intervals drop a client")
      ->check(CLI::PositiveNumber);
  se->add_option("--threads", cmd.threads, "I/O threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream text, ignored;
    app.exit(e, text, ignored);
    throw HelpRequested(text.str());
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream text, ignored;
    app.exit(e, text, ignored);
    throw HelpRequested(text.str());
  } catch (const CLI::ParseError& e) {
    std::ostringstream ignored, text;
    app.exit(e, ignored, text);
    throw UsageError(text.str());
  }

  const std::pair<CLI::App*, Verb> verbs[] = {{ds, Verb::Downsample}, {id, Verb::Identify}, {st, Verb::Stabilize},
                                              {ma, Verb::Match},      {bi, Verb::Bind},     {ch, Verb::Check},
                                              {si, Verb::Simulate},   {se, Verb::Serve}};
  for (const auto& [sub, verb] : verbs)
    if (sub->parsed()) cmd.verb = verb;

  for (const std::string* in : {&in1, &in2})
    if (!in->empty()) cmd.inputs.push_back(*in);
  if (!orders_text.empty()) cmd.orders = parse_orders(orders_text);
  if (!mask_text.empty()) cmd.playback.axis_mask = parse_mask(mask_text);
  if (!track_text.empty()) {
    for (const auto& field : split_csv_line(track_text)) {
      long long id = 0;
      if (!parse_number(field, id)) throw UsageError("--track: '" + std::string(field) + "' is not a node id");
      cmd.track.push_back(static_cast<int>(id));
    }
  }
  if (cmd.frame_out && !cmd.history) throw UsageError("--frame-out needs --history");
  if (cmd.verb == Verb::Serve) split_bind(cmd.bind);
  return cmd;
}

Command parse_args(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_args(args);
}

int run(const Command& cmd, std::ostream& out, std::ostream&) {
  switch (cmd.verb) {
    case Verb::Downsample: return run_downsample(cmd);
    case Verb::Identify: return run_identify(cmd, out);
    case Verb::Stabilize: return run_stabilize(cmd, out);
    case Verb::Match: return run_match(cmd, out);
    case Verb::Bind: return run_bind(cmd, out);
    case Verb::Check: return run_check(cmd, out);
    case Verb::Simulate: return run_simulate(cmd, out);
    case Verb::Serve: return run_serve(cmd, out);
  }
  return kUsage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kOk;
  } catch (const UsageError& e) {
    err << e.what();
    if (std::string_view(e.what()).find("--help") == std::string_view::npos) err << "\nRun with --help for usage.\n";
    return kUsage;
  }
  try {
    return run(cmd, out, err);
  } catch (const UsageError& e) {
    err << "shm: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "shm: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    err << "shm: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace shm::cli
