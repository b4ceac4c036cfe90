#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shm/deformation.hpp"
#include "shm/ssi.hpp"

namespace shm::cli {

enum class Verb { Downsample, Identify, Stabilize, Match, Bind, Check, Simulate, Serve };

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kViolation = 1;
inline constexpr int kUsage = 2;
inline constexpr int kRuntime = 3;

struct Command {
  Verb verb = Verb::Downsample;
  std::vector<std::string> inputs;  // positional files, in verb order
  std::optional<std::string> out;

  // downsample
  double voxel = 0.0;
  bool ascii = false;
  std::optional<std::string> transform;

  // identify / stabilize
  long order = 0;
  long block_rows = 0;
  double max_damping = 0.20;
  std::vector<long> orders;
  StabilizationTolerances tolerances;

  // match
  double mac_min = 0.8;

  // bind / check
  std::optional<double> span_in;
  std::vector<int> track;
  std::optional<std::string> history;
  std::optional<std::string> frame_out;
  double time = 0.0;
  PlaybackConfig playback;

  // simulate
  double dt = 0.01;
  double duration = 112.0;
  double noise_std = 1.0;
  std::uint64_t seed = 1;
  int substeps = 1;
  std::optional<std::string> modes_out;

  // serve
  std::string bind = "127.0.0.1:8765";
  std::size_t max_users = 20;
  std::size_t scan_buffer = 500000;
  long heartbeat_ms = 5000;
  int threads = 2;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `--help` anywhere; carries the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Command parse_args(int argc, const char* const* argv);
Command parse_args(const std::vector<std::string>& args);  // without argv[0]

int run(const Command& cmd, std::ostream& out, std::ostream& err);

// parse_args + run with the exit-code mapping.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shm::cli
