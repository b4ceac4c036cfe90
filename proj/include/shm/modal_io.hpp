#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "shm/modal.hpp"
#include "shm/ssi.hpp"

namespace shm {

// Header `time,<label1>,...,<labelL>`; times strictly increasing and uniform
// to 1e-6 relative. Throws MalformedRecord.
VibrationRecord parse_record_csv(std::string_view text);

// Shortest round-trip decimals; time column is k * dt.
std::string record_to_csv(const VibrationRecord& rec);

// {source, modes[]: {frequency_hz, damping_ratio, shape_re[], shape_im[]}},
// numbers rounded to `digits` significant digits.
nlohmann::ordered_json modal_set_to_json(const ModalSet& set, int digits = 9);
ModalSet modal_set_from_json(const nlohmann::json& doc);

std::string dump_modal_set(const ModalSet& set, int digits = 9);
ModalSet parse_modal_set(std::string_view text);

// Shared report shapes for the CLI.
nlohmann::ordered_json stabilization_to_json(const StabilizationDiagram& diagram, int digits = 9);
nlohmann::ordered_json match_report_to_json(const ModeMatchReport& report, int digits = 9);

}  // namespace shm
