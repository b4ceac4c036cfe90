#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "shm/deformation.hpp"

namespace shm {

// {span_length_in, vertical_axis, midspan_nodes[], nodes[]: {id, x, y, z}}
FeaModel parse_fea_model(std::string_view text);
std::string dump_fea_model(const FeaModel& model);

// Long format `time,node_id,ux,uy,uz`; every node at every step, t0 = 0.
DisplacementHistory parse_history_csv(std::string_view text);
std::string history_to_csv(const DisplacementHistory& h);

nlohmann::ordered_json serviceability_to_json(const ServiceabilityReport& report, const FeaModel& model,
                                              const std::vector<TrackTrace>& tracks, int digits = 9);

nlohmann::ordered_json binding_to_json(const BindingMap& binding);

}  // namespace shm
