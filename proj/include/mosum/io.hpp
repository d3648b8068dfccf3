#pragma once

#include "mosum/detector.hpp"
#include "mosum/experiment.hpp"
#include "mosum/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

// Single-header nlohmann/json lives in vendor/ as json.hpp.
#include <json.hpp>

namespace mosum {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

// Events CSV: header "component_id,time", 1-based component ids, times as
// written (order preserved; validation happens in EventSeries).
void write_events_csv(const EventSeries& events, std::ostream& out);
void write_events_csv(const EventSeries& events, const std::filesystem::path& path);
EventSeries read_events_csv(std::istream& in);
EventSeries read_events_csv(const std::filesystem::path& path);

// Path CSV: header "t,z_1,...,z_p".
void write_path_csv(const SampledPath& path, std::ostream& out);
void write_path_csv(const SampledPath& path, const std::filesystem::path& file);
SampledPath read_path_csv(std::istream& in);
SampledPath read_path_csv(const std::filesystem::path& file);

// MOSUM series CSV: "t,m_1,...,m_p,norm,quadform".
void write_mosum_csv(const MosumSeries& series, std::ostream& out);
void write_mosum_csv(const MosumSeries& series, const std::filesystem::path& file);

nlohmann::json to_json(const SegmentationConfig& config);
SegmentationConfig segmentation_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ThresholdResult& result);

nlohmann::json to_json(const ChangeSpec& spec);
ChangeSpec change_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RenewalScenario& scenario);
RenewalScenario scenario_from_json(const nlohmann::json& j);
/// Preset name or path to a scenario JSON file.
RenewalScenario load_scenario(const std::string& name_or_path);

nlohmann::json to_json(const SegmentationResult& result);
SegmentationResult segmentation_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentReport& report);

/// Canonical serialization used by the CLI: 2-space indent, '\n' terminated.
std::string dump_json(const nlohmann::json& j);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace mosum
