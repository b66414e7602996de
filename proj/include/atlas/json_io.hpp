#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "atlas/domain.hpp"

namespace atlas {

using json = nlohmann::json;

// nlohmann ADL hooks. Decoding throws InputError naming the offending field.
void to_json(json& j, const IncidentRecord& incident);
void from_json(const json& j, IncidentRecord& incident);
void to_json(json& j, RiskTier tier);
void from_json(const json& j, RiskTier& tier);
void to_json(json& j, const SdgImpact& impact);
void from_json(const json& j, SdgImpact& impact);
void to_json(json& j, const UseDraft& draft);
void from_json(const json& j, UseDraft& draft);
void to_json(json& j, const UseRecord& use);
void from_json(const json& j, UseRecord& use);
void to_json(json& j, const Dataset& dataset);
void from_json(const json& j, Dataset& dataset);
void to_json(json& j, const SummaryStats& stats);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

/// Parses a file as JSON; InputError on I/O or syntax failure.
json read_json_file(const std::filesystem::path& path);

/// Pretty-printed (2-space) JSON with a trailing newline.
void write_json_file(const std::filesystem::path& path, const json& value);

Dataset load_dataset(const std::filesystem::path& path);

}  // namespace atlas
