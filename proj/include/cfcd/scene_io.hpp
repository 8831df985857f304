#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cfcd/scene.hpp"

namespace cfcd {

using json = nlohmann::json;

// JSON mappings for the scene and graph file formats. Doubles are written
// with shortest round-trip precision, so parse(dump(x)) == x.

json to_json(const TimeGrid& g);
json to_json(const AgentTrack& t);
json to_json(const Decision& d);
json to_json(const DecisionSet& d);
json to_json(const Scene& s);
/// Graph file: {nodes, edges, decision_links?}.
json to_json(const EntityCausalGraph& g);
json to_json(const DecisionCausalGraph& g);

TimeGrid grid_from_json(const json& j);
AgentTrack track_from_json(const json& j);
Decision decision_from_json(const json& j);
DecisionSet decision_set_from_json(const json& j);
Scene scene_from_json(const json& j);
EntityCausalGraph entity_graph_from_json(const json& j);
DecisionCausalGraph decision_graph_from_json(const json& j);

Scene read_scene_file(const std::filesystem::path& path);
void write_scene_file(const std::filesystem::path& path, const Scene& scene);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

} // namespace cfcd
