#include "cfcd/scene_io.hpp"

#include <fstream>

#include "cfcd/errors.hpp"

namespace cfcd {

namespace {

template <typename T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field '") + key + "': " + e.what());
    }
}

} // namespace

json to_json(const TimeGrid& g) {
    return {{"t_start", g.t_start}, {"dt", g.dt}, {"n_steps", g.n_steps}};
}

json to_json(const AgentTrack& t) {
    return {{"agent_id", t.agent_id}, {"t_first", t.t_first}, {"dt", t.dt},
            {"x", t.x},               {"y", t.y},               {"heading", t.heading},
            {"speed", t.speed},       {"long_accel", t.long_accel},
            {"length", t.length},     {"width", t.width},       {"lane_id", t.lane_id}};
}

json to_json(const Decision& d) {
    return {{"agent_id", d.agent_id},
            {"t", d.decision_time},
            {"target_speed", d.goal.target_speed},
            {"target_time", d.goal.target_time}};
}

json to_json(const DecisionSet& d) {
    json arr = json::array();
    for (const auto& dec : d.all()) arr.push_back(to_json(dec));
    return arr;
}

json to_json(const EntityCausalGraph& g) {
    json edges = json::array();
    for (const auto& [s, d] : g.edges()) edges.push_back({s, d});
    return {{"nodes", g.nodes()}, {"edges", edges}};
}

json to_json(const DecisionCausalGraph& g) {
    json j = to_json(entity_projection(g));
    json links = json::array();
    for (const auto& l : g.links) links.push_back({{"cause", to_json(l.cause)}, {"effect", to_json(l.effect)}});
    j["decision_links"] = links;
    j["decisions"] = to_json(g.decisions);
    return j;
}

json to_json(const Scene& s) {
    json tracks = json::array();
    for (const auto& t : s.tracks) tracks.push_back(to_json(t));
    json roles = json::object();
    for (const auto& [id, r] : s.roles) roles[std::to_string(id)] = to_string(r);
    json j = {{"id", s.id}, {"grid", to_json(s.grid)}, {"tracks", tracks}, {"roles", roles}};
    if (s.ground_truth) j["ground_truth"] = to_json(*s.ground_truth);
    if (!s.metadata.empty()) j["metadata"] = s.metadata;
    return j;
}

TimeGrid grid_from_json(const json& j) {
    TimeGrid g;
    g.t_start = field<double>(j, "t_start");
    g.dt = field<double>(j, "dt");
    g.n_steps = field<std::size_t>(j, "n_steps");
    return g;
}

AgentTrack track_from_json(const json& j) {
    AgentTrack t;
    t.agent_id = field<AgentId>(j, "agent_id");
    t.t_first = field<double>(j, "t_first");
    t.dt = field<double>(j, "dt");
    t.x = field<std::vector<double>>(j, "x");
    t.y = field<std::vector<double>>(j, "y");
    t.heading = field<std::vector<double>>(j, "heading");
    t.speed = field<std::vector<double>>(j, "speed");
    t.long_accel = field<std::vector<double>>(j, "long_accel");
    t.length = field<double>(j, "length");
    t.width = field<double>(j, "width");
    t.lane_id = field<int>(j, "lane_id");
    return t;
}

Decision decision_from_json(const json& j) {
    Decision d;
    d.agent_id = field<AgentId>(j, "agent_id");
    d.decision_time = field<double>(j, "t");
    d.goal.target_speed = field<double>(j, "target_speed");
    d.goal.target_time = field<double>(j, "target_time");
    return d;
}

DecisionSet decision_set_from_json(const json& j) {
    DecisionSet out;
    for (const auto& item : j) out.add(decision_from_json(item));
    return out;
}

EntityCausalGraph entity_graph_from_json(const json& j) {
    EntityCausalGraph g(field<std::vector<AgentId>>(j, "nodes"));
    for (const auto& e : field<json>(j, "edges")) {
        if (!e.is_array() || e.size() != 2) throw ParseError("edge must be a [src, dst] pair");
        g.add_edge(e[0].get<AgentId>(), e[1].get<AgentId>());
    }
    return g;
}

DecisionCausalGraph decision_graph_from_json(const json& j) {
    DecisionCausalGraph g;
    if (j.contains("decisions")) g.decisions = decision_set_from_json(j.at("decisions"));
    if (j.contains("decision_links")) {
        for (const auto& l : j.at("decision_links")) {
            g.links.push_back({decision_from_json(field<json>(l, "cause")), decision_from_json(field<json>(l, "effect"))});
        }
    }
    return g;
}

Scene scene_from_json(const json& j) {
    Scene s;
    s.id = field<std::string>(j, "id");
    s.grid = grid_from_json(field<json>(j, "grid"));
    for (const auto& t : field<json>(j, "tracks")) s.tracks.push_back(track_from_json(t));
    if (j.contains("roles")) {
        for (const auto& [key, val] : j.at("roles").items()) {
            s.roles[std::stoll(key)] = role_from_string(val.get<std::string>());
        }
    }
    if (j.contains("ground_truth") && !j.at("ground_truth").is_null()) {
        s.ground_truth = entity_graph_from_json(j.at("ground_truth"));
    }
    if (j.contains("metadata")) s.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    return s;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << j.dump(1) << '\n';
}

Scene read_scene_file(const std::filesystem::path& path) {
    auto s = scene_from_json(read_json_file(path));
    s.validate();
    return s;
}

void write_scene_file(const std::filesystem::path& path, const Scene& scene) {
    write_json_file(path, to_json(scene));
}

} // namespace cfcd
