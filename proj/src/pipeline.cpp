#include "cfcd/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cfcd/errors.hpp"
#include "cfcd/eval.hpp"
#include "cfcd/scene_io.hpp"

namespace cfcd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kIndexFile = "index.json";
constexpr const char* kConventionNote =
    "precision=1 when no edges predicted and none missed; recall=1 when truth is empty; "
    "f1=1 when prediction and truth are both empty; per-scene scores macro-averaged";

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_range(const json& j, const char* key, Range& r) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_number()) {
        r.lo = r.hi = v.get<double>();
    } else if (v.is_array() && v.size() == 2) {
        r.lo = v[0].get<double>();
        r.hi = v[1].get<double>();
    } else {
        throw InvalidInput(std::string("synth spec '") + key + "' must be a number or [lo, hi]");
    }
}

json spec_to_json(const SyntheticSpec& s) {
    const auto r = [](const Range& x) { return json::array({x.lo, x.hi}); };
    return {{"dt", s.dt},
            {"duration", s.duration},
            {"lane_width", s.lane_width},
            {"cruise_speed", r(s.cruise_speed)},
            {"headway", r(s.headway)},
            {"head_brake_time", r(s.head_brake_time)},
            {"head_decel", r(s.head_decel)},
            {"head_speed_drop", r(s.head_speed_drop)},
            {"follower_delay", r(s.follower_delay)},
            {"follower_decel_scale", r(s.follower_decel_scale)},
            {"follower_extra_drop", r(s.follower_extra_drop)},
            {"independent_lane_offset", s.independent_lane_offset},
            {"independent_speed", r(s.independent_speed)},
            {"independent_offset", r(s.independent_offset)},
            {"independent_change_probability", s.independent_change_probability},
            {"independent_change_time", r(s.independent_change_time)},
            {"independent_speed_change", r(s.independent_speed_change)},
            {"independent_change_duration", r(s.independent_change_duration)},
            {"vehicle_length", r(s.vehicle_length)},
            {"vehicle_width", r(s.vehicle_width)}};
}

SyntheticSpec spec_from_json(const json& j) {
    SyntheticSpec s;
    read_opt(j, "dt", s.dt);
    read_opt(j, "duration", s.duration);
    read_opt(j, "lane_width", s.lane_width);
    read_range(j, "cruise_speed", s.cruise_speed);
    read_range(j, "headway", s.headway);
    read_range(j, "head_brake_time", s.head_brake_time);
    read_range(j, "head_decel", s.head_decel);
    read_range(j, "head_speed_drop", s.head_speed_drop);
    read_range(j, "follower_delay", s.follower_delay);
    read_range(j, "follower_decel_scale", s.follower_decel_scale);
    read_range(j, "follower_extra_drop", s.follower_extra_drop);
    read_opt(j, "independent_lane_offset", s.independent_lane_offset);
    read_range(j, "independent_speed", s.independent_speed);
    read_range(j, "independent_offset", s.independent_offset);
    read_opt(j, "independent_change_probability", s.independent_change_probability);
    read_range(j, "independent_change_time", s.independent_change_time);
    read_range(j, "independent_speed_change", s.independent_speed_change);
    read_range(j, "independent_change_duration", s.independent_change_duration);
    read_range(j, "vehicle_length", s.vehicle_length);
    read_range(j, "vehicle_width", s.vehicle_width);
    return s;
}

std::string lambda_tag(std::optional<double> lambda) {
    if (!lambda) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", *lambda);
    return buf;
}

std::vector<fs::path> scene_files(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != kIndexFile) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// (variant, threshold) cells; agency ignores the threshold and gets one cell.
std::vector<std::pair<TestVariant, std::optional<double>>> cells_of(const RunConfig& cfg) {
    std::vector<std::pair<TestVariant, std::optional<double>>> cells;
    auto variants = cfg.variants;
    if (variants.empty()) variants = {TestVariant::agency};
    for (auto v : variants) {
        if (v == TestVariant::agency) {
            cells.emplace_back(v, std::nullopt);
            continue;
        }
        if (cfg.lambdas.empty()) cells.emplace_back(v, 1.0);
        for (double l : cfg.lambdas) cells.emplace_back(v, l);
    }
    return cells;
}

std::string sanitize(std::string s) {
    for (auto& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    }
    return s;
}

json decision_ref(const Decision& d) { return to_json(d); }

} // namespace

void RunConfig::validate() const {
    if (workers < 1) throw InvalidInput("worker count must be at least 1");
    extract.validate();
    scene_extraction.validate();
    for (double l : lambdas) {
        if (!(l > 0.0 && l <= 1.0)) throw InvalidInput("reward thresholds must lie in (0, 1]");
    }
    if (!(ttc_horizon > 0.0)) throw InvalidInput("TTC horizon must be positive");
    if (random_baseline_p && !(*random_baseline_p >= 0.0 && *random_baseline_p <= 1.0)) {
        throw InvalidInput("random baseline probability must lie in [0, 1]");
    }
}

CdConfig RunConfig::cd_config(TestVariant variant, double lambda) const {
    CdConfig c;
    c.variant = variant;
    c.reward_threshold = lambda;
    c.sim.dt = 0.0;
    c.sim.ttc_horizon = ttc_horizon;
    c.extract = extract;
    c.reward.literal_cct_polarity = literal_cct_polarity;
    c.agency_any_collision = agency_any_collision;
    return c;
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        if (p.contains("input_dir")) c.input_dir = p.at("input_dir").get<std::string>();
        if (p.contains("scene_dir")) c.scene_dir = p.at("scene_dir").get<std::string>();
        if (p.contains("output_dir")) c.output_dir = p.at("output_dir").get<std::string>();
    }
    if (j.contains("extraction")) {
        const auto& e = j.at("extraction");
        read_opt(e, "accel_threshold", c.extract.accel_threshold);
        read_opt(e, "min_duration", c.extract.min_duration);
        read_opt(e, "min_speed_delta", c.extract.min_speed_delta);
    }
    if (j.contains("scene_extraction")) {
        const auto& e = j.at("scene_extraction");
        read_opt(e, "min_rel_speed_change", c.scene_extraction.min_rel_speed_change);
        read_opt(e, "min_scene_duration", c.scene_extraction.min_scene_duration);
        read_opt(e, "max_headway", c.scene_extraction.max_headway);
        read_opt(e, "smoothing_window", c.scene_extraction.smoothing_window);
    }
    read_opt(j, "column_renames", c.column_renames);
    if (j.contains("discovery")) {
        const auto& d = j.at("discovery");
        if (d.contains("variants")) {
            c.variants.clear();
            for (const auto& v : d.at("variants")) c.variants.push_back(test_variant_from_string(v.get<std::string>()));
        }
        if (d.contains("lambdas")) c.lambdas = d.at("lambdas").get<std::vector<double>>();
        if (d.contains("lambda")) c.lambdas = {d.at("lambda").get<double>()};
        read_opt(d, "ttc_horizon", c.ttc_horizon);
        read_opt(d, "literal_cct_polarity", c.literal_cct_polarity);
        read_opt(d, "agency_any_collision", c.agency_any_collision);
        if (d.contains("random_baseline_p") && !d.at("random_baseline_p").is_null()) {
            c.random_baseline_p = d.at("random_baseline_p").get<double>();
        }
    }
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        read_opt(s, "n", c.synth_count);
        if (s.contains("spec")) c.synth_spec = spec_from_json(s.at("spec"));
    }
    read_opt(j, "seed", c.seed);
    read_opt(j, "workers", c.workers);
    read_opt(j, "dump_traces", c.dump_traces);
    return c;
}

json to_json(const RunConfig& c) {
    json variants = json::array();
    for (auto v : c.variants) variants.push_back(to_string(v));
    return {{"paths",
             {{"input_dir", c.input_dir.string()},
              {"scene_dir", c.scene_dir.string()},
              {"output_dir", c.output_dir.string()}}},
            {"extraction",
             {{"accel_threshold", c.extract.accel_threshold},
              {"min_duration", c.extract.min_duration},
              {"min_speed_delta", c.extract.min_speed_delta}}},
            {"scene_extraction",
             {{"min_rel_speed_change", c.scene_extraction.min_rel_speed_change},
              {"min_scene_duration", c.scene_extraction.min_scene_duration},
              {"max_headway", c.scene_extraction.max_headway},
              {"smoothing_window", c.scene_extraction.smoothing_window}}},
            {"column_renames", c.column_renames},
            {"discovery",
             {{"variants", variants},
              {"lambdas", c.lambdas},
              {"ttc_horizon", c.ttc_horizon},
              {"literal_cct_polarity", c.literal_cct_polarity},
              {"agency_any_collision", c.agency_any_collision},
              {"random_baseline_p", c.random_baseline_p ? json(*c.random_baseline_p) : json(nullptr)}}},
            {"synth", {{"n", c.synth_count}, {"spec", spec_to_json(c.synth_spec)}}},
            {"seed", c.seed},
            {"workers", c.workers},
            {"dump_traces", c.dump_traces}};
}

std::string config_hash(const RunConfig& cfg) {
    auto j = to_json(cfg);
    j.erase("workers");
    const auto text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

json discovery_report(const std::string& scene_id, const DiscoveryResult& r, TestVariant variant,
                      std::optional<double> lambda, const std::string& hash) {
    json links = json::array();
    for (const auto& l : r.decision_graph.links) {
        links.push_back({{"cause", decision_ref(l.cause)}, {"effect", decision_ref(l.effect)}});
    }
    json edges = json::array();
    for (const auto& [s, d] : r.entity_graph.edges()) edges.push_back({s, d});
    json candidates = json::array();
    for (const auto& c : r.candidates) {
        json rewards = json::object();
        json agency = json::object();
        for (auto v : kWorldVariants) {
            rewards[to_string(v)] = c.min_rewards[static_cast<std::size_t>(v)];
            agency[to_string(v)] = c.agency_loss[static_cast<std::size_t>(v)];
        }
        candidates.push_back({{"cause", decision_ref(c.link.cause)},
                              {"effect", decision_ref(c.link.effect)},
                              {"dR_plus", c.reward.plus},
                              {"dR_minus", c.reward.minus},
                              {"dR", c.reward.total()},
                              {"min_rewards", rewards},
                              {"agency_loss", agency},
                              {"agency_flags",
                               {{"active", c.agency.active},
                                {"passive", c.agency.passive},
                                {"facilitation", c.agency.facilitation},
                                {"mutual_effect_motive", c.agency.mutual_effect_motive}}},
                              {"accepted", c.accepted}});
    }
    return {{"scene_id", scene_id},
            {"variant", to_string(variant)},
            {"lambda_dR", lambda ? json(*lambda) : json(nullptr)},
            {"nodes", r.entity_graph.nodes()},
            {"decisions", to_json(r.decision_graph.decisions)},
            {"decision_links", links},
            {"entity_edges", edges},
            {"candidates", candidates},
            {"wall_time_s", r.wall_time_s},
            {"config_hash", hash}};
}

int cmd_ingest(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto hash = config_hash(cfg);
    std::vector<fs::path> inputs;
    if (!fs::is_directory(cfg.input_dir)) {
        log << "error: input directory " << cfg.input_dir << " does not exist\n";
        return kExitInputError;
    }
    for (const auto& e : fs::directory_iterator(cfg.input_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") inputs.push_back(e.path());
    }
    std::sort(inputs.begin(), inputs.end());

    struct Result {
        std::vector<Scene> scenes;
        std::string error;
    };
    std::vector<Result> results(inputs.size());
    parallel_for(inputs.size(), cfg.workers, [&](std::size_t i) {
        try {
            const auto rec = parse_tracks_file(inputs[i], cfg.column_renames);
            results[i].scenes = extract_causal_scenes(rec.tracks, rec.meta, cfg.scene_extraction);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    fs::create_directories(cfg.scene_dir);
    json index = {{"config_hash", hash},
                  {"scene_extraction", to_json(cfg)["scene_extraction"]},
                  {"recordings", json::array()},
                  {"scenes", json::array()}};
    bool failed = false;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto name = inputs[i].filename().string();
        if (!results[i].error.empty()) {
            log << "error: " << name << ": " << results[i].error << '\n';
            index["recordings"].push_back({{"file", name}, {"error", results[i].error}});
            failed = true;
            continue;
        }
        log << name << ": " << results[i].scenes.size() << " scenes\n";
        index["recordings"].push_back({{"file", name}, {"n_scenes", results[i].scenes.size()}});
        for (auto& s : results[i].scenes) {
            s.metadata["config_hash"] = hash;
            write_scene_file(cfg.scene_dir / (sanitize(s.id) + ".json"), s);
            index["scenes"].push_back(s.id);
        }
    }
    write_json_file(cfg.scene_dir / kIndexFile, index);
    return failed ? kExitInputError : kExitOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    try {
        cfg.synth_spec.validate();
    } catch (const InvalidInput& e) {
        log << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    const auto hash = config_hash(cfg);
    std::vector<Scene> scenes(cfg.synth_count);
    parallel_for(scenes.size(), cfg.workers, [&](std::size_t i) {
        scenes[i] = generate_synthetic_scene(derive_seed(cfg.seed, i), cfg.synth_spec);
        char id[32];
        std::snprintf(id, sizeof(id), "synth_%05zu", i);
        scenes[i].id = id;
        scenes[i].metadata["config_hash"] = hash;
    });
    if (scenes.empty()) {
        log << "no scenes requested\n";
        return kExitOk;
    }
    fs::create_directories(cfg.scene_dir);
    json index = {{"config_hash", hash}, {"synth_spec", spec_to_json(cfg.synth_spec)}, {"scenes", json::array()}};
    std::size_t certified = 0;
    for (const auto& s : scenes) {
        write_scene_file(cfg.scene_dir / (s.id + ".json"), s);
        const bool cf = s.metadata.at("counterfactual_collision") == "true";
        certified += cf ? 1 : 0;
        index["scenes"].push_back({{"id", s.id}, {"counterfactual_collision", cf}});
    }
    write_json_file(cfg.scene_dir / kIndexFile, index);
    log << "wrote " << scenes.size() << " scenes (" << certified << " with a counterfactual collision) to "
        << cfg.scene_dir << '\n';
    return kExitOk;
}

int cmd_discover(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto hash = config_hash(cfg);
    const auto files = scene_files(cfg.scene_dir);
    if (files.empty()) {
        log << "warning: no scene files in " << cfg.scene_dir << '\n';
        return kExitOk;
    }
    const auto cells = cells_of(cfg);
    const auto report_dir = cfg.output_dir / "reports";
    fs::create_directories(report_dir);

    std::vector<std::string> errors(files.size());
    std::vector<std::size_t> written(files.size(), 0);
    parallel_for(files.size(), cfg.workers, [&](std::size_t i) {
        try {
            const auto scene = read_scene_file(files[i]);
            // Threshold and variant only change the final link test.
            const auto base = discover(scene, cfg.cd_config(cells.front().first, cells.front().second.value_or(1.0)));
            for (const auto& [variant, lambda] : cells) {
                auto r = assemble(base.decision_graph.decisions, base.candidates, variant, lambda.value_or(1.0));
                r.wall_time_s = base.wall_time_s;
                const auto name = sanitize(scene.id) + "__" + to_string(variant) + "__" + lambda_tag(lambda) + ".json";
                write_json_file(report_dir / name, discovery_report(scene.id, r, variant, lambda, hash));
                ++written[i];
            }
            if (cfg.dump_traces) {
                const auto dir = cfg.output_dir / "traces" / sanitize(scene.id);
                fs::create_directories(dir);
                const auto cd = cfg.cd_config(cells.front().first, cells.front().second.value_or(1.0));
                for (std::size_t k = 0; k < base.candidates.size(); ++k) {
                    std::array<WorldOutcome, 4> worlds;
                    evaluate_candidate(scene, base.decision_graph.decisions, base.candidates[k].link, cd, &worlds);
                    for (const auto& w : worlds) {
                        std::ofstream out(dir / ("candidate_" + std::to_string(k) + "_" + to_string(w.variant) + ".csv"));
                        out << "# config_hash=" << hash << '\n';
                        write_trace_csv(out, w.trace);
                    }
                }
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::size_t failed = 0;
    std::size_t reports = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        reports += written[i];
        if (!errors[i].empty()) {
            ++failed;
            log << "error: " << files[i].filename().string() << ": " << errors[i] << '\n';
        }
    }
    log << "wrote " << reports << " reports for " << files.size() - failed << " scenes";
    if (failed) log << "; " << failed << " scenes failed";
    log << '\n';
    return failed ? kExitPartialFailure : kExitOk;
}

namespace {

int variant_rank(const std::string& v) {
    if (v == "reward") return 0;
    if (v == "agency") return 1;
    if (v == "hybrid") return 2;
    return 3;
}

void write_metrics(const RunConfig& cfg, const std::vector<MetricRow>& rows, std::size_t skipped,
                   const std::string& hash, std::ostream& log) {
    fs::create_directories(cfg.output_dir);
    {
        std::ofstream out(cfg.output_dir / "metrics.csv");
        out << "# config_hash=" << hash << "; " << kConventionNote << '\n';
        write_metrics_csv(out, rows);
    }
    std::ostringstream summary;
    summary << "config_hash " << hash << '\n' << "convention: " << kConventionNote << '\n';
    if (skipped) summary << "skipped " << skipped << " scenes without ground truth\n";
    std::map<std::string, const MetricRow*> peak;
    for (const auto& r : rows) {
        auto& p = peak[r.variant];
        if (!p || r.f1_mean > p->f1_mean) p = &r;
    }
    for (const auto& [variant, r] : peak) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-8s peak F1 %.3f (precision %.3f, recall %.3f) at lambda %s over %zu scenes, "
                                        "mean wall time %.3f s\n",
                      variant.c_str(), r->f1_mean, r->precision_mean, r->recall_mean, lambda_tag(r->lambda).c_str(),
                      r->n_scenes, r->wall_time_mean_s);
        summary << buf;
    }
    std::ofstream(cfg.output_dir / "summary.txt") << summary.str();
    log << summary.str();
}

} // namespace

int cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto hash = config_hash(cfg);
    const auto report_dir = cfg.output_dir / "reports";
    const auto files = scene_files(report_dir);
    if (files.empty()) {
        log << "error: no reports found in " << report_dir << '\n';
        return kExitInputError;
    }

    std::map<std::string, std::optional<EntityCausalGraph>> truth_cache;
    const auto truth_of = [&](const std::string& scene_id) -> const std::optional<EntityCausalGraph>& {
        auto it = truth_cache.find(scene_id);
        if (it != truth_cache.end()) return it->second;
        std::optional<EntityCausalGraph> truth;
        const auto path = cfg.scene_dir / (sanitize(scene_id) + ".json");
        if (fs::exists(path)) truth = read_scene_file(path).ground_truth;
        return truth_cache.emplace(scene_id, std::move(truth)).first->second;
    };

    using Key = std::pair<std::string, std::optional<double>>;
    std::map<Key, std::pair<std::vector<Scores>, std::vector<double>>> groups;
    std::set<std::string> skipped;
    for (const auto& f : files) {
        const auto rep = read_json_file(f);
        const auto scene_id = rep.at("scene_id").get<std::string>();
        const auto& truth = truth_of(scene_id);
        if (!truth) {
            skipped.insert(scene_id);
            continue;
        }
        EntityCausalGraph pred(rep.at("nodes").get<std::vector<AgentId>>());
        for (const auto& e : rep.at("entity_edges")) pred.add_edge(e[0].get<AgentId>(), e[1].get<AgentId>());
        std::optional<double> lambda;
        if (!rep.at("lambda_dR").is_null()) lambda = rep.at("lambda_dR").get<double>();
        auto& g = groups[{rep.at("variant").get<std::string>(), lambda}];
        g.first.push_back(prf1(confusion(pred, *truth)));
        g.second.push_back(rep.at("wall_time_s").get<double>());
    }
    if (!skipped.empty()) log << "warning: skipped " << skipped.size() << " scenes without ground truth\n";
    if (groups.empty()) {
        log << "error: no report could be scored\n";
        return kExitInputError;
    }
    std::vector<MetricRow> rows;
    for (const auto& [key, g] : groups) rows.push_back(aggregate(key.first, key.second, g.first, g.second));
    std::stable_sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
        return variant_rank(a.variant) < variant_rank(b.variant);
    });
    write_metrics(cfg, rows, skipped.size(), hash, log);
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    RunConfig c = cfg;
    if (c.variants.empty()) c.variants = {TestVariant::reward, TestVariant::agency, TestVariant::hybrid};
    if (c.lambdas.empty()) c.lambdas = default_lambda_grid();
    const int rc = cmd_discover(c, log);
    if (rc == kExitInputError) return rc;
    const int erc = cmd_evaluate(c, log);
    if (erc != kExitOk) return erc;

    if (c.random_baseline_p) {
        std::vector<Scores> scores;
        for (const auto& f : scene_files(c.scene_dir)) {
            const auto scene = read_scene_file(f);
            if (!scene.ground_truth) continue;
            const auto seed = derive_seed(c.seed, std::hash<std::string>{}(scene.id) & 0xffffffffULL);
            scores.push_back(prf1(confusion(random_baseline(scene, *c.random_baseline_p, seed), *scene.ground_truth)));
        }
        std::ofstream out(c.output_dir / "metrics.csv", std::ios::app);
        auto row = aggregate("random", *c.random_baseline_p, scores, {});
        std::ostringstream tmp;
        write_metrics_csv(tmp, {row});
        const auto text = tmp.str();
        out << text.substr(text.find('\n') + 1);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "random   mean F1 %.3f at p %.2f over %zu scenes\n", row.f1_mean,
                      *c.random_baseline_p, row.n_scenes);
        log << buf;
        std::ofstream(c.output_dir / "summary.txt", std::ios::app) << buf;
    }
    return rc;
}

} // namespace cfcd
