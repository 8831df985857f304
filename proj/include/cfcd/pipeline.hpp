#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfcd/decisions.hpp"
#include "cfcd/discovery.hpp"
#include "cfcd/ingest.hpp"
#include "cfcd/synth.hpp"

namespace cfcd {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitPartialFailure = 2 };

struct RunConfig {
    std::filesystem::path input_dir = "data";
    std::filesystem::path scene_dir = "scenes";
    std::filesystem::path output_dir = "out";

    ExtractConfig extract;
    SceneExtractionParams scene_extraction;
    ColumnRenames column_renames;

    /// Empty: discover runs the agency variant, sweep runs all three.
    std::vector<TestVariant> variants;
    /// Empty: discover uses 1.0, sweep uses the default grid.
    std::vector<double> lambdas;
    double ttc_horizon = 20.0;
    bool literal_cct_polarity = false;
    bool agency_any_collision = false;
    std::optional<double> random_baseline_p;  ///< adds a baseline row to sweeps

    std::size_t synth_count = 0;
    SyntheticSpec synth_spec;

    std::uint64_t seed = 1;
    std::size_t workers = 1;
    bool dump_traces = false;

    void validate() const;
    /// Discovery settings for one (variant, threshold) cell.
    CdConfig cd_config(TestVariant variant, double lambda) const;
};

/// Reads the JSON config tree; keys absent from `j` keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a over the canonical config dump, excluding the worker count.
std::string config_hash(const RunConfig& cfg);

/// Runs fn(i) for i in [0, n) on `workers` threads. Output order is the
/// caller's responsibility (write into slot i).
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Discovery report for one scene and one (variant, threshold) cell.
nlohmann::json discovery_report(const std::string& scene_id, const DiscoveryResult& r, TestVariant variant,
                                std::optional<double> lambda, const std::string& hash);

int cmd_ingest(const RunConfig& cfg, std::ostream& log);
int cmd_synth(const RunConfig& cfg, std::ostream& log);
int cmd_discover(const RunConfig& cfg, std::ostream& log);
int cmd_evaluate(const RunConfig& cfg, std::ostream& log);
/// discover + evaluate over the configured variants and threshold list.
int cmd_sweep(const RunConfig& cfg, std::ostream& log);

} // namespace cfcd
