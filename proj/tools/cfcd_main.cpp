#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "cfcd/errors.hpp"
#include "cfcd/pipeline.hpp"
#include "cfcd/scene_io.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> variant;
    std::optional<double> lambda;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> n;
    std::optional<std::string> input_dir;
    std::optional<std::string> scene_dir;
    std::optional<std::string> output_dir;
    std::optional<double> random_p;
    bool dump_traces = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--variant", o.variant, "link test")->check(CLI::IsMember({"reward", "agency", "hybrid"}));
    cmd->add_option("--lambda", o.lambda, "reward threshold in (0, 1]");
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--dump-traces", o.dump_traces, "write simulation traces as CSV");
    cmd->add_option("--input-dir", o.input_dir, "trajectory CSV directory");
    cmd->add_option("--scene-dir", o.scene_dir, "scene JSON directory");
    cmd->add_option("--output-dir", o.output_dir, "report and metrics directory");
}

cfcd::RunConfig resolve(const Overrides& o) {
    cfcd::RunConfig cfg;
    if (!o.config.empty()) cfg = cfcd::run_config_from_json(cfcd::read_json_file(o.config));
    if (o.variant) cfg.variants = {cfcd::test_variant_from_string(*o.variant)};
    if (o.lambda) cfg.lambdas = {*o.lambda};
    if (o.seed) cfg.seed = *o.seed;
    if (o.workers) cfg.workers = *o.workers;
    if (o.n) cfg.synth_count = *o.n;
    if (o.input_dir) cfg.input_dir = *o.input_dir;
    if (o.scene_dir) cfg.scene_dir = *o.scene_dir;
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.random_p) cfg.random_baseline_p = *o.random_p;
    if (o.dump_traces) cfg.dump_traces = true;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterfactual causal discovery between driving agents"};
    app.require_subcommand(1);
    Overrides o;

    auto* ingest = app.add_subcommand("ingest", "extract causal scenes from trajectory CSVs");
    auto* synth = app.add_subcommand("synth", "generate seeded synthetic convoy scenes");
    synth->add_option("--n", o.n, "number of scenes");
    auto* discover = app.add_subcommand("discover", "run discovery on every scene");
    auto* evaluate = app.add_subcommand("evaluate", "score reports against ground truth");
    auto* sweep = app.add_subcommand("sweep", "discover and evaluate over a threshold grid");
    sweep->add_option("--random-p", o.random_p, "add a random baseline row with this edge probability");
    for (auto* cmd : {ingest, synth, discover, evaluate, sweep}) add_common(cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cfcd::kExitOk : cfcd::kExitInputError;
    }

    try {
        const auto cfg = resolve(o);
        if (*ingest) return cfcd::cmd_ingest(cfg, std::cerr);
        if (*synth) return cfcd::cmd_synth(cfg, std::cerr);
        if (*discover) return cfcd::cmd_discover(cfg, std::cerr);
        if (*evaluate) return cfcd::cmd_evaluate(cfg, std::cerr);
        if (*sweep) return cfcd::cmd_sweep(cfg, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cfcd::kExitInputError;
    }
    return cfcd::kExitInputError;
}
