#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfcd/discovery.hpp"
#include "cfcd/scene.hpp"

namespace cfcd {

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Counts over every ordered pair of distinct nodes. Node sets must match.
Confusion confusion(const EntityCausalGraph& pred, const EntityCausalGraph& truth);

/// Precision, recall and F1. An empty prediction of an empty truth scores 1
/// on all three; precision with no predicted edges is 1 only if nothing was missed.
Scores prf1(const Confusion& c);

/// Each ordered pair of distinct scene agents becomes an edge with probability p.
EntityCausalGraph random_baseline(const Scene& scene, double p, std::uint64_t seed);

struct MetricRow {
    std::string variant;
    std::optional<double> lambda;  ///< empty where the variant has no threshold
    double precision_mean = 0.0;
    double recall_mean = 0.0;
    double f1_mean = 0.0;
    double wall_time_mean_s = 0.0;
    std::size_t n_scenes = 0;
};

/// Macro-average of per-scene scores.
MetricRow aggregate(const std::string& variant, std::optional<double> lambda, const std::vector<Scores>& scores,
                    const std::vector<double>& wall_times);

/// 0.01, 0.1, 0.2, ..., 1.0
std::vector<double> default_lambda_grid();

struct SweepResult {
    std::vector<MetricRow> rows;
    std::size_t skipped = 0;  ///< scenes without ground truth
};

/// Discovery over every scene for each threshold. The four-world evaluation
/// is threshold-independent, so it runs once per scene and each threshold
/// re-applies the link test. The agency variant yields a single row.
SweepResult sweep(const std::vector<Scene>& scenes, TestVariant variant, const std::vector<double>& lambdas,
                  const CdConfig& base);

/// Header: variant,lambda,precision_mean,recall_mean,f1_mean,wall_time_mean_s,n_scenes
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);

} // namespace cfcd
