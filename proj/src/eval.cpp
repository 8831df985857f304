#include "cfcd/eval.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>
#include <random>

#include "cfcd/errors.hpp"

namespace cfcd {

Confusion confusion(const EntityCausalGraph& pred, const EntityCausalGraph& truth) {
    if (pred.nodes() != truth.nodes()) throw InvalidInput("predicted and true graphs have different node sets");
    Confusion c;
    for (auto a : truth.nodes()) {
        for (auto b : truth.nodes()) {
            if (a == b) continue;
            const bool p = pred.has_edge(a, b);
            const bool t = truth.has_edge(a, b);
            if (p && t) ++c.tp;
            else if (p) ++c.fp;
            else if (t) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

Scores prf1(const Confusion& c) {
    Scores s;
    const auto tp = static_cast<double>(c.tp);
    s.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : (c.fn == 0 ? 1.0 : 0.0);
    s.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 1.0;
    const auto denom = 2 * c.tp + c.fp + c.fn;
    s.f1 = denom == 0 ? 1.0 : 2.0 * tp / static_cast<double>(denom);
    return s;
}

EntityCausalGraph random_baseline(const Scene& scene, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("edge probability must lie in [0, 1]");
    std::mt19937_64 engine(seed);
    EntityCausalGraph g(scene.agent_ids());
    for (auto a : g.nodes()) {
        for (auto b : g.nodes()) {
            if (a == b) continue;
            const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
            if (u < p) g.add_edge(a, b);
        }
    }
    return g;
}

MetricRow aggregate(const std::string& variant, std::optional<double> lambda, const std::vector<Scores>& scores,
                    const std::vector<double>& wall_times) {
    MetricRow row;
    row.variant = variant;
    row.lambda = lambda;
    row.n_scenes = scores.size();
    if (scores.empty()) return row;
    for (const auto& s : scores) {
        row.precision_mean += s.precision;
        row.recall_mean += s.recall;
        row.f1_mean += s.f1;
    }
    const auto n = static_cast<double>(scores.size());
    row.precision_mean /= n;
    row.recall_mean /= n;
    row.f1_mean /= n;
    double total = 0.0;
    for (double t : wall_times) total += t;
    row.wall_time_mean_s = wall_times.empty() ? 0.0 : total / static_cast<double>(wall_times.size());
    return row;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid{0.01};
    for (int i = 1; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    return grid;
}

SweepResult sweep(const std::vector<Scene>& scenes, TestVariant variant, const std::vector<double>& lambdas,
                  const CdConfig& base) {
    struct Evaluated {
        DecisionSet decisions;
        std::vector<CandidateDiagnostics> candidates;
        EntityCausalGraph truth;
        double wall_time_s;
    };
    SweepResult out;
    std::vector<Evaluated> evaluated;
    for (const auto& scene : scenes) {
        if (!scene.ground_truth) {
            ++out.skipped;
            continue;
        }
        const auto r = discover(scene, base);
        evaluated.push_back({r.decision_graph.decisions, r.candidates, *scene.ground_truth, r.wall_time_s});
    }

    std::vector<std::optional<double>> cells;
    if (variant == TestVariant::agency) cells.push_back(std::nullopt);
    else cells.assign(lambdas.begin(), lambdas.end());

    for (const auto& lambda : cells) {
        std::vector<Scores> scores;
        std::vector<double> times;
        for (const auto& e : evaluated) {
            const auto r = assemble(e.decisions, e.candidates, variant, lambda.value_or(base.reward_threshold));
            scores.push_back(prf1(confusion(r.entity_graph, e.truth)));
            times.push_back(e.wall_time_s);
        }
        out.rows.push_back(aggregate(to_string(variant), lambda, scores, times));
    }
    return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "variant,lambda,precision_mean,recall_mean,f1_mean,wall_time_mean_s,n_scenes\n";
    char buf[256];
    for (const auto& r : rows) {
        std::string lambda = r.lambda ? std::to_string(*r.lambda) : "NA";
        if (r.lambda) {
            std::snprintf(buf, sizeof(buf), "%.17g", *r.lambda);
            lambda = buf;
        }
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%zu", r.precision_mean, r.recall_mean, r.f1_mean,
                      r.wall_time_mean_s, r.n_scenes);
        out << r.variant << ',' << lambda << ',' << buf << '\n';
    }
}

} // namespace cfcd
