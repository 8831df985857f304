#include "cfcd/discovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <tuple>

#include "cfcd/errors.hpp"

namespace cfcd {

namespace {

constexpr double kTimeEps = 1e-9;

std::size_t idx(WorldVariant v) { return static_cast<std::size_t>(v); }

double min_reward_of_series(const SimTrace& trace, const AgentSeries& s, double t_effect, double t_omega,
                            const RewardOptions& opts) {
    double best = 1.0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t <= t_effect + kTimeEps || t > t_omega + kTimeEps) continue;
        best = std::min(best, reward_ttc(s.ttc[i]) * reward_cct(s.cct[i], opts) * reward_speed(s.speed[i]));
    }
    return best;
}

} // namespace

const char* to_string(WorldVariant v) {
    switch (v) {
    case WorldVariant::EC: return "E_C";
    case WorldVariant::notE_C: return "notE_C";
    case WorldVariant::E_notC: return "E_notC";
    case WorldVariant::notE_notC: return "notE_notC";
    }
    return "E_C";
}

const char* to_string(TestVariant v) {
    switch (v) {
    case TestVariant::reward: return "reward";
    case TestVariant::agency: return "agency";
    case TestVariant::hybrid: return "hybrid";
    }
    return "agency";
}

TestVariant test_variant_from_string(const std::string& s) {
    if (s == "reward") return TestVariant::reward;
    if (s == "agency") return TestVariant::agency;
    if (s == "hybrid") return TestVariant::hybrid;
    throw InvalidInput("unknown variant '" + s + "' (expected reward, agency or hybrid)");
}

void CdConfig::validate() const {
    if (!(reward_threshold > 0.0 && reward_threshold <= 1.0)) {
        throw InvalidInput("reward threshold must lie in (0, 1]");
    }
    if (!(sim.ttc_horizon > 0.0)) throw InvalidInput("TTC horizon must be positive");
    extract.validate();
}

std::vector<CandidateLink> enumerate_candidates(const DecisionSet& d) {
    std::vector<CandidateLink> out;
    const auto all = d.all();
    for (const auto& c : all) {
        for (const auto& e : all) {
            if (c.agent_id != e.agent_id && c.decision_time < e.decision_time) out.push_back({c, e});
        }
    }
    std::sort(out.begin(), out.end(), [](const CandidateLink& a, const CandidateLink& b) {
        return std::tie(a.cause.decision_time, a.effect.decision_time, a.cause.agent_id, a.effect.agent_id) <
               std::tie(b.cause.decision_time, b.effect.decision_time, b.cause.agent_id, b.effect.agent_id);
    });
    return out;
}

DecisionSet intervene(const DecisionSet& d, const std::vector<Decision>& removed) {
    for (const auto& r : removed) {
        if (!d.contains(r)) {
            throw InvalidInput("cannot remove decision of agent " + std::to_string(r.agent_id) + " at t=" +
                               std::to_string(r.decision_time) + ": not in the decision set");
        }
    }
    DecisionSet out;
    for (const auto& [id, list] : d.by_agent()) {
        std::vector<Decision> kept;
        for (const auto& dec : list) {
            if (std::find(removed.begin(), removed.end(), dec) == removed.end()) kept.push_back(dec);
        }
        out.set_agent(id, std::move(kept));
    }
    return out;
}

double reward_ttc(double ttc) {
    if (std::isinf(ttc)) return 1.0;
    return 1.0 - std::exp(-ttc);
}

double reward_cct(double cct, const RewardOptions& opts) {
    const bool collided = cct > 0.0;
    if (opts.literal_cct_polarity) return collided ? 1.0 : 0.0;
    return collided ? 0.0 : 1.0;
}

double reward_speed(double speed) {
    return 1.0 - 0.5 * std::exp(-std::max(0.1 * speed, 0.0));
}

double reward_at(const SimTrace& trace, AgentId agent, double t, const RewardOptions& opts) {
    const auto& s = trace.series(agent);
    if (trace.times.empty()) throw InvalidInput("empty trace");
    const double dt = trace.times.size() > 1 ? trace.times[1] - trace.times[0] : 1.0;
    const auto k = std::llround((t - trace.times.front()) / dt);
    if (k < 0 || k >= static_cast<long long>(trace.times.size())) throw InvalidInput("time outside trace");
    const auto i = static_cast<std::size_t>(k);
    return reward_ttc(s.ttc[i]) * reward_cct(s.cct[i], opts) * reward_speed(s.speed[i]);
}

double min_reward(const SimTrace& trace, AgentId agent, double t_effect, double t_omega, const RewardOptions& opts) {
    return min_reward_of_series(trace, trace.series(agent), t_effect, t_omega, opts);
}

bool agency_indicator(const SimTrace& trace, AgentId effect_agent, AgentId cause_agent, double t_effect,
                      double t_omega, bool any_collision) {
    if (!trace.has_agent(effect_agent)) return false;
    const auto& ce = trace.series(effect_agent).cct;
    const std::vector<double>* cc = nullptr;
    if (!any_collision) {
        if (!trace.has_agent(cause_agent)) return false;
        cc = &trace.series(cause_agent).cct;
    }
    for (std::size_t i = 1; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t <= t_effect + kTimeEps || t > t_omega + kTimeEps) continue;
        const bool effect_onset = ce[i] > 0.0 && ce[i - 1] <= 0.0;
        if (!effect_onset) continue;
        if (any_collision) return true;
        if ((*cc)[i] > 0.0 && (*cc)[i - 1] <= 0.0) return true;
    }
    return false;
}

std::array<WorldOutcome, 4> run_worlds(const Scene& scene, const DecisionSet& d, const CandidateLink& link,
                                       const CdConfig& cfg) {
    const auto& c = link.cause;
    const auto& e = link.effect;
    const double t_omega = std::min(scene.track(e.agent_id).t_last(), scene.grid.t_end());

    SimConfig sim = cfg.sim;
    if (!(sim.dt > 0.0)) sim.dt = scene.grid.dt;
    sim.start_time = c.decision_time;
    sim.horizon = std::max(0.0, t_omega - c.decision_time);

    const std::array<std::vector<Decision>, 4> removals{
        std::vector<Decision>{}, std::vector<Decision>{e}, std::vector<Decision>{c}, std::vector<Decision>{e, c}};

    std::array<WorldOutcome, 4> out;
    for (auto v : kWorldVariants) {
        auto& o = out[idx(v)];
        o.variant = v;
        o.trace = simulate(scene, intervene(d, removals[idx(v)]), sim);
        if (o.trace.has_agent(e.agent_id)) {
            o.min_reward_after_effect = min_reward(o.trace, e.agent_id, e.decision_time, t_omega, cfg.reward);
        }
        o.agency_loss = agency_indicator(o.trace, e.agent_id, c.agent_id, e.decision_time, t_omega,
                                         cfg.agency_any_collision);
    }
    return out;
}

RewardScore reward_test(const std::array<double, 4>& r, double threshold) {
    RewardScore s;
    s.plus = r[idx(WorldVariant::EC)] - r[idx(WorldVariant::notE_C)];
    s.minus = r[idx(WorldVariant::notE_notC)] - r[idx(WorldVariant::E_notC)];
    s.accepted = s.total() >= threshold;
    return s;
}

AgencyFlags agency_test(const std::array<bool, 4>& a) {
    const bool ec = a[idx(WorldVariant::EC)];
    const bool ne_c = a[idx(WorldVariant::notE_C)];
    const bool e_nc = a[idx(WorldVariant::E_notC)];
    const bool ne_nc = a[idx(WorldVariant::notE_notC)];
    AgencyFlags f;
    f.active = !ec && ne_c && !ne_nc;
    f.passive = !ec && e_nc && !ne_nc;
    f.facilitation = !ec && e_nc && ne_nc;
    f.mutual_effect_motive = !ec && ne_c && ne_nc;
    return f;
}

bool hybrid_test(const AgencyFlags& f, bool reward_accepted) {
    return (f.active || f.passive || reward_accepted) && !(f.facilitation || f.mutual_effect_motive);
}

bool accept_candidate(const CandidateDiagnostics& c, TestVariant variant, double threshold) {
    const bool reward_ok = c.reward.total() >= threshold;
    switch (variant) {
    case TestVariant::reward: return reward_ok;
    case TestVariant::agency: return c.agency.accepted();
    case TestVariant::hybrid: return hybrid_test(c.agency, reward_ok);
    }
    return false;
}

CandidateDiagnostics evaluate_candidate(const Scene& scene, const DecisionSet& d, const CandidateLink& link,
                                        const CdConfig& cfg, std::array<WorldOutcome, 4>* worlds) {
    auto outcomes = run_worlds(scene, d, link, cfg);
    CandidateDiagnostics diag;
    diag.link = link;
    for (auto v : kWorldVariants) {
        diag.min_rewards[idx(v)] = outcomes[idx(v)].min_reward_after_effect;
        diag.agency_loss[idx(v)] = outcomes[idx(v)].agency_loss;
    }
    diag.reward = reward_test(diag.min_rewards, cfg.reward_threshold);
    diag.agency = agency_test(diag.agency_loss);
    if (worlds) *worlds = std::move(outcomes);
    return diag;
}

DiscoveryResult assemble(const DecisionSet& decisions, std::vector<CandidateDiagnostics> candidates,
                         TestVariant variant, double threshold) {
    DiscoveryResult r;
    r.decision_graph.decisions = decisions;
    for (auto& c : candidates) {
        c.reward.accepted = c.reward.total() >= threshold;
        c.accepted = accept_candidate(c, variant, threshold);
        if (c.accepted) r.decision_graph.links.push_back({c.link.cause, c.link.effect});
    }
    r.candidates = std::move(candidates);
    r.entity_graph = entity_projection(r.decision_graph);
    return r;
}

DiscoveryResult discover(const Scene& scene, const CdConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();
    if (scene.tracks.size() < 2) throw InvalidInput("discovery needs at least two agents");
    const auto decisions = extract_scene_decisions(scene, cfg.extract);
    std::vector<CandidateDiagnostics> diags;
    for (const auto& link : enumerate_candidates(decisions)) {
        diags.push_back(evaluate_candidate(scene, decisions, link, cfg));
    }
    auto r = assemble(decisions, std::move(diags), cfg.variant, cfg.reward_threshold);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace cfcd
