#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cfcd/decisions.hpp"
#include "cfcd/scene.hpp"
#include "cfcd/sim.hpp"

namespace cfcd {

/// The four intervened decision sets evaluated per candidate link. The
/// enumerator value is the index into per-world arrays.
enum class WorldVariant { EC = 0, notE_C = 1, E_notC = 2, notE_notC = 3 };

inline constexpr std::array<WorldVariant, 4> kWorldVariants{WorldVariant::EC, WorldVariant::notE_C,
                                                           WorldVariant::E_notC, WorldVariant::notE_notC};

const char* to_string(WorldVariant v);

enum class TestVariant { reward, agency, hybrid };

const char* to_string(TestVariant v);
TestVariant test_variant_from_string(const std::string& s);

struct CandidateLink {
    Decision cause;
    Decision effect;

    bool operator==(const CandidateLink&) const = default;
};

struct RewardOptions {
    /// Reward 1 while the agent has collided, as the formula is printed.
    /// Off by default: collisions zero the reward.
    bool literal_cct_polarity = false;
};

struct CdConfig {
    TestVariant variant = TestVariant::agency;
    double reward_threshold = 1.0;  ///< lambda_dR, in (0, 1]
    SimConfig sim;                  ///< dt <= 0 means "use the scene grid step"
    ExtractConfig extract;
    RewardOptions reward;
    /// Count any collision of the effect agent as agency loss, not only a
    /// joint onset with the cause agent.
    bool agency_any_collision = false;

    void validate() const;
};

struct WorldOutcome {
    WorldVariant variant = WorldVariant::EC;
    SimTrace trace;
    double min_reward_after_effect = 1.0;
    bool agency_loss = false;
};

struct RewardScore {
    double plus = 0.0;   ///< advantage of E given C
    double minus = 0.0;  ///< disadvantage of E without C
    bool accepted = false;

    double total() const { return plus + minus; }
};

struct AgencyFlags {
    bool active = false;
    bool passive = false;
    bool facilitation = false;
    bool mutual_effect_motive = false;

    bool accepted() const { return (active || passive) && !(facilitation || mutual_effect_motive); }
};

struct CandidateDiagnostics {
    CandidateLink link;
    std::array<double, 4> min_rewards{};
    std::array<bool, 4> agency_loss{};
    RewardScore reward;  ///< accepted flag evaluated at the run's threshold
    AgencyFlags agency;
    bool accepted = false;
};

struct DiscoveryResult {
    DecisionCausalGraph decision_graph;
    EntityCausalGraph entity_graph;
    std::vector<CandidateDiagnostics> candidates;
    double wall_time_s = 0.0;
};

/// Ordered cross-agent decision pairs with strictly increasing time, sorted
/// by cause time, effect time, then agent ids.
std::vector<CandidateLink> enumerate_candidates(const DecisionSet& d);

/// `d` without `removed`; throws InvalidInput if any removed decision is absent.
DecisionSet intervene(const DecisionSet& d, const std::vector<Decision>& removed);

double reward_ttc(double ttc);
double reward_cct(double cct, const RewardOptions& opts = {});
double reward_speed(double speed);

/// Product reward of `agent` at trace time `t` (nearest sample).
double reward_at(const SimTrace& trace, AgentId agent, double t, const RewardOptions& opts = {});

/// Minimum reward over samples in (t_effect, t_omega]; 1 when the window is empty.
double min_reward(const SimTrace& trace, AgentId agent, double t_effect, double t_omega,
                  const RewardOptions& opts = {});

/// Agency loss of the effect agent in (t_effect, t_omega]: both agents' collision
/// time leaves zero on the same step (or only the effect agent's, when
/// `any_collision` is set).
bool agency_indicator(const SimTrace& trace, AgentId effect_agent, AgentId cause_agent, double t_effect,
                      double t_omega, bool any_collision = false);

/// Simulates the four intervened worlds from the cause decision time up to
/// t_omega = min(last capture of the effect agent, scene end).
std::array<WorldOutcome, 4> run_worlds(const Scene& scene, const DecisionSet& d, const CandidateLink& link,
                                       const CdConfig& cfg);

/// Indexed by WorldVariant.
RewardScore reward_test(const std::array<double, 4>& min_rewards, double threshold);
AgencyFlags agency_test(const std::array<bool, 4>& agency_loss);
bool hybrid_test(const AgencyFlags& flags, bool reward_accepted);

/// Link decision for one candidate under `variant` at `threshold`.
bool accept_candidate(const CandidateDiagnostics& c, TestVariant variant, double threshold);

/// Builds decision- and entity-level graphs from already evaluated candidates.
/// Candidate acceptance flags are recomputed for (variant, threshold).
DiscoveryResult assemble(const DecisionSet& decisions, std::vector<CandidateDiagnostics> candidates,
                         TestVariant variant, double threshold);

/// Full pipeline: extract decisions, evaluate every candidate in four worlds,
/// apply the configured link test.
DiscoveryResult discover(const Scene& scene, const CdConfig& cfg);

/// Four-world evaluation of one candidate, without the accept decision.
CandidateDiagnostics evaluate_candidate(const Scene& scene, const DecisionSet& d, const CandidateLink& link,
                                        const CdConfig& cfg, std::array<WorldOutcome, 4>* worlds = nullptr);

} // namespace cfcd
