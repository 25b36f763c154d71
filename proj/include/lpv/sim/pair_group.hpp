#pragma once

#include <cstdint>
#include <vector>

#include "lpv/sim/violations.hpp"

namespace lpv::sim {

// Seed discipline: fixed within a subgroup, different across subgroups,
// all derived from the global seed.
inline std::uint64_t variation_seed(std::uint64_t global_seed, ScenarioId scenario,
                                    int variation_index) {
    return derive_seed(global_seed, 0x76617269ULL, static_cast<std::uint64_t>(scenario),
                       static_cast<std::uint64_t>(variation_index));
}

struct PairGroupTrajectories {
    PairGroupSpec spec;
    ScenarioSpec scenario_spec;
    std::vector<SceneTrajectory> valids;
    std::vector<SceneTrajectory> invalids;
};

// One subgroup: M valid trajectories under micro-perturbed seeds plus one
// invalid per violation kind, all injected into the first valid.
inline PairGroupTrajectories build_pair_group(const PairGroupSpec& group,
                                              int frame_count = 16, double frame_dt = 1.0 / 24.0,
                                              const std::map<std::string, double>* magnitudes = nullptr) {
    if (group.valid_count < 1) throw ConfigParseError("pair group needs at least one valid clip");
    PairGroupTrajectories out;
    out.spec = group;
    out.scenario_spec =
        build_scenario_spec(group.scenario_id, group.variation_seed, frame_count, frame_dt);
    for (int m = 0; m < group.valid_count; ++m) {
        const std::uint64_t micro =
            derive_seed(group.variation_seed, 0x6d696372ULL, static_cast<std::uint64_t>(m));
        out.valids.push_back(simulate_scenario(out.scenario_spec, micro));
    }
    const SceneTrajectory& base = out.valids.front();
    for (std::size_t vi = 0; vi < group.violation_kinds.size(); ++vi) {
        const ViolationKind kind = group.violation_kinds[vi];
        const std::uint64_t vseed =
            derive_seed(group.variation_seed, 0x76696f6cULL, static_cast<std::uint64_t>(kind));
        const int onset = choose_onset(kind, base, vseed);
        out.invalids.push_back(inject_violation(base, kind, onset, vseed, magnitudes));
    }
    return out;
}

} // namespace lpv::sim
