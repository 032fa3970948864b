#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "batopt/core.hpp"

namespace batopt {

/// Harmony search. A new coordinate is drawn uniformly with probability
/// 1 - r_accept; otherwise it is copied from a random memory member and,
/// with probability r_pa, shifted by b_p * Uniform(-1,1).
struct HsParams
{
    std::size_t memory_size = 30;
    double r_accept = 0.95;
    double r_pa = 0.3;
    double b_p = 0.05;
    std::size_t iterations = 100;
    /// New harmonies improvised per iteration.
    std::size_t improvisations = 1;

    double p_random() const { return 1.0 - r_accept; }
    double p_pitch() const { return r_accept * r_pa; }

    void validate() const
    {
        if (memory_size < 1) throw parameter_error("HsParams: memory_size must be at least 1");
        if (!(r_accept >= 0.0 && r_accept <= 1.0)) throw parameter_error("HsParams: r_accept must lie in [0,1]");
        if (!(r_pa >= 0.0 && r_pa <= 1.0)) throw parameter_error("HsParams: r_pa must lie in [0,1]");
        if (!(b_p >= 0.0)) throw parameter_error("HsParams: b_p must be non-negative");
        if (improvisations < 1) throw parameter_error("HsParams: improvisations must be at least 1");
    }
};

struct Harmony
{
    Vector x;
    double value = infeasible;
};

/// Sorted best-first.
struct HarmonyMemory
{
    std::vector<Harmony> members;
    std::size_t step = 0;
    std::size_t evals = 0;

    const Harmony& best() const { return members.front(); }
    const Harmony& worst() const { return members.back(); }
};

inline HarmonyMemory hs_init(const Objective& objective, const HsParams& params, std::uint64_t seed)
{
    params.validate();
    auto positions = init_positions(objective.space, params.memory_size, RngStream(seed, stream::init));
    HarmonyMemory memory;
    memory.members.reserve(params.memory_size);
    for (auto& x : positions) {
        const double value = objective(x);
        memory.members.push_back({std::move(x), value});
    }
    std::stable_sort(memory.members.begin(), memory.members.end(),
                     [](const Harmony& a, const Harmony& b) { return a.value < b.value; });
    memory.evals = params.memory_size;
    return memory;
}

/// Improvises one harmony, which replaces the worst member if strictly better.
inline void hs_step(HarmonyMemory& memory, const HsParams& params, const Objective& objective,
                    std::uint64_t seed)
{
    const auto& space = objective.space;
    const std::size_t t = memory.step + 1;
    RngStream rng = RngStream(seed, stream::agents).substream(t);

    Vector x(space.dim());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (rng.uniform() < params.p_random()) {
            x[j] = rng.uniform(space.lower()[j], space.upper()[j]);
        } else {
            x[j] = memory.members[rng.index(memory.members.size())].x[j];
            if (rng.uniform() < params.r_pa) x[j] += params.b_p * rng.uniform(-1.0, 1.0);
        }
    }
    x = clamp_to_bounds(x, space);
    const double value = objective(x);
    ++memory.evals;
    memory.step = t;

    if (value < memory.worst().value) {
        memory.members.back() = {std::move(x), value};
        // keep sorted; ties stay behind existing members
        auto pos = std::upper_bound(memory.members.begin(), memory.members.end() - 1, value,
                                    [](double v, const Harmony& h) { return v < h.value; });
        std::rotate(pos, memory.members.end() - 1, memory.members.end());
    }
}

inline RunResult hs_run(const Objective& objective, const HsParams& params, std::uint64_t seed)
{
    HarmonyMemory memory = hs_init(objective, params, seed);
    RunResult result;
    result.seed = seed;
    result.trace.reserve(params.iterations + 1);
    result.trace.push_back({0, memory.best().value});
    for (std::size_t t = 1; t <= params.iterations; ++t) {
        for (std::size_t k = 0; k < params.improvisations; ++k) hs_step(memory, params, objective, seed);
        result.trace.push_back({t, memory.best().value});
    }
    result.best_x = memory.best().x;
    result.best_f = memory.best().value;
    result.evals = memory.evals;
    return result;
}

} // namespace batopt
