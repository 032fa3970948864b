#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "batopt/core.hpp"

namespace batopt {

/// Tuning constants for the basic bat algorithm.
struct BatParams
{
    std::size_t n = 100;
    double f_min = 0.0;
    double f_max = 5.0;
    double alpha = 0.95;  ///< loudness decay per accepted move
    double gamma = 0.9;   ///< emission-rate growth
    double A0 = 0.9;      ///< initial loudness
    double r0 = 0.9;      ///< emission-rate ceiling
    std::size_t iterations = 100;
    /// Draw an independent epsilon per coordinate in the local search; with
    /// false one scalar moves every coordinate by the same amount.
    bool per_coordinate_eps = true;
    /// Update the global best from every evaluated candidate, not only accepted ones.
    bool elitist = true;

    /// Tuned defaults with 100 bats.
    static BatParams tuned() { return {}; }

    /// Same constants with 20 bats and 2000 iterations.
    static BatParams small_swarm()
    {
        BatParams p;
        p.n = 20;
        p.iterations = 2000;
        return p;
    }

    void validate() const
    {
        if (n < 1) throw parameter_error("BatParams: n must be at least 1");
        if (!(f_min < f_max)) throw parameter_error("BatParams: f_min must be below f_max");
        if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("BatParams: alpha must lie in (0,1)");
        if (!(gamma > 0.0)) throw parameter_error("BatParams: gamma must be positive");
        if (!(A0 > 0.0)) throw parameter_error("BatParams: A0 must be positive");
        if (!(r0 > 0.0 && r0 <= 1.0)) throw parameter_error("BatParams: r0 must lie in (0,1]");
    }
};

struct BatState
{
    Vector x;             ///< accepted position
    Vector v;             ///< velocity
    double fitness = infeasible;
    double f = 0.0;       ///< frequency
    double A = 0.0;       ///< loudness
    double r = 0.0;       ///< emission rate
    std::size_t accepted = 0;
};

struct BatSwarm
{
    std::vector<BatState> bats;
    Vector best_x;
    double best_f = infeasible;
    std::size_t iteration = 0;
    std::size_t evals = 0;

    double mean_loudness() const
    {
        if (bats.empty()) return 0.0;
        double sum = 0.0;
        for (const auto& bat : bats) sum += bat.A;
        return sum / static_cast<double>(bats.size());
    }
};

inline double update_loudness(double A_prev, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw parameter_error("update_loudness: alpha must lie in (0,1)");
    }
    return alpha * A_prev;
}

inline double update_emission_rate(double r0, double gamma, std::size_t t)
{
    return r0 * -std::expm1(-gamma * static_cast<double>(t));
}

inline double draw_frequency(double f_min, double f_max, double beta)
{
    return f_min + (f_max - f_min) * beta;
}

struct VelocityPosition
{
    Vector v;
    Vector x;
};

/// v' = v + (x - best) f, x' = clamp(x + v').
inline VelocityPosition update_velocity_position(const BatState& bat, const Vector& best_x, double f,
                                                 const SearchSpace& space)
{
    require_dim(bat.x.size(), space.dim(), "update_velocity_position position");
    require_dim(bat.v.size(), space.dim(), "update_velocity_position velocity");
    require_dim(best_x.size(), space.dim(), "update_velocity_position best");
    Vector v = bat.v + (bat.x - best_x) * f;
    Vector x = clamp_to_bounds(bat.x + v, space);
    return {std::move(v), std::move(x)};
}

/// Random walk around the incumbent scaled by the swarm's mean loudness.
inline Vector local_search_step(const Vector& best_x, double mean_loudness, double eps,
                                const SearchSpace& space)
{
    return clamp_to_bounds(best_x.array() + eps * mean_loudness, space);
}

inline Vector local_search_step(const Vector& best_x, double mean_loudness, const Vector& eps,
                                const SearchSpace& space)
{
    require_dim(eps.size(), best_x.size(), "local_search_step eps");
    return clamp_to_bounds(best_x + eps * mean_loudness, space);
}

/// Uniform initial positions, zero velocities, uniform frequencies.
inline BatSwarm bat_init(const Objective& objective, const BatParams& params, std::uint64_t seed)
{
    params.validate();
    const auto& space = objective.space;
    RngStream init_rng(seed, stream::init);
    auto positions = init_positions(space, params.n, init_rng.substream(0));
    RngStream freq_rng = init_rng.substream(1);

    BatSwarm swarm;
    swarm.bats.reserve(params.n);
    for (auto& x : positions) {
        BatState bat;
        bat.fitness = objective(x);
        bat.x = std::move(x);
        bat.v = Vector::Zero(space.dim());
        bat.f = freq_rng.uniform(params.f_min, params.f_max);
        bat.A = params.A0;
        bat.r = update_emission_rate(params.r0, params.gamma, 0);
        swarm.bats.push_back(std::move(bat));
    }
    swarm.evals = params.n;

    std::size_t best = 0;
    for (std::size_t i = 1; i < swarm.bats.size(); ++i) {
        if (swarm.bats[i].fitness < swarm.bats[best].fitness) best = i;
    }
    swarm.best_x = swarm.bats[best].x;
    swarm.best_f = swarm.bats[best].fitness;
    return swarm;
}

/// One synchronous iteration. The incumbent and mean loudness are frozen at
/// the start of the iteration and every draw of bat i at iteration t comes
/// from substream (seed, i, t), so the update order of bats cannot matter.
inline void bat_step(BatSwarm& swarm, const BatParams& params, const Objective& objective,
                     std::uint64_t seed)
{
    const auto& space = objective.space;
    const std::size_t t = swarm.iteration + 1;
    const Vector best_x = swarm.best_x;
    const double mean_A = swarm.mean_loudness();
    const RngStream agents(seed, stream::agents);

    struct Proposal
    {
        Vector x;
        double value = infeasible;
        double accept_draw = 1.0;
    };
    std::vector<Proposal> proposals(swarm.bats.size());

    for (std::size_t i = 0; i < swarm.bats.size(); ++i) {
        auto& bat = swarm.bats[i];
        RngStream rng = agents.substream(i).substream(t);

        bat.f = draw_frequency(params.f_min, params.f_max, rng.uniform());
        auto moved = update_velocity_position(bat, best_x, bat.f, space);
        bat.v = std::move(moved.v);
        Vector candidate = std::move(moved.x);

        if (rng.uniform() > bat.r) {
            if (params.per_coordinate_eps) {
                Vector eps(space.dim());
                for (Eigen::Index j = 0; j < eps.size(); ++j) eps[j] = rng.uniform(-1.0, 1.0);
                candidate = local_search_step(best_x, mean_A, eps, space);
            } else {
                candidate = local_search_step(best_x, mean_A, rng.uniform(-1.0, 1.0), space);
            }
        }
        proposals[i].accept_draw = rng.uniform();
        proposals[i].x = std::move(candidate);
    }

    for (auto& p : proposals) p.value = objective(p.x);
    swarm.evals += proposals.size();

    for (std::size_t i = 0; i < swarm.bats.size(); ++i) {
        auto& bat = swarm.bats[i];
        auto& p = proposals[i];
        const bool accepted = p.accept_draw < bat.A && p.value < bat.fitness;
        if (accepted) {
            bat.x = p.x;
            bat.fitness = p.value;
            bat.A = update_loudness(bat.A, params.alpha);
            ++bat.accepted;
            bat.r = update_emission_rate(params.r0, params.gamma, bat.accepted);
        }
        if ((accepted || params.elitist) && p.value < swarm.best_f) {
            swarm.best_x = p.x;
            swarm.best_f = p.value;
        }
    }
    swarm.iteration = t;
}

inline RunResult bat_run(const Objective& objective, const BatParams& params, std::uint64_t seed)
{
    BatSwarm swarm = bat_init(objective, params, seed);
    RunResult result;
    result.seed = seed;
    result.trace.reserve(params.iterations + 1);
    result.trace.push_back({0, swarm.best_f});
    for (std::size_t t = 0; t < params.iterations; ++t) {
        bat_step(swarm, params, objective, seed);
        result.trace.push_back({swarm.iteration, swarm.best_f});
    }
    result.best_x = swarm.best_x;
    result.best_f = swarm.best_f;
    result.evals = swarm.evals;
    return result;
}

} // namespace batopt
