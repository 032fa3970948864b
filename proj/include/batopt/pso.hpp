#pragma once

#include <cstdint>
#include <vector>

#include "batopt/core.hpp"

namespace batopt {

/// Particle swarm without inertia weight: both attraction terms scale a
/// Uniform(0,1) draw by `accel` (2 gives a stochastic factor of mean 1).
struct PsoParams
{
    std::size_t n = 30;
    double accel = 2.0;
    std::size_t iterations = 100;

    void validate() const
    {
        if (n < 1) throw parameter_error("PsoParams: n must be at least 1");
        if (!(accel > 0.0)) throw parameter_error("PsoParams: accel must be positive");
    }
};

struct ParticleState
{
    Vector x;
    Vector v;
    Vector personal_best_x;
    double personal_best_f = infeasible;
};

struct ParticleSwarm
{
    std::vector<ParticleState> particles;
    Vector best_x;
    double best_f = infeasible;
    std::size_t iteration = 0;
    std::size_t evals = 0;
};

/// v' = v + accel r1 (g - x) + accel r2 (p - x) with per-coordinate draws.
inline Vector pso_velocity(const ParticleState& particle, const Vector& global_best_x, const Vector& r1,
                           const Vector& r2, double accel)
{
    return particle.v +
           accel * r1.cwiseProduct(global_best_x - particle.x) +
           accel * r2.cwiseProduct(particle.personal_best_x - particle.x);
}

inline ParticleSwarm pso_init(const Objective& objective, const PsoParams& params, std::uint64_t seed)
{
    params.validate();
    auto positions = init_positions(objective.space, params.n, RngStream(seed, stream::init));
    ParticleSwarm swarm;
    swarm.particles.reserve(params.n);
    for (auto& x : positions) {
        ParticleState p;
        p.personal_best_f = objective(x);
        p.personal_best_x = x;
        p.v = Vector::Zero(x.size());
        p.x = std::move(x);
        swarm.particles.push_back(std::move(p));
    }
    swarm.evals = params.n;
    for (const auto& p : swarm.particles) {
        if (swarm.best_x.size() == 0 || p.personal_best_f < swarm.best_f) {
            swarm.best_x = p.personal_best_x;
            swarm.best_f = p.personal_best_f;
        }
    }
    return swarm;
}

/// One synchronous step. The global best used for attraction is the one
/// known before the step; velocities are capped at the box width.
inline void pso_step(ParticleSwarm& swarm, const PsoParams& params, const Objective& objective,
                     std::uint64_t seed)
{
    const auto& space = objective.space;
    const std::size_t t = swarm.iteration + 1;
    const Vector global_best = swarm.best_x;
    const Vector vmax = space.width();
    const RngStream agents(seed, stream::agents);
    const auto dim = space.dim();

    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        auto& p = swarm.particles[i];
        RngStream rng = agents.substream(i).substream(t);
        Vector r1(dim), r2(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            r1[j] = rng.uniform();
            r2[j] = rng.uniform();
        }
        p.v = pso_velocity(p, global_best, r1, r2, params.accel).cwiseMax(-vmax).cwiseMin(vmax);
        p.x = clamp_to_bounds(p.x + p.v, space);
    }

    for (auto& p : swarm.particles) {
        const double value = objective(p.x);
        if (value < p.personal_best_f) {
            p.personal_best_f = value;
            p.personal_best_x = p.x;
        }
    }
    swarm.evals += swarm.particles.size();

    for (const auto& p : swarm.particles) {
        if (p.personal_best_f < swarm.best_f) {
            swarm.best_f = p.personal_best_f;
            swarm.best_x = p.personal_best_x;
        }
    }
    swarm.iteration = t;
}

inline RunResult pso_run(const Objective& objective, const PsoParams& params, std::uint64_t seed)
{
    ParticleSwarm swarm = pso_init(objective, params, seed);
    RunResult result;
    result.seed = seed;
    result.trace.reserve(params.iterations + 1);
    result.trace.push_back({0, swarm.best_f});
    for (std::size_t t = 0; t < params.iterations; ++t) {
        pso_step(swarm, params, objective, seed);
        result.trace.push_back({swarm.iteration, swarm.best_f});
    }
    result.best_x = swarm.best_x;
    result.best_f = swarm.best_f;
    result.evals = swarm.evals;
    return result;
}

} // namespace batopt
