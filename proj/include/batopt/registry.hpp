#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "batopt/bat.hpp"
#include "batopt/core.hpp"
#include "batopt/harmony.hpp"
#include "batopt/pso.hpp"

namespace batopt {

/// Numeric tuning options keyed by name; booleans are 0/1.
using OptionMap = std::map<std::string, double, std::less<>>;

/// Common contract for every optimizer: minimize `objective` under `seed`.
using Runner = std::function<RunResult(const Objective&, const OptionMap&, std::uint64_t)>;

class registry_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void reject_unknown(const OptionMap& options, const std::set<std::string, std::less<>>& known,
                           const std::string& who)
{
    for (const auto& [key, value] : options) {
        if (!known.contains(key)) throw parameter_error(who + ": unknown option '" + key + "'");
    }
}

inline std::size_t as_count(double value, const std::string& key)
{
    if (!(value >= 0.0) || value != std::floor(value)) {
        throw parameter_error("option '" + key + "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(value);
}

template <typename T>
void read(const OptionMap& options, std::string_view key, T& out)
{
    auto it = options.find(key);
    if (it == options.end()) return;
    if constexpr (std::is_same_v<T, bool>) {
        out = it->second != 0.0;
    } else if constexpr (std::is_integral_v<T>) {
        out = as_count(it->second, it->first);
    } else {
        out = it->second;
    }
}

} // namespace detail

inline BatParams bat_params_from(const OptionMap& options, BatParams p = {})
{
    detail::reject_unknown(options,
                           {"n", "iterations", "f_min", "f_max", "alpha", "gamma", "A0", "r0",
                            "per_coordinate_eps", "elitist"},
                           "bat");
    detail::read(options, "n", p.n);
    detail::read(options, "iterations", p.iterations);
    detail::read(options, "f_min", p.f_min);
    detail::read(options, "f_max", p.f_max);
    detail::read(options, "alpha", p.alpha);
    detail::read(options, "gamma", p.gamma);
    detail::read(options, "A0", p.A0);
    detail::read(options, "r0", p.r0);
    detail::read(options, "per_coordinate_eps", p.per_coordinate_eps);
    detail::read(options, "elitist", p.elitist);
    p.validate();
    return p;
}

inline PsoParams pso_params_from(const OptionMap& options, PsoParams p = {})
{
    detail::reject_unknown(options, {"n", "iterations", "accel"}, "pso");
    detail::read(options, "n", p.n);
    detail::read(options, "iterations", p.iterations);
    detail::read(options, "accel", p.accel);
    p.validate();
    return p;
}

inline HsParams hs_params_from(const OptionMap& options, HsParams p = {})
{
    detail::reject_unknown(options,
                           {"n", "memory_size", "iterations", "r_accept", "r_pa", "b_p", "improvisations"},
                           "hs");
    detail::read(options, "n", p.memory_size);
    detail::read(options, "memory_size", p.memory_size);
    detail::read(options, "iterations", p.iterations);
    detail::read(options, "r_accept", p.r_accept);
    detail::read(options, "r_pa", p.r_pa);
    detail::read(options, "b_p", p.b_p);
    detail::read(options, "improvisations", p.improvisations);
    p.validate();
    return p;
}

/// Name -> runner table so external optimizers can join comparisons.
class OptimizerRegistry
{
public:
    /// Registry preloaded with "bat", "pso" and "hs".
    static OptimizerRegistry with_builtins()
    {
        OptimizerRegistry registry;
        registry.add("bat", [](const Objective& obj, const OptionMap& opts, std::uint64_t seed) {
            return bat_run(obj, bat_params_from(opts), seed);
        });
        registry.add("pso", [](const Objective& obj, const OptionMap& opts, std::uint64_t seed) {
            return pso_run(obj, pso_params_from(opts), seed);
        });
        registry.add("hs", [](const Objective& obj, const OptionMap& opts, std::uint64_t seed) {
            return hs_run(obj, hs_params_from(opts), seed);
        });
        return registry;
    }

    void add(const std::string& name, Runner runner)
    {
        if (name.empty()) throw registry_error("optimizer name must not be empty");
        if (!runner) throw registry_error("optimizer '" + name + "' has no runner");
        if (!runners_.emplace(name, std::move(runner)).second) {
            throw registry_error("optimizer '" + name + "' is already registered");
        }
    }

    bool contains(std::string_view name) const { return runners_.find(name) != runners_.end(); }

    const Runner& get(std::string_view name) const
    {
        auto it = runners_.find(name);
        if (it == runners_.end()) throw registry_error("unknown optimizer '" + std::string(name) + "'");
        return it->second;
    }

    RunResult run(std::string_view name, const Objective& objective, const OptionMap& options,
                  std::uint64_t seed) const
    {
        return get(name)(objective, options, seed);
    }

    std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        for (const auto& [name, runner] : runners_) out.push_back(name);
        return out;
    }

private:
    std::map<std::string, Runner, std::less<>> runners_;
};

} // namespace batopt
