#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "batopt/core.hpp"
#include "batopt/registry.hpp"

namespace batopt::bench {

inline constexpr int config_version = 1;

class config_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { plain, csv, markdown };

inline OutputFormat output_format_from(std::string_view name)
{
    if (name == "plain") return OutputFormat::plain;
    if (name == "csv") return OutputFormat::csv;
    if (name == "markdown" || name == "md") return OutputFormat::markdown;
    throw config_error("unknown output format '" + std::string(name) + "' (plain, csv, markdown)");
}

/// Parameters of a synthetic data generator. Which fields apply depends on
/// the objective kind.
struct SyntheticSpec
{
    std::size_t n = 500;
    std::vector<double> beta_true;
    std::uint64_t seed = 0;
    double horizon = 1000.0;
    std::vector<double> hawkes_truth{0.2, 0.5, 0.7};
};

struct ObjectiveConfig
{
    /// glm | logbinomial | markov-renewal | hawkes
    std::string kind;
    /// CSV path (resolved) or `bundled:<name>`; empty when synthetic.
    std::string dataset;
    std::string family = "geometric";
    std::optional<SyntheticSpec> synthetic;
    double penalty_weight = 1e4;
};

struct OptimizerConfig
{
    std::string name;
    OptionMap params;
};

struct ExperimentConfig
{
    int version = config_version;
    ObjectiveConfig objective;
    std::optional<Vector> lower;
    std::optional<Vector> upper;
    std::vector<OptimizerConfig> optimizers;
    std::size_t replicates = 1;
    /// Applied to every optimizer that does not set its own `iterations`.
    std::optional<std::size_t> iterations;
    std::uint64_t master_seed = 0;
    std::optional<std::vector<double>> truth;
    std::string output_path;
    OutputFormat format = OutputFormat::plain;
    int precision = 4;

    /// Options handed to optimizer `index`, with the shared iteration budget filled in.
    OptionMap options_for(std::size_t index) const
    {
        OptionMap opts = optimizers.at(index).params;
        if (iterations && !opts.contains("iterations")) opts["iterations"] = static_cast<double>(*iterations);
        return opts;
    }

    void validate(const OptimizerRegistry& registry) const
    {
        if (version != config_version) {
            throw config_error("unsupported config version " + std::to_string(version) + " (expected " +
                               std::to_string(config_version) + ")");
        }
        if (replicates < 1) throw config_error("replicates must be at least 1");
        if (iterations && *iterations < 1) throw config_error("iterations must be at least 1");
        static const std::vector<std::string> kinds{"glm", "logbinomial", "markov-renewal", "hawkes"};
        if (std::find(kinds.begin(), kinds.end(), objective.kind) == kinds.end()) {
            throw config_error("unknown objective kind '" + objective.kind + "'");
        }
        if (objective.dataset.empty() && !objective.synthetic) {
            throw config_error("objective needs a dataset or a synthetic generator");
        }
        if (!objective.dataset.empty() && objective.synthetic) {
            throw config_error("objective has both a dataset and a synthetic generator");
        }
        if (lower.has_value() != upper.has_value()) throw config_error("bounds need both lower and upper");
        if (precision < 0 || precision > 17) throw config_error("precision must be in 0..17");
        for (const auto& opt : optimizers) {
            if (!registry.contains(opt.name)) throw config_error("optimizer '" + opt.name + "' is not registered");
        }
    }
};

namespace detail {

using nlohmann::json;

inline Vector to_vector(const json& j, const std::string& what)
{
    if (!j.is_array()) throw config_error(what + " must be an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw config_error(what + " must be an array of numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

inline std::vector<double> to_std_vector(const json& j, const std::string& what)
{
    const Vector v = to_vector(j, what);
    return {v.data(), v.data() + v.size()};
}

inline std::size_t to_count(const json& j, const std::string& what)
{
    if (!j.is_number_integer() || j.get<long long>() < 0) throw config_error(what + " must be a non-negative integer");
    return j.get<std::size_t>();
}

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known, const std::string& where)
{
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw config_error(where + ": unknown key '" + key + "'");
        }
    }
}

} // namespace detail

/// Parses a version-1 JSON experiment config. Relative dataset and output
/// paths resolve against `base_dir`.
inline ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {})
{
    using detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config must be a JSON object");
    detail::reject_unknown_keys(j,
                                {"version", "objective", "bounds", "optimizers", "replicates", "iterations",
                                 "master_seed", "truth", "output", "comment"},
                                "config");

    const auto resolve = [&](const std::string& p) {
        if (p.empty() || p.rfind("bundled:", 0) == 0) return p;
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? (base_dir / path).lexically_normal().string() : p;
    };

    ExperimentConfig cfg;
    try {
        if (!j.contains("version")) throw config_error("config: missing 'version'");
        cfg.version = j.at("version").get<int>();

        const json& obj = j.at("objective");
        detail::reject_unknown_keys(obj, {"kind", "dataset", "family", "synthetic", "penalty_weight"}, "objective");
        cfg.objective.kind = obj.at("kind").get<std::string>();
        cfg.objective.dataset = resolve(obj.value("dataset", std::string{}));
        cfg.objective.family = obj.value("family", cfg.objective.family);
        cfg.objective.penalty_weight = obj.value("penalty_weight", cfg.objective.penalty_weight);
        if (obj.contains("synthetic")) {
            const json& s = obj.at("synthetic");
            detail::reject_unknown_keys(s, {"n", "beta_true", "seed", "horizon", "truth"}, "objective.synthetic");
            SyntheticSpec spec;
            if (s.contains("n")) spec.n = detail::to_count(s.at("n"), "synthetic.n");
            if (s.contains("beta_true")) spec.beta_true = detail::to_std_vector(s.at("beta_true"), "synthetic.beta_true");
            if (s.contains("seed")) spec.seed = s.at("seed").get<std::uint64_t>();
            spec.horizon = s.value("horizon", spec.horizon);
            if (s.contains("truth")) spec.hawkes_truth = detail::to_std_vector(s.at("truth"), "synthetic.truth");
            cfg.objective.synthetic = std::move(spec);
        }

        if (j.contains("bounds")) {
            const json& b = j.at("bounds");
            detail::reject_unknown_keys(b, {"lower", "upper"}, "bounds");
            cfg.lower = detail::to_vector(b.at("lower"), "bounds.lower");
            cfg.upper = detail::to_vector(b.at("upper"), "bounds.upper");
        }

        if (!j.contains("optimizers") || !j.at("optimizers").is_array()) {
            throw config_error("config: 'optimizers' must be an array");
        }
        for (const json& o : j.at("optimizers")) {
            OptimizerConfig oc;
            if (o.is_string()) {
                oc.name = o.get<std::string>();
            } else {
                detail::reject_unknown_keys(o, {"name", "params"}, "optimizer");
                oc.name = o.at("name").get<std::string>();
                if (o.contains("params")) {
                    for (const auto& [key, value] : o.at("params").items()) {
                        if (value.is_boolean()) oc.params[key] = value.get<bool>() ? 1.0 : 0.0;
                        else if (value.is_number()) oc.params[key] = value.get<double>();
                        else throw config_error("optimizer '" + oc.name + "': parameter '" + key + "' must be numeric");
                    }
                }
            }
            cfg.optimizers.push_back(std::move(oc));
        }

        if (j.contains("replicates")) cfg.replicates = detail::to_count(j.at("replicates"), "replicates");
        if (j.contains("iterations")) cfg.iterations = detail::to_count(j.at("iterations"), "iterations");
        if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("truth")) cfg.truth = detail::to_std_vector(j.at("truth"), "truth");
        if (j.contains("output")) {
            const json& out = j.at("output");
            detail::reject_unknown_keys(out, {"path", "format", "precision"}, "output");
            cfg.output_path = resolve(out.value("path", std::string{}));
            cfg.format = output_format_from(out.value("format", std::string("plain")));
            cfg.precision = out.value("precision", cfg.precision);
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str(), path.parent_path());
    } catch (const config_error& e) {
        throw config_error(path.string() + ": " + e.what());
    }
}

} // namespace batopt::bench
