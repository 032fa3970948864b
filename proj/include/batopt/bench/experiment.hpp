#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "batopt/bench/config.hpp"
#include "batopt/bench/csv.hpp"
#include "batopt/bench/table.hpp"
#include "batopt/estimate.hpp"
#include "batopt/hawkes.hpp"
#include "batopt/registry.hpp"
#include "batopt/rng.hpp"

namespace batopt::bench {

struct BundledDataset
{
    std::string name;
    std::string description;
    GroupedBinomialDataset (*make)();
};

inline const std::vector<BundledDataset>& bundled_datasets()
{
    static const std::vector<BundledDataset> list{
        {"williamson-boundary", "log-binomial, constrained MLE on the boundary", &williamson_boundary},
        {"williamson-infinity", "log-binomial, MLE at infinity (no successes)", &williamson_infinity},
        {"williamson-interior", "log-binomial, MLE in the interior", &williamson_interior},
    };
    return list;
}

inline GroupedBinomialDataset bundled_dataset(std::string_view name)
{
    for (const auto& d : bundled_datasets()) {
        if (d.name == name) return d.make();
    }
    throw config_error("unknown bundled dataset '" + std::string(name) + "'");
}

/// The objective an experiment minimizes, plus the truth used for L2 errors.
struct PreparedObjective
{
    LikelihoodModel model;
    std::optional<Vector> truth;
    std::string description;
};

namespace detail {

inline SearchSpace bounds_or(const ExperimentConfig& cfg, SearchSpace fallback)
{
    if (!cfg.lower) return fallback;
    require_dim(cfg.lower->size(), fallback.dim(), "bounds");
    require_dim(cfg.upper->size(), fallback.dim(), "bounds");
    return SearchSpace(*cfg.lower, *cfg.upper);
}

inline Vector as_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline RngStream synthetic_rng(const SyntheticSpec& s)
{
    return RngStream(s.seed, stream::simulation);
}

} // namespace detail

inline PreparedObjective prepare_objective(const ExperimentConfig& cfg)
{
    const auto& oc = cfg.objective;
    std::optional<LikelihoodModel> model;
    std::optional<Vector> truth;
    std::string description;
    std::vector<std::string> names;
    const bool bundled = oc.dataset.rfind("bundled:", 0) == 0;

    if (oc.kind == "logbinomial") {
        GroupedBinomialDataset data;
        if (oc.synthetic) throw config_error("logbinomial objective has no synthetic generator");
        if (bundled) {
            data = bundled_dataset(oc.dataset.substr(8));
            description = oc.dataset;
        } else {
            auto loaded = load_csv_dataset(oc.dataset, Schema::grouped_binomial);
            names = loaded.coef_names;
            data = std::get<GroupedBinomialDataset>(std::move(loaded.value));
            description = loaded.report();
        }
        model = logbinomial_model(data, detail::bounds_or(cfg, SearchSpace::cube(data.cols(), -10, 10)),
                                      oc.penalty_weight);
    } else if (oc.kind == "glm") {
        const GlmFamily family = glm_family_from(oc.family);
        GlmDataset data;
        if (bundled) throw config_error("no bundled GLM datasets");
        if (oc.synthetic) {
            const auto& s = *oc.synthetic;
            if (s.beta_true.empty()) throw config_error("synthetic glm needs beta_true");
            data = synthetic_glm(family, static_cast<Eigen::Index>(s.n), detail::as_vector(s.beta_true),
                                 detail::synthetic_rng(s));
            truth = detail::as_vector(s.beta_true);
            description = "synthetic " + std::string(to_string(family)) + " n=" + std::to_string(s.n);
        } else {
            auto loaded = load_csv_dataset(oc.dataset, Schema::glm);
            names = loaded.coef_names;
            data = std::get<GlmDataset>(std::move(loaded.value));
            description = loaded.report();
        }
        model = glm_model(data, family, detail::bounds_or(cfg, SearchSpace::cube(data.cols(), -10, 10)));
    } else if (oc.kind == "markov-renewal") {
        MultiStateDataset data;
        if (bundled) throw config_error("no bundled multistate datasets");
        if (oc.synthetic) {
            const auto& s = *oc.synthetic;
            if (s.beta_true.size() != 1) throw config_error("synthetic markov-renewal needs one beta_true value");
            data = synthetic_two_state(s.n, s.beta_true[0], detail::synthetic_rng(s));
            truth = detail::as_vector(s.beta_true);
            description = "synthetic two-state, " + std::to_string(s.n) + " individuals";
        } else {
            auto loaded = load_csv_dataset(oc.dataset, Schema::multistate);
            names = loaded.coef_names;
            data = std::get<MultiStateDataset>(std::move(loaded.value));
            description = loaded.report();
        }
        const auto p = data.num_covariates();
        model = markov_renewal_model(data, detail::bounds_or(cfg, SearchSpace::cube(p, -10, 10)));
    } else if (oc.kind == "hawkes") {
        EventSequence events;
        if (bundled) throw config_error("no bundled event datasets");
        if (oc.synthetic) {
            const auto& s = *oc.synthetic;
            truth = detail::as_vector(s.hawkes_truth);
            events = ogata_simulate(HawkesParams::from_vector(*truth), s.horizon, detail::synthetic_rng(s));
            description = "synthetic hawkes, T=" + detail::fixed(s.horizon, 1) + ", " +
                          std::to_string(events.size()) + " events";
        } else {
            auto loaded = load_csv_dataset(oc.dataset, Schema::events);
            events = std::get<EventSequence>(std::move(loaded.value));
            description = loaded.report();
        }
        model = LikelihoodModel{hawkes_objective(std::move(events), detail::bounds_or(cfg, hawkes_search_space()),
                                                 oc.penalty_weight),
                                {},
                                {},
                                {"nu", "alpha", "beta"}};
    } else {
        throw config_error("unknown objective kind '" + oc.kind + "'");
    }

    if (!names.empty()) model->coef_names = names;
    if (cfg.truth) truth = detail::as_vector(*cfg.truth);
    if (truth) require_dim(truth->size(), model->objective.space.dim(), "truth");
    return {std::move(*model), std::move(truth), std::move(description)};
}

/// Seed of replicate `rep` of optimizer `index`: distinct per optimizer.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t index, std::size_t rep)
{
    return batopt::detail::derive_key(batopt::detail::derive_key(master_seed, index + 1), rep);
}

/// Mean squared componentwise error.
inline double mean_squared_error(const Vector& est, const Vector& truth)
{
    require_dim(est.size(), truth.size(), "mean_squared_error");
    return (est - truth).squaredNorm() / static_cast<double>(truth.size());
}

/// Runs every optimizer for every replicate. Runs execute on `threads`
/// workers (0 = hardware concurrency); results land in per-run slots so the
/// table does not depend on scheduling.
inline ResultTable run_experiment(const ExperimentConfig& cfg,
                                  const OptimizerRegistry& registry = OptimizerRegistry::with_builtins(),
                                  unsigned threads = 0)
{
    cfg.validate(registry);
    const PreparedObjective prepared = prepare_objective(cfg);

    ResultTable table;
    table.objective = prepared.description;
    table.param_names = prepared.model.coef_names;
    table.has_l2 = prepared.truth.has_value();

    const std::size_t reps = cfg.replicates;
    std::vector<std::vector<Cell>> cells(cfg.optimizers.size(), std::vector<Cell>(reps));
    std::vector<OptionMap> options;
    for (std::size_t o = 0; o < cfg.optimizers.size(); ++o) options.push_back(cfg.options_for(o));

    const std::size_t total = cfg.optimizers.size() * reps;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            const std::size_t o = job / reps;
            const std::size_t r = job % reps;
            Cell& cell = cells[o][r];
            cell.replicate = r;
            cell.seed = replicate_seed(cfg.master_seed, o, r);
            const auto start = std::chrono::steady_clock::now();
            try {
                const auto report =
                    fit_model(prepared.model, registry, cfg.optimizers[o].name, options[o], cell.seed);
                cell.coef = report.coef;
                cell.nll = report.nll;
                cell.se = report.se;
                cell.covariance_ok = report.covariance_ok;
                cell.ok = std::isfinite(report.nll);
                if (!cell.ok) cell.error = report.note;
                if (prepared.truth) cell.l2 = mean_squared_error(report.coef, *prepared.truth);
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };

    unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(total, 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }

    for (std::size_t o = 0; o < cfg.optimizers.size(); ++o) {
        table.rows.push_back(summarize_cells(cfg.optimizers[o].name, std::move(cells[o]), table.param_names.size()));
    }
    return table;
}

} // namespace batopt::bench
