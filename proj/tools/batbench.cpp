// batbench: seeded multi-replicate optimizer comparisons on likelihood objectives.
//
//   batbench run <config.json> [--seed N] [--format plain|csv|markdown] [--out FILE]
//                              [--replicates N] [--iterations N]
//   batbench validate <config.json>
//   batbench datasets list
//   batbench demo williamson|hawkes

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "batopt/batopt.hpp"

using namespace batopt;
using namespace batopt::bench;

namespace {

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::optional<std::size_t> replicates;
    std::optional<std::size_t> iterations;
    std::optional<int> precision;
    bool timing = false;
    unsigned threads = 0;
};

void apply(ExperimentConfig& cfg, const Overrides& o)
{
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.format) cfg.format = output_format_from(*o.format);
    if (o.out) cfg.output_path = *o.out;
    if (o.replicates) cfg.replicates = *o.replicates;
    if (o.precision) cfg.precision = *o.precision;
    if (o.iterations) {
        cfg.iterations = *o.iterations;
        for (auto& opt : cfg.optimizers) opt.params.erase("iterations");
    }
}

void report_failures(const ResultTable& table)
{
    for (const auto& row : table.rows) {
        if (row.failures == 0) continue;
        std::cerr << row.optimizer << ": " << row.failures << " of " << row.runs << " runs failed\n";
        for (const auto& cell : row.cells) {
            if (!cell.ok) std::cerr << "  replicate " << cell.replicate << ": " << cell.error << '\n';
        }
    }
}

std::string run_config(ExperimentConfig& cfg, const Overrides& o, const std::string& title = {})
{
    apply(cfg, o);
    const auto table = run_experiment(cfg, OptimizerRegistry::with_builtins(), o.threads);
    std::cerr << (title.empty() ? "" : title + ": ") << table.objective << ", " << cfg.replicates
              << " replicates\n";
    report_failures(table);
    return emit_table(table, cfg.format, cfg.precision, o.timing);
}

int write_output(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path);
    if (!out) throw config_error("cannot write '" + path + "'");
    out << text;
    return 0;
}

const char* williamson_demo = R"({
  "version": 1,
  "objective": {"kind": "logbinomial", "dataset": "bundled:williamson-boundary"},
  "bounds": {"lower": [-10, -10], "upper": [10, 10]},
  "optimizers": [{"name": "bat", "params": {"n": 100}}],
  "replicates": 100,
  "iterations": 100,
  "master_seed": 0,
  "output": {"format": "plain", "precision": 4}
})";

const char* hawkes_demo = R"({
  "version": 1,
  "objective": {"kind": "hawkes", "synthetic": {"truth": [0.2, 0.5, 0.7], "horizon": 1430, "seed": 0}},
  "optimizers": [
    {"name": "bat", "params": {"n": 30}},
    {"name": "pso", "params": {"n": 30}},
    {"name": "hs", "params": {"memory_size": 30}}
  ],
  "replicates": 100,
  "iterations": 300,
  "master_seed": 0,
  "output": {"format": "plain", "precision": 3}
})";

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bat algorithm and comparators for likelihood estimation"};
    app.require_subcommand(1);

    Overrides o;
    const auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "Master seed");
        cmd->add_option("--format", o.format, "plain, csv or markdown");
        cmd->add_option("--out", o.out, "Write the table to this file");
        cmd->add_option("--replicates", o.replicates, "Replicates per optimizer")->check(CLI::PositiveNumber);
        cmd->add_option("--iterations", o.iterations, "Iterations for every optimizer")->check(CLI::PositiveNumber);
        cmd->add_option("--precision", o.precision, "Decimal places")->check(CLI::Range(0, 17));
        cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
        cmd->add_flag("--timing", o.timing, "Add a wall-clock column (output no longer reproducible)");
    };

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
    add_overrides(run);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config and load its dataset");
    validate->add_option("config", validate_path, "JSON config")->required()->check(CLI::ExistingFile);

    auto* datasets = app.add_subcommand("datasets", "Bundled datasets");
    datasets->add_subcommand("list", "List bundled datasets and CSV schemas");
    datasets->require_subcommand(1);

    std::string demo_name;
    auto* demo = app.add_subcommand("demo", "Run a bundled demonstration");
    demo->add_option("name", demo_name, "williamson or hawkes")
        ->required()
        ->check(CLI::IsMember({"williamson", "hawkes"}));
    add_overrides(demo);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = load_config(config_path);
            const auto text = run_config(cfg, o);
            return write_output(cfg.output_path, text);
        }

        if (*validate) {
            const auto cfg = load_config(validate_path);
            const auto registry = OptimizerRegistry::with_builtins();
            cfg.validate(registry);
            const auto prepared = prepare_objective(cfg);
            std::cout << "ok: " << cfg.objective.kind << ", " << prepared.description << '\n'
                      << "  dimension " << prepared.model.objective.space.dim() << ", " << cfg.optimizers.size()
                      << " optimizer(s), " << cfg.replicates << " replicate(s)\n";
            for (std::size_t i = 0; i < cfg.optimizers.size(); ++i) {
                // option parsers reject unknown keys and bad values
                const auto opts = cfg.options_for(i);
                const auto& name = cfg.optimizers[i].name;
                if (name == "bat") bat_params_from(opts);
                else if (name == "pso") pso_params_from(opts);
                else if (name == "hs") hs_params_from(opts);
                std::cout << "  " << name << '\n';
            }
            return 0;
        }

        if (*datasets) {
            for (const auto& d : bundled_datasets()) {
                const auto data = d.make();
                std::cout << "bundled:" << d.name << "  grouped-binomial, " << data.rows() << " groups  "
                          << d.description << '\n';
            }
            std::cout << "\nCSV schemas:\n"
                         "  glm               y,x1..xk\n"
                         "  grouped-binomial  y,m,x1..xk\n"
                         "  events            t  (preceded by '# T=<horizon>')\n"
                         "  multistate        id,from,to,sojourn,z1..zp  (to=0 censored)\n";
            return 0;
        }

        if (*demo) {
            if (demo_name == "hawkes") {
                auto cfg = parse_config(hawkes_demo);
                const auto text = run_config(cfg, o, "hawkes");
                return write_output(cfg.output_path, text);
            }
            std::string text;
            std::string path;
            for (const char* name : {"boundary", "interior", "infinity"}) {
                auto cfg = parse_config(williamson_demo);
                cfg.objective.dataset = std::string("bundled:williamson-") + name;
                if (!text.empty()) text += '\n';
                text += "# williamson-" + std::string(name) + '\n';
                text += run_config(cfg, o, std::string("williamson-") + name);
                path = cfg.output_path;
            }
            return write_output(path, text);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
