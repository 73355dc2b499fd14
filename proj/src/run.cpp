#include "mlsim/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace mlsim {

OutputTable run_epidemic(const RunConfig& config, const EngineOptions& options, const EpidemicObserver& observer)
{
    EpidemicSimulation sim(config, options);
    OutputTable table;
    table.columns = epidemic_columns();

    const auto& cities = sim.cities();
    const auto initial = sim.census_by_city();
    for (std::size_t c = 0; c < cities.size(); ++c) {
        const auto dt = sim.tree().node(seir_node(c)).integrator->dt;
        const auto& n = initial[c];
        table.rows.push_back({0, coordinator_node(c), cities[c].name,
                              {double(n[0]), double(n[1]), double(n[2]), double(n[3]), 0.0, dt}});
    }

    bool warned = false;
    for (std::int64_t s = 0; s < config.steps; ++s) {
        const auto report = sim.step();
        if (report.single_city && !warned) {
            std::cerr << "mlsim: warning [epidemic]: only one city, agent movement disabled\n";
            warned = true;
        }
        for (const auto& cr : report.cities) {
            const auto& n = cr.after_move;
            table.rows.push_back({report.step, coordinator_node(cr.city), cities[cr.city].name,
                                  {double(n[0]), double(n[1]), double(n[2]), double(n[3]), cr.lockdown ? 1.0 : 0.0,
                                   cr.integrator_dt}});
        }
        if (observer) {
            observer(sim, report);
        }
    }
    return table;
}

OutputTable run_pollution(const RunConfig& config, const std::optional<std::filesystem::path>& exchange_dir,
                          const PollutionObserver& observer)
{
    PollutionSimulation sim(config, exchange_dir);
    OutputTable table;
    table.columns = pollution_columns();

    auto row = [&](std::int64_t step, double total, const FleetCounts& f) {
        table.rows.push_back({step, kGridNode, "grid", {total, double(f[0]), double(f[1]), double(f[2])}});
    };
    row(0, sim.grid().total(), sim.fleet());
    for (std::int64_t s = 0; s < config.steps; ++s) {
        const auto report = sim.step();
        row(report.step, report.total_pollution, report.fleet);
        if (observer) {
            observer(sim, report);
        }
    }
    return table;
}

namespace {

struct CliOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> steps;
    std::optional<std::int64_t> workers;
    std::string out;
    bool plots = false;
    bool exchange_files = false;
};

std::filesystem::path prepare_exchange_dir(const std::filesystem::path& out_dir)
{
    const auto dir = out_dir / "exchange";
    std::filesystem::create_directories(dir);
    // Exchange files are scratch data of a single run.
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("exchange_", 0) == 0 && entry.path().extension() == ".json") {
            std::filesystem::remove(entry.path());
        }
    }
    return dir;
}

int execute(Scenario scenario, const CliOptions& opt, std::ostream& out)
{
    RunConfig config = opt.config.empty() ? default_config(scenario) : parse_config(opt.config);
    if (config.scenario != scenario) {
        throw Error(Errc::SchemaError, "config",
                    "configuration is for the " + std::string(to_string(config.scenario)) + " scenario");
    }
    if (opt.seed) config.master_seed = *opt.seed;
    if (opt.steps) config.steps = *opt.steps;
    if (opt.workers) config.worker_count = *opt.workers;
    if (opt.exchange_files) config.exchange_mode = ExchangeMode::JsonFiles;
    validate(config, opt.config.empty() ? "<defaults>" : opt.config);

    std::filesystem::path out_dir = opt.out;
    if (out_dir.empty()) {
        const char* env = std::getenv("MLSIM_OUT");
        out_dir = env && *env ? env : "mlsim_out";
    }
    std::filesystem::create_directories(out_dir);

    std::optional<std::filesystem::path> exchange_dir;
    if (config.exchange_mode == ExchangeMode::JsonFiles) {
        exchange_dir = prepare_exchange_dir(out_dir);
    }

    const auto table = scenario == Scenario::Epidemic ? run_epidemic(config, EngineOptions{exchange_dir})
                                                      : run_pollution(config, exchange_dir);
    const auto csv = out_dir / "run.csv";
    write_csv(table, csv);
    out << "wrote " << csv.string() << '\n';
    if (opt.plots) {
        for (const auto& p : emit_svg_plots(csv, out_dir / "plots")) {
            out << "wrote " << p.string() << '\n';
        }
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Multilevel epidemic and pollution simulator", "mlsim"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON configuration file");
        sub->add_option("--seed", opt.seed, "master seed (overrides the configuration)");
        sub->add_option("--steps", opt.steps, "number of micro steps")->check(CLI::PositiveNumber);
        sub->add_option("--workers", opt.workers, "worker threads for sibling models")->check(CLI::PositiveNumber);
        sub->add_option("--out", opt.out, "output directory (default: $MLSIM_OUT or ./mlsim_out)");
        sub->add_flag("--plots", opt.plots, "render SVG charts from run.csv");
        sub->add_flag("--exchange-files", opt.exchange_files, "exchange data between levels through JSON files");
    };
    auto* epidemic = app.add_subcommand("epidemic", "multi-city SEIR epidemic with lockdown policies");
    auto* pollution = app.add_subcommand("pollution", "vehicle pollution grid with fleet transition");
    add_common(epidemic);
    add_common(pollution);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << "mlsim: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        return execute(epidemic->parsed() ? Scenario::Epidemic : Scenario::Pollution, opt, out);
    } catch (const Error& e) {
        err << "mlsim: error [" << e.component() << "]: " << e.what() << '\n';
    } catch (const std::filesystem::filesystem_error& e) {
        err << "mlsim: error [io]: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "mlsim: error [runtime]: " << e.what() << '\n';
    }
    return 1;
}

} // namespace mlsim
