#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "solarcast/config.hpp"
#include "solarcast/error.hpp"
#include "solarcast/pipeline.hpp"
#include "solarcast/synth.hpp"

namespace fs = std::filesystem;
using namespace solarcast;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string seeds;
    std::string out;
    std::optional<double> max_missing_frac;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
    auto* opt = cmd->add_option("--config", c.config, "key = value pipeline configuration");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "single training seed");
    cmd->add_option("--seeds", c.seeds, "comma-separated training seeds");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--max-missing-frac", c.max_missing_frac, "repair ceiling before a warning (default 0.04)");
}

pipeline::PipelineConfig load_config(const Common& c) {
    auto kv = KeyValues::load(c.config);
    if (c.seed && !c.seeds.empty()) throw Error("bad_config", "use either --seed or --seeds");
    if (c.seed) kv.set("seeds", std::to_string(*c.seed));
    if (!c.seeds.empty()) kv.set("seeds", c.seeds);
    auto cfg = pipeline::PipelineConfig::from(kv);
    if (!c.out.empty()) cfg.out = c.out;
    if (c.max_missing_frac) cfg.max_missing_frac = *c.max_missing_frac;
    return cfg;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hourly solar radiation forecasting with ARMA, MLP and hybrid predictors"};
    app.require_subcommand(1);

    Common synth_opts, fit_opts, forecast_opts, evaluate_opts, sweep_opts;
    std::string scenario_file;
    auto* synth = app.add_subcommand("synth", "generate a synthetic station data set");
    synth->add_option("--scenario", scenario_file, "scenario file (defaults used when absent)")
        ->check(CLI::ExistingFile);
    synth->add_option("--config", scenario_file, "alias of --scenario")->check(CLI::ExistingFile);
    synth->add_option("--seed", synth_opts.seed, "generator seed");
    synth->add_option("--out", synth_opts.out, "output directory")->required();

    auto* fit = app.add_subcommand("fit", "fit clear-sky, ARMA, MLP and hybrid models");
    add_common(fit, fit_opts, true);
    auto* forecast = app.add_subcommand("forecast", "one-step forecasts over the test block");
    add_common(forecast, forecast_opts, true);
    auto* evaluate = app.add_subcommand("evaluate", "nRMSE tables, reliability and confidence reports");
    add_common(evaluate, evaluate_opts, true);
    auto* sweep = app.add_subcommand("sweep", "hidden-neuron sweep across seeds");
    add_common(sweep, sweep_opts, true);

    std::vector<std::string> tables;
    std::string rank_out;
    std::string ties = "name";
    auto* rank = app.add_subcommand("rank", "seasonal point ranking of predictors");
    rank->add_option("--input", tables, "nrmse_table.csv files (station,season,predictor,nrmse)")
        ->required()
        ->check(CLI::ExistingFile);
    rank->add_option("--out", rank_out, "output directory")->required();
    rank->add_option("--ties", ties, "tie policy: name or shared")->check(CLI::IsMember({"name", "shared"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (synth->parsed()) {
            synth::Scenario sc;
            if (!scenario_file.empty()) {
                std::ifstream in(scenario_file);
                sc = synth::read_scenario(in);
            }
            if (synth_opts.seed) sc.seed = *synth_opts.seed;
            pipeline::cmd_synth(sc, synth_opts.out);
        } else if (fit->parsed()) {
            pipeline::cmd_fit(load_config(fit_opts), &std::cerr);
        } else if (forecast->parsed()) {
            pipeline::cmd_forecast(load_config(forecast_opts), &std::cerr);
        } else if (evaluate->parsed()) {
            pipeline::cmd_evaluate(load_config(evaluate_opts), &std::cerr);
        } else if (sweep->parsed()) {
            pipeline::cmd_sweep(load_config(sweep_opts), &std::cerr);
        } else if (rank->parsed()) {
            std::vector<fs::path> paths(tables.begin(), tables.end());
            pipeline::cmd_rank(paths, rank_out, eval::parse_tie_policy(ties));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.code() << ": " << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}
