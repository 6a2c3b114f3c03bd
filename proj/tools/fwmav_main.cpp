#include "fwmav/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

fwmav::ExperimentConfig load_config(const std::string& config_path, bool seed_set,
                                    std::uint64_t seed) {
    fwmav::ExperimentConfig cfg = config_path.empty()
                                      ? fwmav::default_config()
                                      : fwmav::parse_config_file(config_path);
    if (seed_set)
        fwmav::override_seed(cfg, seed);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"four-wing flapping MAV: surrogate flight data, TS fuzzy model "
                 "identification, and adaptive-fuzzy vs PID altitude tracking"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int parallel = 1;
    app.add_option("--config", config_path, "experiment config file (built-in defaults if omitted)");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--parallel", parallel, "concurrent closed-loop runs for report/all")
        ->capture_default_str();

    auto* config_cmd = app.add_subcommand("config", "print the effective configuration");
    auto* generate = app.add_subcommand("generate", "excite the surrogate plant and write the training dataset");
    auto* identify = app.add_subcommand("identify", "fit the TS fuzzy model from a dataset");
    std::string dataset_opt;
    identify->add_option("--dataset", dataset_opt, "dataset CSV (default: <out>/dataset.csv)");
    auto* run = app.add_subcommand("run", "run one closed-loop tracking experiment");
    std::string controller_id, reference_id, model_opt;
    run->add_option("controller", controller_id, "pid | fuzzy")->required();
    run->add_option("reference", reference_id,
                    "constant | sinusoidal | square | step1 | step2 | step3")->required();
    run->add_option("--model", model_opt, "model file (default: <out>/model.txt)");
    auto* report = app.add_subcommand("report", "RMSE table over all 12 controller/reference pairs");
    auto* all = app.add_subcommand("all", "full pipeline: generate, identify, runs, report");

    try {
        app.parse(argc, argv);

        const fwmav::ExperimentConfig cfg = load_config(config_path, seed_set, seed);
        const fwmav::fs::path out(out_dir);

        if (config_cmd->parsed()) {
            std::cout << fwmav::serialize_config(cfg);
        } else if (generate->parsed()) {
            const auto path = fwmav::cmd_generate(cfg, out);
            std::cout << "dataset: " << path.string() << "\n";
        } else if (identify->parsed()) {
            const fwmav::fs::path dataset =
                dataset_opt.empty() ? fwmav::dataset_path(out) : fwmav::fs::path(dataset_opt);
            const auto res = fwmav::cmd_identify(cfg, dataset, out);
            std::cout << "model: " << res.model.string() << "\n";
            std::cout << "report: " << res.report.string() << "\n";
            for (int ch = 0; ch < 6; ++ch)
                std::cout << "rmse[" << ch << "] = " << res.rmse[ch] << "\n";
        } else if (run->parsed()) {
            const fwmav::fs::path model =
                model_opt.empty() ? fwmav::model_path(out) : fwmav::fs::path(model_opt);
            const auto res = fwmav::cmd_run(cfg, model, controller_id, reference_id, out);
            std::cout << controller_id << " " << reference_id << " rmse = " << res.rmse << "\n";
            std::cout << "trace: " << res.trace.string() << "\n";
        } else if (report->parsed() || all->parsed()) {
            const auto res = all->parsed() ? fwmav::cmd_all(cfg, out, parallel)
                                           : fwmav::cmd_report(cfg, out, parallel);
            std::cout << "report: " << res.txt.string() << "\n";
            for (int r = 0; r < 6; ++r)
                std::cout << fwmav::kReferenceIds[r] << " pid=" << res.pid_rmse[r]
                          << " fuzzy=" << res.fuzzy_rmse[r] << "\n";
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);  // --help
        app.exit(e);
        std::cerr << "error: config: " << e.get_name() << "\n";
        return 1;
    } catch (const fwmav::ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 1;
    } catch (const fwmav::NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 2;
    }
}
