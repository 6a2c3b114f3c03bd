#include "fwmav/harness.hpp"

#include "fwmav/text.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fwmav {

namespace {

const char* kChannelNames[6] = {"vbx", "vby", "vbz", "wbx", "wby", "wbz"};

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw ConfigError("cannot open for writing: " + tmp.string());
        writer(out);
        out.flush();
        if (!out)
            throw ConfigError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

int controller_index(const std::string& id) { return id == "pid" ? 0 : 1; }

int reference_index(const std::string& id) {
    for (int i = 0; i < 6; ++i)
        if (id == kReferenceIds[i])
            return i;
    return -1;
}

std::uint64_t run_seed(const ExperimentConfig& cfg, const std::string& controller_id,
                       const std::string& reference_id) {
    return cfg.controller.fuzzy.seed * 256 +
           static_cast<std::uint64_t>(controller_index(controller_id)) * 16 +
           static_cast<std::uint64_t>(reference_index(reference_id));
}

void write_trace_files(const SimTrace& trace, const fs::path& csv, const fs::path& meta) {
    atomic_write(csv, [&](std::ostream& out) { save_trace(trace, out); });
    atomic_write(meta, [&](std::ostream& out) { save_trace_meta(trace, out); });
}

} // namespace

fs::path dataset_path(const fs::path& d) { return d / "dataset.csv"; }
fs::path model_path(const fs::path& d) { return d / "model.txt"; }
fs::path identify_report_path(const fs::path& d) { return d / "identify_report.txt"; }
fs::path identify_fit_csv_path(const fs::path& d) { return d / "identification_fit.csv"; }
fs::path trace_path(const fs::path& d, const std::string& c, const std::string& r) {
    return d / ("trace_" + c + "_" + r + ".csv");
}
fs::path trace_meta_path(const fs::path& d, const std::string& c, const std::string& r) {
    return d / ("trace_" + c + "_" + r + ".meta");
}
fs::path report_txt_path(const fs::path& d) { return d / "report.txt"; }
fs::path report_csv_path(const fs::path& d) { return d / "report.csv"; }

fs::path cmd_generate(const ExperimentConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const IoDataset data = generate_training_data(cfg.plant, cfg.excitation.duration,
                                                  cfg.excitation.dt, cfg.excitation.seed);
    const fs::path path = dataset_path(out_dir);
    atomic_write(path, [&](std::ostream& out) { save_dataset(data, out); });
    return path;
}

IdentifyOutputs cmd_identify(const ExperimentConfig& cfg, const fs::path& dataset,
                             const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const IoDataset data = load_dataset(dataset.string());

    FcmConfig fcm;
    fcm.fuzzifier = cfg.identification.fuzzifier;
    fcm.tol = cfg.identification.tol;
    fcm.max_iter = cfg.identification.max_iter;
    fcm.restarts = cfg.identification.restarts;
    fcm.seed = cfg.identification.seed;

    IdentifyOptions options;
    options.rule_add_threshold = cfg.identification.rule_add_threshold;
    options.max_clusters = cfg.identification.max_clusters;

    IdentifyOutputs res;
    TsModel model;
    try {
        model = identify_ts_model(data, cfg.identification.clusters, fcm, options, &res.info);
    } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) +
                           " (try a different [identification] seed or fewer clusters)");
    }

    res.rmse = evaluate_fit(model, data);
    res.channel_std.resize(6);
    for (int ch = 0; ch < 6; ++ch) {
        const double mean = data.outputs.col(ch).mean();
        res.channel_std[ch] = std::sqrt((data.outputs.col(ch).array() - mean).square().mean());
    }

    res.model = model_path(out_dir);
    atomic_write(res.model, [&](std::ostream& out) { save_ts_model(model, out); });

    res.report = identify_report_path(out_dir);
    atomic_write(res.report, [&](std::ostream& out) {
        out << "ts-model identification report\n";
        out << "dataset rows = " << data.inputs.rows() << "\n";
        out << "rules = " << res.info.clusters_used << "\n";
        out << "fcm cost = " << text::num(res.info.fcm_cost) << "\n";
        out << "fcm iterations = " << res.info.fcm_iterations << "\n";
        out << "rank deficient regression = " << (res.info.rank_deficient ? "yes" : "no") << "\n";
        out << "channel rmse std rmse/std\n";
        for (int ch = 0; ch < 6; ++ch) {
            const double frac = res.channel_std[ch] > 0.0 ? res.rmse[ch] / res.channel_std[ch] : 0.0;
            out << kChannelNames[ch] << " " << text::num(res.rmse[ch]) << " "
                << text::num(res.channel_std[ch]) << " " << text::num(frac) << "\n";
        }
    });

    res.fit_csv = identify_fit_csv_path(out_dir);
    atomic_write(res.fit_csv, [&](std::ostream& out) {
        out << "t";
        for (const char* ch : kChannelNames)
            out << "," << ch;
        for (const char* ch : kChannelNames)
            out << "," << ch << "_hat";
        out << "\n";
        for (Index k = 0; k < data.inputs.rows(); ++k) {
            const Vector yhat = infer(data.inputs.row(k).transpose(), model);
            out << text::num(static_cast<double>(k) * data.dt);
            for (int ch = 0; ch < 6; ++ch)
                out << "," << text::num(data.outputs(k, ch));
            for (int ch = 0; ch < 6; ++ch)
                out << "," << text::num(yhat[ch]);
            out << "\n";
        }
    });
    return res;
}

SimTrace run_experiment(const ExperimentConfig& cfg, const TsModel& model,
                        const std::string& controller_id, const std::string& reference_id) {
    if (!is_controller_id(controller_id))
        throw ConfigError("unknown controller '" + controller_id + "' (valid: pid, fuzzy)");
    const ReferenceSignal ref = reference_by_id(cfg.references, reference_id);

    LoopOptions opts;
    opts.derivative_filter = cfg.controller.derivative_filter;
    const std::uint64_t seed = run_seed(cfg, controller_id, reference_id);

    const auto run_with = [&](auto plant) {
        if (controller_id == "pid")
            return closed_loop_run(std::move(plant), make_pid(cfg.controller), ref,
                                   cfg.controller.duration, cfg.controller.dt, seed, opts);
        return closed_loop_run(std::move(plant),
                               AdaptiveFuzzyController(make_fuzzy_config(cfg.controller)), ref,
                               cfg.controller.duration, cfg.controller.dt, seed, opts);
    };

    SimTrace trace = cfg.controller.plant_backend == "surrogate"
                         ? run_with(SurrogatePlant(cfg.plant))
                         : run_with(TsModelPlant(model, cfg.plant.hover_trim));
    trace.meta.controller = controller_id;
    trace.meta.reference = reference_id;
    trace.meta.plant = cfg.controller.plant_backend;
    return trace;
}

RunOutput cmd_run(const ExperimentConfig& cfg, const fs::path& model,
                  const std::string& controller_id, const std::string& reference_id,
                  const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const TsModel ts = load_ts_model(model.string());
    const SimTrace trace = run_experiment(cfg, ts, controller_id, reference_id);

    RunOutput res;
    res.rmse = trace.rmse;
    res.trace = trace_path(out_dir, controller_id, reference_id);
    res.meta = trace_meta_path(out_dir, controller_id, reference_id);
    write_trace_files(trace, res.trace, res.meta);
    return res;
}

ReportOutput cmd_report(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel) {
    fs::create_directories(out_dir);
    if (!fs::exists(dataset_path(out_dir)))
        cmd_generate(cfg, out_dir);
    if (!fs::exists(model_path(out_dir)))
        cmd_identify(cfg, dataset_path(out_dir), out_dir);
    const TsModel model = load_ts_model(model_path(out_dir).string());

    struct Job {
        std::string controller, reference;
    };
    std::vector<Job> missing;
    for (const char* c : kControllerIds)
        for (const char* r : kReferenceIds)
            if (!fs::exists(trace_path(out_dir, c, r)))
                missing.push_back({c, r});

    const auto produce = [&](const Job& job) {
        const SimTrace trace = run_experiment(cfg, model, job.controller, job.reference);
        write_trace_files(trace, trace_path(out_dir, job.controller, job.reference),
                          trace_meta_path(out_dir, job.controller, job.reference));
    };

    if (parallel <= 1 || missing.size() <= 1) {
        for (const Job& job : missing)
            produce(job);
    } else {
        std::atomic<size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        const size_t workers = std::min<size_t>(parallel, missing.size());
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const size_t i = next.fetch_add(1);
                    if (i >= missing.size())
                        return;
                    try {
                        produce(missing[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error)
                            first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (std::thread& t : pool)
            t.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }

    // RMSE cells come from the trace files themselves, cached or fresh.
    ReportOutput res;
    for (int r = 0; r < 6; ++r) {
        res.pid_rmse[r] = load_trace(trace_path(out_dir, "pid", kReferenceIds[r]).string()).rmse;
        res.fuzzy_rmse[r] =
            load_trace(trace_path(out_dir, "fuzzy", kReferenceIds[r]).string()).rmse;
    }

    res.csv = report_csv_path(out_dir);
    atomic_write(res.csv, [&](std::ostream& out) {
        out << "reference,pid_rmse,fuzzy_rmse\n";
        for (int r = 0; r < 6; ++r)
            out << kReferenceIds[r] << "," << text::num(res.pid_rmse[r]) << ","
                << text::num(res.fuzzy_rmse[r]) << "\n";
    });

    res.txt = report_txt_path(out_dir);
    atomic_write(res.txt, [&](std::ostream& out) {
        out << "Altitude tracking RMSE (m) per reference\n\n";
        char line[128];
        std::snprintf(line, sizeof(line), "%-12s %12s %12s\n", "reference", "pid", "fuzzy");
        out << line;
        for (int r = 0; r < 6; ++r) {
            std::snprintf(line, sizeof(line), "%-12s %12.4f %12.4f\n", kReferenceIds[r],
                          res.pid_rmse[r], res.fuzzy_rmse[r]);
            out << line;
        }
    });
    return res;
}

ReportOutput cmd_all(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel) {
    fs::create_directories(out_dir);
    cmd_generate(cfg, out_dir);
    cmd_identify(cfg, dataset_path(out_dir), out_dir);
    for (const char* c : kControllerIds)
        for (const char* r : kReferenceIds)
            if (fs::exists(trace_path(out_dir, c, r)))
                fs::remove(trace_path(out_dir, c, r));
    return cmd_report(cfg, out_dir, parallel);
}

} // namespace fwmav
