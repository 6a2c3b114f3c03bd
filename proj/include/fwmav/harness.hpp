#ifndef FWMAV_HARNESS_HPP
#define FWMAV_HARNESS_HPP

#include "fwmav/config.hpp"
#include "fwmav/csv.hpp"

#include <array>
#include <filesystem>
#include <string>

namespace fwmav {

// File-producing pipeline commands. All writes go through a temp file and an
// atomic rename, and every command is deterministic for a fixed config, so
// reruns reproduce outputs byte for byte.

namespace fs = std::filesystem;

// Standard artifact names under the output directory.
fs::path dataset_path(const fs::path& out_dir);
fs::path model_path(const fs::path& out_dir);
fs::path identify_report_path(const fs::path& out_dir);
fs::path identify_fit_csv_path(const fs::path& out_dir);
fs::path trace_path(const fs::path& out_dir, const std::string& controller,
                    const std::string& reference);
fs::path trace_meta_path(const fs::path& out_dir, const std::string& controller,
                         const std::string& reference);
fs::path report_txt_path(const fs::path& out_dir);
fs::path report_csv_path(const fs::path& out_dir);

// Excite the surrogate and write the training dataset CSV.
fs::path cmd_generate(const ExperimentConfig& cfg, const fs::path& out_dir);

// Identify the TS model from a dataset; writes the model file, a per-channel
// fit report and a predicted-vs-actual CSV.
struct IdentifyOutputs {
    fs::path model;
    fs::path report;
    fs::path fit_csv;
    Vector rmse;          // per output channel
    Vector channel_std;   // per output channel
    IdentifyInfo info;
};
IdentifyOutputs cmd_identify(const ExperimentConfig& cfg, const fs::path& dataset,
                             const fs::path& out_dir);

// One closed-loop experiment; writes the trace CSV and its metadata sidecar.
struct RunOutput {
    fs::path trace;
    fs::path meta;
    double rmse = 0.0;
};
RunOutput cmd_run(const ExperimentConfig& cfg, const fs::path& model,
                  const std::string& controller_id, const std::string& reference_id,
                  const fs::path& out_dir);

// RMSE table over all 12 controller/reference pairs. Missing traces are
// produced on demand (reusing the dataset/model artifacts, which are also
// produced if absent); cached traces are left untouched.
struct ReportOutput {
    fs::path txt;
    fs::path csv;
    std::array<double, 6> pid_rmse{};
    std::array<double, 6> fuzzy_rmse{};
};
ReportOutput cmd_report(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel);

// Full pipeline: generate, identify, all twelve runs, report.
ReportOutput cmd_all(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel);

// Run one closed-loop experiment in memory (no files).
SimTrace run_experiment(const ExperimentConfig& cfg, const TsModel& model,
                        const std::string& controller_id, const std::string& reference_id);

} // namespace fwmav

#endif // FWMAV_HARNESS_HPP
