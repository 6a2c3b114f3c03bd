#ifndef FWMAV_CONFIG_HPP
#define FWMAV_CONFIG_HPP

#include "fwmav/control.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fwmav {

// Experiment configuration: a sectioned key/value text document. Every
// constant that shapes an experiment appears explicitly in the serialized
// form, so edits show up as plain diffs.

struct ExcitationConfig {
    double duration = 100.0;  // s
    double dt = 0.01;         // s
    std::uint64_t seed = 1;

    bool operator==(const ExcitationConfig&) const = default;
};

struct IdentificationConfig {
    int clusters = 3;
    double fuzzifier = 2.0;
    double tol = 1e-6;
    int max_iter = 200;
    int restarts = 1;
    std::uint64_t seed = 7;
    // Rule growth: refit with one more cluster while the FCM cost exceeds
    // this ("inf" disables growth).
    double rule_add_threshold = std::numeric_limits<double>::infinity();
    int max_clusters = 10;
    // Identification quality gate: per-channel RMSE as a fraction of the
    // channel's standard deviation.
    double rmse_frac_threshold = 0.05;

    bool operator==(const IdentificationConfig&) const = default;
};

struct PidGains {
    double kp = 0.0, ki = 0.0, kd = 0.0;

    bool operator==(const PidGains&) const = default;
};

struct FuzzyTuning {
    double e_span = 10.0;
    double de_span = 5.0;
    double eta = 0.5;
    double retune_period = 2.0;  // s
    int window = 500;            // samples
    double width_floor = 0.05;   // retuned MF width floor, fraction of span
    double gain_sign = 1.0;
    std::uint64_t seed = 3;

    bool operator==(const FuzzyTuning&) const = default;
};

struct ControllerConfig {
    std::string plant_backend = "model";  // "model" | "surrogate"
    double duration = 100.0;              // s per closed-loop run
    double dt = 0.01;                     // s
    double u_min = -45.0, u_max = 45.0;   // collective offset limits, degrees
    double derivative_filter = 0.0;       // de low-pass pole, 0 = raw
    PidGains pid;
    FuzzyTuning fuzzy;

    bool operator==(const ControllerConfig&) const = default;
};

struct ReferencesConfig {
    double constant_height = 10.0;  // m
    double sine_amplitude = 1.0;    // m
    double sine_frequency = 1.0;    // Hz
    double square_amplitude = 1.0;  // m
    double square_frequency = 0.1;  // Hz
    double step1_initial = 0.0, step1_jump = 10.0, step1_time = 20.0;
    double step2_initial = 5.0, step2_jump = 5.0, step2_time = 20.0;
    double step3_initial = -5.0, step3_jump = 10.0, step3_time = 20.0;

    bool operator==(const ReferencesConfig&) const = default;
};

struct ExperimentConfig {
    SurrogateParams plant;
    ExcitationConfig excitation;
    IdentificationConfig identification;
    ControllerConfig controller;
    ReferencesConfig references;

    bool operator==(const ExperimentConfig&) const;
};

bool operator==(const SurrogateParams& a, const SurrogateParams& b);

// Shipped defaults (also written out as configs/default.cfg).
ExperimentConfig default_config();

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);

// A single master seed fans out to the excitation, identification and
// controller sub-seeds (used by the CLI's --seed override).
void override_seed(ExperimentConfig& cfg, std::uint64_t seed);

// The six benchmark references in report row order.
extern const char* const kReferenceIds[6];
std::vector<std::pair<std::string, ReferenceSignal>> reference_table(const ReferencesConfig& refs);
ReferenceSignal reference_by_id(const ReferencesConfig& refs, const std::string& id);

extern const char* const kControllerIds[2];  // "pid", "fuzzy"
bool is_controller_id(const std::string& id);

PidState make_pid(const ControllerConfig& cfg);
FuzzyControllerConfig make_fuzzy_config(const ControllerConfig& cfg);

} // namespace fwmav

#endif // FWMAV_CONFIG_HPP
