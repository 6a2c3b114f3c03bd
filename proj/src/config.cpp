#include "fwmav/config.hpp"

#include "fwmav/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fwmav {

bool operator==(const SurrogateParams& a, const SurrogateParams& b) {
    return a.thrust_gain == b.thrust_gain && a.roll_gain == b.roll_gain &&
           a.pitch_gain == b.pitch_gain && a.coupling == b.coupling &&
           a.hover_trim == b.hover_trim &&
           (a.damping.array() == b.damping.array()).all() &&
           (a.noise_std.array() == b.noise_std.array()).all();
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return plant == o.plant && excitation == o.excitation &&
           identification == o.identification && controller == o.controller &&
           references == o.references;
}

const char* const kReferenceIds[6] = {"constant",  "sinusoidal", "square",
                                      "step1",     "step2",      "step3"};
const char* const kControllerIds[2] = {"pid", "fuzzy"};

bool is_controller_id(const std::string& id) { return id == "pid" || id == "fuzzy"; }

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    // PID gains from a coarse grid search minimizing constant-height RMSE
    // (see the comment block serialize_config emits with them).
    cfg.controller.pid = {50.0, 5.0, 0.0};
    return cfg;
}

namespace {

const char* kChannelNames[6] = {"vbx", "vby", "vbz", "wbx", "wby", "wbz"};

int channel_index(const std::string& name) {
    for (int i = 0; i < 6; ++i)
        if (name == kChannelNames[i])
            return i;
    return -1;
}

struct KeyRef {
    ExperimentConfig& cfg;
    const std::string& section;
    const std::string& key;
    const std::string& value;

    std::string where() const { return "[" + section + "] " + key; }
    double d() const { return text::to_double(value, where()); }
    long long i() const { return text::to_int(value, where()); }
    std::uint64_t u() const { return text::to_uint64(value, where()); }
    [[noreturn]] void unknown() const { throw ConfigError("config: unknown key " + where()); }
};

void apply_plant(const KeyRef& k) {
    SurrogateParams& p = k.cfg.plant;
    if (k.key == "thrust_gain") p.thrust_gain = k.d();
    else if (k.key == "roll_gain") p.roll_gain = k.d();
    else if (k.key == "pitch_gain") p.pitch_gain = k.d();
    else if (k.key == "coupling") p.coupling = k.d();
    else if (k.key == "hover_trim") p.hover_trim = k.d();
    else if (k.key == "damping") p.damping.setConstant(k.d());
    else if (k.key == "noise_std") p.noise_std.setConstant(k.d());
    else if (k.key.rfind("damping_", 0) == 0 && channel_index(k.key.substr(8)) >= 0)
        p.damping[channel_index(k.key.substr(8))] = k.d();
    else if (k.key.rfind("noise_std_", 0) == 0 && channel_index(k.key.substr(10)) >= 0)
        p.noise_std[channel_index(k.key.substr(10))] = k.d();
    else k.unknown();
}

void apply_excitation(const KeyRef& k) {
    ExcitationConfig& e = k.cfg.excitation;
    if (k.key == "duration") e.duration = k.d();
    else if (k.key == "dt") e.dt = k.d();
    else if (k.key == "seed") e.seed = k.u();
    else k.unknown();
}

void apply_identification(const KeyRef& k) {
    IdentificationConfig& id = k.cfg.identification;
    if (k.key == "clusters") id.clusters = static_cast<int>(k.i());
    else if (k.key == "fuzzifier") id.fuzzifier = k.d();
    else if (k.key == "tol") id.tol = k.d();
    else if (k.key == "max_iter") id.max_iter = static_cast<int>(k.i());
    else if (k.key == "restarts") id.restarts = static_cast<int>(k.i());
    else if (k.key == "seed") id.seed = k.u();
    else if (k.key == "rule_add_threshold") id.rule_add_threshold = k.d();
    else if (k.key == "max_clusters") id.max_clusters = static_cast<int>(k.i());
    else if (k.key == "rmse_frac_threshold") id.rmse_frac_threshold = k.d();
    else k.unknown();
}

void apply_controller(const KeyRef& k) {
    ControllerConfig& c = k.cfg.controller;
    if (k.key == "plant") c.plant_backend = text::trim(k.value);
    else if (k.key == "duration") c.duration = k.d();
    else if (k.key == "dt") c.dt = k.d();
    else if (k.key == "u_min") c.u_min = k.d();
    else if (k.key == "u_max") c.u_max = k.d();
    else if (k.key == "derivative_filter") c.derivative_filter = k.d();
    else if (k.key == "pid_kp") c.pid.kp = k.d();
    else if (k.key == "pid_ki") c.pid.ki = k.d();
    else if (k.key == "pid_kd") c.pid.kd = k.d();
    else if (k.key == "fuzzy_e_span") c.fuzzy.e_span = k.d();
    else if (k.key == "fuzzy_de_span") c.fuzzy.de_span = k.d();
    else if (k.key == "fuzzy_eta") c.fuzzy.eta = k.d();
    else if (k.key == "fuzzy_retune_period") c.fuzzy.retune_period = k.d();
    else if (k.key == "fuzzy_window") c.fuzzy.window = static_cast<int>(k.i());
    else if (k.key == "fuzzy_width_floor") c.fuzzy.width_floor = k.d();
    else if (k.key == "fuzzy_gain_sign") c.fuzzy.gain_sign = k.d();
    else if (k.key == "fuzzy_seed") c.fuzzy.seed = k.u();
    else k.unknown();
}

void apply_references(const KeyRef& k) {
    ReferencesConfig& r = k.cfg.references;
    if (k.key == "constant_height") r.constant_height = k.d();
    else if (k.key == "sine_amplitude") r.sine_amplitude = k.d();
    else if (k.key == "sine_frequency") r.sine_frequency = k.d();
    else if (k.key == "square_amplitude") r.square_amplitude = k.d();
    else if (k.key == "square_frequency") r.square_frequency = k.d();
    else if (k.key == "step1_initial") r.step1_initial = k.d();
    else if (k.key == "step1_jump") r.step1_jump = k.d();
    else if (k.key == "step1_time") r.step1_time = k.d();
    else if (k.key == "step2_initial") r.step2_initial = k.d();
    else if (k.key == "step2_jump") r.step2_jump = k.d();
    else if (k.key == "step2_time") r.step2_time = k.d();
    else if (k.key == "step3_initial") r.step3_initial = k.d();
    else if (k.key == "step3_jump") r.step3_jump = k.d();
    else if (k.key == "step3_time") r.step3_time = k.d();
    else k.unknown();
}

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg = default_config();
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = text::trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            section = text::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = text::trim(line.substr(0, eq));
        const std::string value = text::trim(line.substr(eq + 1));
        KeyRef k{cfg, section, key, value};
        if (section == "plant") apply_plant(k);
        else if (section == "excitation") apply_excitation(k);
        else if (section == "identification") apply_identification(k);
        else if (section == "controller") apply_controller(k);
        else if (section == "references") apply_references(k);
        else throw ConfigError("config line " + std::to_string(line_no) +
                               ": unknown section [" + section + "]");
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open: " + path);
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    const auto n = [](double v) { return text::num(v); };

    out << "# fwmav experiment configuration\n";
    out << "# units: amplitudes deg, velocities m/s, rates rad/s, altitude m, time s\n\n";

    out << "[plant]\n";
    out << "thrust_gain = " << n(cfg.plant.thrust_gain) << "\n";
    out << "roll_gain = " << n(cfg.plant.roll_gain) << "\n";
    out << "pitch_gain = " << n(cfg.plant.pitch_gain) << "\n";
    out << "coupling = " << n(cfg.plant.coupling) << "\n";
    out << "hover_trim = " << n(cfg.plant.hover_trim) << "\n";
    for (int i = 0; i < 6; ++i)
        out << "damping_" << kChannelNames[i] << " = " << n(cfg.plant.damping[i]) << "\n";
    for (int i = 0; i < 6; ++i)
        out << "noise_std_" << kChannelNames[i] << " = " << n(cfg.plant.noise_std[i]) << "\n";

    out << "\n[excitation]\n";
    out << "duration = " << n(cfg.excitation.duration) << "\n";
    out << "dt = " << n(cfg.excitation.dt) << "\n";
    out << "seed = " << cfg.excitation.seed << "\n";

    out << "\n[identification]\n";
    out << "clusters = " << cfg.identification.clusters << "\n";
    out << "fuzzifier = " << n(cfg.identification.fuzzifier) << "\n";
    out << "tol = " << n(cfg.identification.tol) << "\n";
    out << "max_iter = " << cfg.identification.max_iter << "\n";
    out << "restarts = " << cfg.identification.restarts << "\n";
    out << "seed = " << cfg.identification.seed << "\n";
    out << "rule_add_threshold = " << n(cfg.identification.rule_add_threshold) << "\n";
    out << "max_clusters = " << cfg.identification.max_clusters << "\n";
    out << "rmse_frac_threshold = " << n(cfg.identification.rmse_frac_threshold) << "\n";

    out << "\n[controller]\n";
    out << "plant = " << cfg.controller.plant_backend << "\n";
    out << "duration = " << n(cfg.controller.duration) << "\n";
    out << "dt = " << n(cfg.controller.dt) << "\n";
    out << "u_min = " << n(cfg.controller.u_min) << "\n";
    out << "u_max = " << n(cfg.controller.u_max) << "\n";
    out << "derivative_filter = " << n(cfg.controller.derivative_filter) << "\n";
    out << "# PID gains from a coarse grid search minimizing RMSE on the constant\n";
    out << "# reference: kp in {1,2,5,10,20,30,50}, ki in {0,0.1,0.5,1,2,5},\n";
    out << "# kd in {0,1,2,4,6,10,15}.\n";
    out << "pid_kp = " << n(cfg.controller.pid.kp) << "\n";
    out << "pid_ki = " << n(cfg.controller.pid.ki) << "\n";
    out << "pid_kd = " << n(cfg.controller.pid.kd) << "\n";
    out << "fuzzy_e_span = " << n(cfg.controller.fuzzy.e_span) << "\n";
    out << "fuzzy_de_span = " << n(cfg.controller.fuzzy.de_span) << "\n";
    out << "fuzzy_eta = " << n(cfg.controller.fuzzy.eta) << "\n";
    out << "fuzzy_retune_period = " << n(cfg.controller.fuzzy.retune_period) << "\n";
    out << "fuzzy_window = " << cfg.controller.fuzzy.window << "\n";
    out << "fuzzy_width_floor = " << n(cfg.controller.fuzzy.width_floor) << "\n";
    out << "fuzzy_gain_sign = " << n(cfg.controller.fuzzy.gain_sign) << "\n";
    out << "fuzzy_seed = " << cfg.controller.fuzzy.seed << "\n";

    out << "\n[references]\n";
    out << "constant_height = " << n(cfg.references.constant_height) << "\n";
    out << "sine_amplitude = " << n(cfg.references.sine_amplitude) << "\n";
    out << "sine_frequency = " << n(cfg.references.sine_frequency) << "\n";
    out << "square_amplitude = " << n(cfg.references.square_amplitude) << "\n";
    out << "square_frequency = " << n(cfg.references.square_frequency) << "\n";
    out << "step1_initial = " << n(cfg.references.step1_initial) << "\n";
    out << "step1_jump = " << n(cfg.references.step1_jump) << "\n";
    out << "step1_time = " << n(cfg.references.step1_time) << "\n";
    out << "step2_initial = " << n(cfg.references.step2_initial) << "\n";
    out << "step2_jump = " << n(cfg.references.step2_jump) << "\n";
    out << "step2_time = " << n(cfg.references.step2_time) << "\n";
    out << "step3_initial = " << n(cfg.references.step3_initial) << "\n";
    out << "step3_jump = " << n(cfg.references.step3_jump) << "\n";
    out << "step3_time = " << n(cfg.references.step3_time) << "\n";
    return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("config: " + field + " " + why);
    };
    if ((cfg.plant.damping.array() <= 0.0).any())
        fail("[plant] damping", "must be > 0 on every channel");
    if ((cfg.plant.noise_std.array() < 0.0).any())
        fail("[plant] noise_std", "must be >= 0");
    if (!(cfg.plant.hover_trim > 0.0) || cfg.plant.hover_trim > 90.0)
        fail("[plant] hover_trim", "must lie in (0, 90]");
    if (!(cfg.excitation.duration > 0.0))
        fail("[excitation] duration", "must be > 0");
    if (!(cfg.excitation.dt > 0.0))
        fail("[excitation] dt", "must be > 0");
    if (cfg.identification.clusters < 1)
        fail("[identification] clusters", "must be >= 1");
    if (!(cfg.identification.fuzzifier > 1.0))
        fail("[identification] fuzzifier", "must be > 1");
    if (!(cfg.identification.tol > 0.0))
        fail("[identification] tol", "must be > 0");
    if (cfg.identification.max_iter < 1)
        fail("[identification] max_iter", "must be >= 1");
    if (cfg.identification.restarts < 1)
        fail("[identification] restarts", "must be >= 1");
    if (cfg.identification.max_clusters < cfg.identification.clusters)
        fail("[identification] max_clusters", "must be >= clusters");
    if (cfg.controller.plant_backend != "model" && cfg.controller.plant_backend != "surrogate")
        fail("[controller] plant", "must be 'model' or 'surrogate'");
    if (!(cfg.controller.duration > 0.0))
        fail("[controller] duration", "must be > 0");
    if (!(cfg.controller.dt > 0.0))
        fail("[controller] dt", "must be > 0");
    if (!(cfg.controller.u_max > cfg.controller.u_min))
        fail("[controller] u_max", "must exceed u_min");
    if (cfg.controller.derivative_filter < 0.0 || cfg.controller.derivative_filter >= 1.0)
        fail("[controller] derivative_filter", "must lie in [0, 1)");
    if (!(cfg.controller.fuzzy.e_span > 0.0) || !(cfg.controller.fuzzy.de_span > 0.0))
        fail("[controller] fuzzy spans", "must be > 0");
    if (!(cfg.controller.fuzzy.retune_period > 0.0))
        fail("[controller] fuzzy_retune_period", "must be > 0");
    if (cfg.controller.fuzzy.window < 0)
        fail("[controller] fuzzy_window", "must be >= 0");
    if (cfg.controller.fuzzy.width_floor < 0.0 || cfg.controller.fuzzy.width_floor > 1.0)
        fail("[controller] fuzzy_width_floor", "must lie in [0, 1]");
    if (cfg.controller.fuzzy.gain_sign != 1.0 && cfg.controller.fuzzy.gain_sign != -1.0)
        fail("[controller] fuzzy_gain_sign", "must be +1 or -1");
    if (!(cfg.references.sine_frequency > 0.0))
        fail("[references] sine_frequency", "must be > 0");
    if (!(cfg.references.square_frequency > 0.0))
        fail("[references] square_frequency", "must be > 0");
}

void override_seed(ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.excitation.seed = seed;
    cfg.identification.seed = seed + 1;
    cfg.controller.fuzzy.seed = seed + 2;
}

std::vector<std::pair<std::string, ReferenceSignal>>
reference_table(const ReferencesConfig& r) {
    return {
        {"constant", ReferenceSignal::constant(r.constant_height)},
        {"sinusoidal", ReferenceSignal::sine(r.sine_amplitude, r.sine_frequency)},
        {"square", ReferenceSignal::square(r.square_amplitude, r.square_frequency)},
        {"step1", ReferenceSignal::step(r.step1_initial, r.step1_jump, r.step1_time)},
        {"step2", ReferenceSignal::step(r.step2_initial, r.step2_jump, r.step2_time)},
        {"step3", ReferenceSignal::step(r.step3_initial, r.step3_jump, r.step3_time)},
    };
}

ReferenceSignal reference_by_id(const ReferencesConfig& refs, const std::string& id) {
    for (const auto& [name, ref] : reference_table(refs))
        if (name == id)
            return ref;
    std::string valid;
    for (const char* r : kReferenceIds)
        valid += std::string(valid.empty() ? "" : ", ") + r;
    throw ConfigError("unknown reference '" + id + "' (valid: " + valid + ")");
}

PidState make_pid(const ControllerConfig& cfg) {
    PidState pid;
    pid.kp = cfg.pid.kp;
    pid.ki = cfg.pid.ki;
    pid.kd = cfg.pid.kd;
    pid.u_min = cfg.u_min;
    pid.u_max = cfg.u_max;
    return pid;
}

FuzzyControllerConfig make_fuzzy_config(const ControllerConfig& cfg) {
    FuzzyControllerConfig f;
    f.e_span = cfg.fuzzy.e_span;
    f.de_span = cfg.fuzzy.de_span;
    f.eta = cfg.fuzzy.eta;
    f.retune_period = cfg.fuzzy.retune_period;
    f.window = static_cast<std::size_t>(cfg.fuzzy.window);
    f.width_floor = cfg.fuzzy.width_floor;
    f.u_min = cfg.u_min;
    f.u_max = cfg.u_max;
    f.gain_sign = cfg.fuzzy.gain_sign;
    f.seed = cfg.fuzzy.seed;
    return f;
}

} // namespace fwmav
