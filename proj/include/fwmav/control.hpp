#ifndef FWMAV_CONTROL_HPP
#define FWMAV_CONTROL_HPP

#include "fwmav/plant.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace fwmav {

// --- reference trajectories -------------------------------------------------

struct ReferenceSignal {
    enum class Kind { Constant, Sine, Square, Step };

    Kind kind = Kind::Constant;
    double amplitude = 0.0;    // constant level / sine amplitude / square amplitude
    double frequency = 0.0;    // Hz, sine and square
    double initial = 0.0;      // step: level applied from t = 0
    double jump = 0.0;         // step: increment added at switch_time
    double switch_time = 0.0;  // s

    static ReferenceSignal constant(double level);
    static ReferenceSignal sine(double amplitude, double frequency);
    static ReferenceSignal square(double amplitude, double frequency);
    static ReferenceSignal step(double initial, double jump, double switch_time);

    bool operator==(const ReferenceSignal&) const = default;
};

// Value at time t. Square waves start high: +A on [0, P/2), -A on [P/2, P).
// Unit steps are closed on the left, u(0) = 1.
double reference_value(const ReferenceSignal& ref, double t);

// --- PID baseline -----------------------------------------------------------

struct PidState {
    double kp = 0.0, ki = 0.0, kd = 0.0;
    double u_min = -45.0, u_max = 45.0;  // degrees of collective offset
    double integral = 0.0;               // m*s
    double prev_error = 0.0;
    bool primed = false;

    double step(double e, double /*de*/, double dt);  // loop-runner adapter
};

// One PID update. The integral freezes while the output is clamped and its
// stored magnitude never exceeds (u_max - u_min) / max(ki, 1e-12).
double pid_step(PidState& state, double error, double dt);

// --- adaptive fuzzy controller -----------------------------------------------

struct FuzzyControllerConfig {
    double e_span = 10.0;         // initial MF centers cover [-e_span, e_span] m
    double de_span = 5.0;         // and [-de_span, de_span] m/s
    double eta = 0.5;             // consequent learning rate
    double retune_period = 2.0;   // s between FCM retunes of the antecedents
    std::size_t window = 500;     // sliding (e, de) sample window capacity
    double width_floor = 0.05;    // retuned MF width floor, fraction of the span
    double u_min = -45.0, u_max = 45.0;
    double gain_sign = 1.0;       // sign of d(climb rate)/d(command)
    std::uint64_t seed = 0;       // seeds the retune clustering

    bool operator==(const FuzzyControllerConfig&) const = default;
};

// 25-rule zero-order TS controller on (error, error rate): five Gaussian MFs
// per input, product AND, weighted-average output. Consequents learn by
// signed gradient steps on the tracking error; antecedents are periodically
// re-centered by clustering the recent samples.
class AdaptiveFuzzyController {
public:
    static constexpr int kMfCount = 5;
    static constexpr int kRuleCount = kMfCount * kMfCount;

    explicit AdaptiveFuzzyController(const FuzzyControllerConfig& cfg = {});

    const FuzzyControllerConfig& config() const { return cfg_; }
    const std::array<GaussianMf, kMfCount>& error_mfs() const { return mfs_e_; }
    const std::array<GaussianMf, kMfCount>& error_rate_mfs() const { return mfs_de_; }
    const std::array<double, kRuleCount>& consequents() const { return consequents_; }
    std::size_t window_size() const { return window_.size(); }

    // Rule firing strengths, rule (j, k) -> index j * 5 + k.
    std::array<double, kRuleCount> firing(double e, double de) const;

    // Rule whose MF centers are closest (width-relative) to the sample.
    int nearest_rule(double e, double de) const;

    double step(double e, double de, double dt);  // output + adapt, for the loop runner

private:
    friend double fuzzy_control_output(const AdaptiveFuzzyController&, double, double);
    friend void adapt(AdaptiveFuzzyController&, double, double, double, double, double);

    void push_sample(double e, double de);
    void retune_input(const std::vector<double>& samples, double span,
                      std::array<GaussianMf, kMfCount>& mfs);

    FuzzyControllerConfig cfg_;
    std::array<GaussianMf, kMfCount> mfs_e_;
    std::array<GaussianMf, kMfCount> mfs_de_;
    std::array<double, kRuleCount> consequents_{};

    std::vector<std::pair<double, double>> window_;
    std::size_t window_head_ = 0;
    double time_since_retune_ = 0.0;
    std::uint64_t retune_count_ = 0;
};

// Weighted-average rule output clamped to the configured limits.
double fuzzy_control_output(const AdaptiveFuzzyController& ctrl, double e, double de);

// One adaptation step: per-step consequent gradient update (frozen while the
// output sits pinned at a limit with the error still pushing outward; crisp
// nearest-rule assignment when every firing strength underflows), plus a
// periodic FCM retune of both antecedent families over the sample window.
// Retunes are skipped while the window holds fewer than 5 * kMfCount samples.
void adapt(AdaptiveFuzzyController& ctrl, double e, double de, double u_applied,
           double gain_sign, double dt);

// --- closed-loop simulation ---------------------------------------------------

struct TraceMeta {
    std::string controller;
    std::string reference;
    std::string plant;
    std::uint64_t seed = 0;
    double dt = 0.0;
};

struct SimTrace {
    std::vector<double> t, ref, z, e, u, vbz;
    double rmse = 0.0;
    TraceMeta meta;
};

double compute_rmse(const SimTrace& trace);

struct LoopOptions {
    double derivative_filter = 0.0;  // first-order filter pole for de; 0 = raw
};

// Run reference tracking: e = ref - z, de by backward difference (zero at the
// first step), the controller output is a collective amplitude offset applied
// to all four wings. Plant and controller are taken by value; a run owns its
// state and can execute concurrently with other runs.
template <class Plant, class Controller>
SimTrace closed_loop_run(Plant plant, Controller controller, const ReferenceSignal& ref,
                         double duration, double dt, std::uint64_t seed,
                         const LoopOptions& options = {}) {
    if (!(duration > 0.0) || !(dt > 0.0))
        throw ConfigError("closed_loop_run: duration and dt must be > 0");

    const long steps = std::llround(duration / dt);
    SimTrace trace;
    trace.meta.seed = seed;
    trace.meta.dt = dt;
    trace.t.reserve(steps);
    trace.ref.reserve(steps);
    trace.z.reserve(steps);
    trace.e.reserve(steps);
    trace.u.reserve(steps);
    trace.vbz.reserve(steps);

    plant.reset(seed);
    double e_prev = 0.0;
    double de_filtered = 0.0;
    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double r = reference_value(ref, t);
        const double z = plant.altitude();
        if (!std::isfinite(z))
            throw NumericError("closed_loop_run: altitude non-finite at t=" + std::to_string(t));
        const double e = r - z;
        const double de_raw = (k == 0) ? 0.0 : (e - e_prev) / dt;
        de_filtered = options.derivative_filter * de_filtered +
                      (1.0 - options.derivative_filter) * de_raw;
        const double u = controller.step(e, de_filtered, dt);
        const double vbz = plant.step(u, dt);

        trace.t.push_back(t);
        trace.ref.push_back(r);
        trace.z.push_back(z);
        trace.e.push_back(e);
        trace.u.push_back(u);
        trace.vbz.push_back(vbz);
        e_prev = e;
    }
    trace.rmse = compute_rmse(trace);
    return trace;
}

} // namespace fwmav

#endif // FWMAV_CONTROL_HPP
