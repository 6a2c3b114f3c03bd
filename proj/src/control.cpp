#include "fwmav/control.hpp"

#include <algorithm>
#include <numeric>

namespace fwmav {

// --- references -------------------------------------------------------------

ReferenceSignal ReferenceSignal::constant(double level) {
    ReferenceSignal r;
    r.kind = Kind::Constant;
    r.amplitude = level;
    return r;
}

ReferenceSignal ReferenceSignal::sine(double amplitude, double frequency) {
    ReferenceSignal r;
    r.kind = Kind::Sine;
    r.amplitude = amplitude;
    r.frequency = frequency;
    return r;
}

ReferenceSignal ReferenceSignal::square(double amplitude, double frequency) {
    ReferenceSignal r;
    r.kind = Kind::Square;
    r.amplitude = amplitude;
    r.frequency = frequency;
    return r;
}

ReferenceSignal ReferenceSignal::step(double initial, double jump, double switch_time) {
    ReferenceSignal r;
    r.kind = Kind::Step;
    r.initial = initial;
    r.jump = jump;
    r.switch_time = switch_time;
    return r;
}

double reference_value(const ReferenceSignal& ref, double t) {
    switch (ref.kind) {
    case ReferenceSignal::Kind::Constant:
        return ref.amplitude;
    case ReferenceSignal::Kind::Sine:
        if (!(ref.frequency > 0.0))
            throw ConfigError("reference: sine frequency must be > 0");
        return ref.amplitude * std::sin(2.0 * M_PI * ref.frequency * t);
    case ReferenceSignal::Kind::Square: {
        if (!(ref.frequency > 0.0))
            throw ConfigError("reference: square frequency must be > 0");
        const double cycles = t * ref.frequency;
        const double phase = cycles - std::floor(cycles);
        return phase < 0.5 ? ref.amplitude : -ref.amplitude;
    }
    case ReferenceSignal::Kind::Step:
        return ref.initial + (t >= ref.switch_time ? ref.jump : 0.0);
    }
    throw ConfigError("reference: unknown kind");
}

// --- PID ---------------------------------------------------------------------

double pid_step(PidState& s, double error, double dt) {
    if (!(dt > 0.0))
        throw ConfigError("pid_step: dt must be > 0");

    double derivative = 0.0;
    if (s.primed)
        derivative = (error - s.prev_error) / dt;
    s.primed = true;
    s.prev_error = error;

    const double integral_candidate = s.integral + error * dt;
    double u = s.kp * error + s.ki * integral_candidate + s.kd * derivative;
    if (u > s.u_max) {
        u = s.u_max;  // integral frozen while clamped
    } else if (u < s.u_min) {
        u = s.u_min;
    } else {
        s.integral = integral_candidate;
    }
    const double bound = (s.u_max - s.u_min) / std::max(s.ki, 1e-12);
    s.integral = std::clamp(s.integral, -bound, bound);
    return u;
}

double PidState::step(double e, double /*de*/, double dt) { return pid_step(*this, e, dt); }

// --- adaptive fuzzy controller -------------------------------------------------

namespace {

std::array<GaussianMf, AdaptiveFuzzyController::kMfCount> spread_mfs(double span) {
    if (!(span > 0.0))
        throw ConfigError("fuzzy controller: MF span must be > 0");
    std::array<GaussianMf, AdaptiveFuzzyController::kMfCount> mfs;
    const double spacing = 2.0 * span / (AdaptiveFuzzyController::kMfCount - 1);
    for (int i = 0; i < AdaptiveFuzzyController::kMfCount; ++i)
        mfs[i] = {-span + i * spacing, 0.5 * spacing};
    return mfs;
}

} // namespace

AdaptiveFuzzyController::AdaptiveFuzzyController(const FuzzyControllerConfig& cfg)
    : cfg_(cfg), mfs_e_(spread_mfs(cfg.e_span)), mfs_de_(spread_mfs(cfg.de_span)) {
    if (!(cfg.u_max > cfg.u_min))
        throw ConfigError("fuzzy controller: u_max must exceed u_min");
    window_.reserve(cfg_.window);
}

int AdaptiveFuzzyController::nearest_rule(double e, double de) const {
    const auto nearest = [](double x, const std::array<GaussianMf, kMfCount>& mfs) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kMfCount; ++i) {
            const double d = std::abs(x - mfs[i].center) / mfs[i].width;
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    };
    return nearest(e, mfs_e_) * kMfCount + nearest(de, mfs_de_);
}

std::array<double, AdaptiveFuzzyController::kRuleCount>
AdaptiveFuzzyController::firing(double e, double de) const {
    std::array<double, kMfCount> ge, gde;
    for (int i = 0; i < kMfCount; ++i) {
        ge[i] = mf_degree(e, mfs_e_[i]);
        gde[i] = mf_degree(de, mfs_de_[i]);
    }
    std::array<double, kRuleCount> w;
    for (int j = 0; j < kMfCount; ++j)
        for (int k = 0; k < kMfCount; ++k)
            w[j * kMfCount + k] = ge[j] * gde[k];
    return w;
}

double fuzzy_control_output(const AdaptiveFuzzyController& ctrl, double e, double de) {
    const auto w = ctrl.firing(e, de);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double y;
    if (total < 1e-300) {
        y = std::accumulate(ctrl.consequents_.begin(), ctrl.consequents_.end(), 0.0) /
            AdaptiveFuzzyController::kRuleCount;
    } else {
        double num = 0.0;
        for (int i = 0; i < AdaptiveFuzzyController::kRuleCount; ++i)
            num += w[i] * ctrl.consequents_[i];
        y = num / total;
    }
    return std::clamp(y, ctrl.cfg_.u_min, ctrl.cfg_.u_max);
}

void AdaptiveFuzzyController::push_sample(double e, double de) {
    if (cfg_.window == 0)
        return;
    if (window_.size() < cfg_.window) {
        window_.emplace_back(e, de);
    } else {
        window_[window_head_] = {e, de};
        window_head_ = (window_head_ + 1) % cfg_.window;
    }
}

void AdaptiveFuzzyController::retune_input(const std::vector<double>& samples, double span,
                                           std::array<GaussianMf, kMfCount>& mfs) {
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double range = *hi_it - *lo_it;
    if (!(range > 0.0))
        return;  // nothing to spread the clusters over

    Matrix data(static_cast<Index>(samples.size()), 1);
    for (size_t j = 0; j < samples.size(); ++j)
        data(static_cast<Index>(j), 0) = samples[j];

    FcmConfig cfg;
    cfg.clusters = kMfCount;
    cfg.fuzzifier = 2.0;
    cfg.tol = 1e-6;
    cfg.max_iter = 200;
    cfg.seed = cfg_.seed + retune_count_;

    FcmModel fit;
    try {
        fit = fcm_fit(data, cfg);
    } catch (const NumericError&) {
        return;  // degenerate window, keep the current antecedents
    }

    std::array<std::pair<double, double>, kMfCount> tuned;  // (center, width)
    // The span-relative term keeps the rule base from collapsing onto a
    // quiet band and going blind to the next setpoint change.
    const double floor = std::max(1e-3 * range, cfg_.width_floor * span);
    for (int i = 0; i < kMfCount; ++i) {
        const double center = fit.centers(i, 0);
        const Vector mu = fit.partition.row(i).transpose();
        const double mass = mu.sum();
        double width = floor;
        if (mass > 0.0) {
            const double var =
                (mu.array() * (data.col(0).array() - center).square()).sum() / mass;
            width = std::max(std::sqrt(var), floor);
        }
        tuned[i] = {center, width};
    }
    std::sort(tuned.begin(), tuned.end());
    for (int i = 1; i < kMfCount; ++i)
        if (tuned[i].first <= tuned[i - 1].first)
            tuned[i].first = tuned[i - 1].first + 1e-9 * i;
    for (int i = 0; i < kMfCount; ++i)
        mfs[i] = {tuned[i].first, tuned[i].second};
}

void adapt(AdaptiveFuzzyController& ctrl, double e, double de, double u_applied,
           double gain_sign, double dt) {
    if (!(dt > 0.0))
        throw ConfigError("adapt: dt must be > 0");

    // (a) consequent gradient step. The update direction is gain_sign * e;
    // while the output is pinned at a limit and the error keeps pushing it
    // outward, hold the consequents to avoid winding them up. When the whole
    // rule base underflows (inputs far outside every MF) the sample is
    // assigned crisply to the nearest rule, mirroring the clustering
    // convention for coincident points.
    const double push = gain_sign * e;
    const bool pinned = (u_applied >= ctrl.cfg_.u_max && push > 0.0) ||
                        (u_applied <= ctrl.cfg_.u_min && push < 0.0);
    if (!pinned) {
        const auto w = ctrl.firing(e, de);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        if (total >= 1e-300) {
            for (int i = 0; i < AdaptiveFuzzyController::kRuleCount; ++i)
                ctrl.consequents_[i] += ctrl.cfg_.eta * push * w[i] / total;
        } else {
            ctrl.consequents_[ctrl.nearest_rule(e, de)] += ctrl.cfg_.eta * push;
        }
    }

    ctrl.push_sample(e, de);

    // (b) periodic antecedent retune from the window; consequents carry over.
    ctrl.time_since_retune_ += dt;
    if (ctrl.time_since_retune_ + 1e-12 < ctrl.cfg_.retune_period)
        return;
    ctrl.time_since_retune_ = 0.0;
    if (ctrl.window_.size() <
        static_cast<std::size_t>(5 * AdaptiveFuzzyController::kMfCount))
        return;  // too few samples, skip this retune

    std::vector<double> es(ctrl.window_.size()), des(ctrl.window_.size());
    for (size_t j = 0; j < ctrl.window_.size(); ++j) {
        es[j] = ctrl.window_[j].first;
        des[j] = ctrl.window_[j].second;
    }
    ctrl.retune_input(es, ctrl.cfg_.e_span, ctrl.mfs_e_);
    ctrl.retune_input(des, ctrl.cfg_.de_span, ctrl.mfs_de_);
    ++ctrl.retune_count_;
}

double AdaptiveFuzzyController::step(double e, double de, double dt) {
    const double u = fuzzy_control_output(*this, e, de);
    adapt(*this, e, de, u, cfg_.gain_sign, dt);
    return u;
}

// --- metrics -------------------------------------------------------------------

double compute_rmse(const SimTrace& trace) {
    if (trace.e.empty())
        throw ConfigError("compute_rmse: empty trace");
    double acc = 0.0;
    for (double e : trace.e)
        acc += e * e;
    return std::sqrt(acc / static_cast<double>(trace.e.size()));
}

} // namespace fwmav
