#include "fwmav/plant.hpp"

#include <algorithm>
#include <cmath>

namespace fwmav {

double flapping_angle(double t, double flap_amplitude, double flap_frequency) {
    if (!(flap_frequency > 0.0))
        throw ConfigError("flapping_angle: frequency must be > 0");
    return 0.5 * flap_amplitude * std::cos(M_PI * flap_frequency * t);
}

double angle_of_attack(const WingKinematicsParams& params, double step_time) {
    return params.mean_aoa -
           params.pitch_amplitude * std::sin(params.pitch_omega * step_time + params.phase);
}

namespace {
double clamp_amplitude(double a) { return std::clamp(a, -90.0, 90.0); }
} // namespace

ActuatorCommand::ActuatorCommand(double a1, double a2, double a3, double a4)
    : amplitudes{clamp_amplitude(a1), clamp_amplitude(a2),
                 clamp_amplitude(a3), clamp_amplitude(a4)} {}

ActuatorCommand ActuatorCommand::collective(double amplitude) {
    const double a = clamp_amplitude(amplitude);
    return ActuatorCommand(a, a, a, a);
}

double ActuatorCommand::mean() const {
    return 0.25 * (amplitudes[0] + amplitudes[1] + amplitudes[2] + amplitudes[3]);
}

double ActuatorCommand::left_right_diff() const {
    return 0.5 * (amplitudes[0] + amplitudes[1]) - 0.5 * (amplitudes[2] + amplitudes[3]);
}

double ActuatorCommand::front_back_diff() const {
    return 0.5 * (amplitudes[0] + amplitudes[2]) - 0.5 * (amplitudes[1] + amplitudes[3]);
}

PlantState plant_step(const PlantState& state, const ActuatorCommand& cmd,
                      const SurrogateParams& params, double dt, Rng* noise) {
    if (!(dt > 0.0))
        throw ConfigError("plant_step: dt must be > 0");
    if (!state.v.allFinite() || !state.omega.allFinite() || !std::isfinite(state.z))
        throw NumericError("plant_step: non-finite state at t=" + std::to_string(state.t));

    Eigen::Matrix<double, 6, 1> w = Eigen::Matrix<double, 6, 1>::Zero();
    if (noise)
        for (int i = 0; i < 6; ++i)
            w[i] = params.noise_std[i] * noise->gaussian();

    const auto& d = params.damping;
    PlantState next;
    next.t = state.t + dt;

    // Rates first; the fresh rates drive the translational bleed-through.
    next.omega[0] = (state.omega[0] + dt * (params.roll_gain * cmd.left_right_diff() + w[3])) /
                    (1.0 + dt * d[3]);
    next.omega[1] = (state.omega[1] + dt * (params.pitch_gain * cmd.front_back_diff() + w[4])) /
                    (1.0 + dt * d[4]);
    next.omega[2] = (state.omega[2] +
                     dt * (0.5 * params.coupling * (next.omega[0] - next.omega[1]) + w[5])) /
                    (1.0 + dt * d[5]);

    next.v[0] = (state.v[0] + dt * (params.coupling * next.omega[1] + w[0])) / (1.0 + dt * d[0]);
    next.v[1] = (state.v[1] + dt * (params.coupling * next.omega[0] + w[1])) / (1.0 + dt * d[1]);
    next.v[2] = (state.v[2] + dt * (params.thrust_gain * (cmd.mean() - params.hover_trim) + w[2])) /
                (1.0 + dt * d[2]);

    next.z = state.z + next.v[2] * dt;

    if (!next.v.allFinite() || !next.omega.allFinite() || !std::isfinite(next.z))
        throw NumericError("plant_step: state went non-finite at t=" + std::to_string(next.t));
    return next;
}

IoDataset generate_training_data(const SurrogateParams& params, double duration,
                                 double dt, std::uint64_t seed) {
    if (!(duration > 0.0) || !(dt > 0.0))
        throw ConfigError("generate_training_data: duration and dt must be > 0");

    // Incommensurate low frequencies and staggered phases keep the four
    // amplitude channels from being collinear.
    static constexpr double kFreq[4] = {0.05, 0.07, 0.09, 0.11};
    const Index rows = static_cast<Index>(std::llround(duration / dt)) + 1;

    IoDataset data;
    data.dt = dt;
    data.inputs.resize(rows, 4);
    data.outputs.resize(rows, 6);

    Rng rng(seed);
    PlantState state;
    for (Index k = 0; k < rows; ++k) {
        const double t = static_cast<double>(k) * dt;
        ActuatorCommand cmd(90.0 * std::sin(2.0 * M_PI * kFreq[0] * t + 1.0 * M_PI / 7.0),
                            90.0 * std::sin(2.0 * M_PI * kFreq[1] * t + 2.0 * M_PI / 7.0),
                            90.0 * std::sin(2.0 * M_PI * kFreq[2] * t + 3.0 * M_PI / 7.0),
                            90.0 * std::sin(2.0 * M_PI * kFreq[3] * t + 4.0 * M_PI / 7.0));
        for (int i = 0; i < 4; ++i)
            data.inputs(k, i) = cmd.amplitudes[i];
        data.outputs(k, 0) = state.v[0];
        data.outputs(k, 1) = state.v[1];
        data.outputs(k, 2) = state.v[2];
        data.outputs(k, 3) = state.omega[0];
        data.outputs(k, 4) = state.omega[1];
        data.outputs(k, 5) = state.omega[2];
        if (k + 1 < rows)
            state = plant_step(state, cmd, params, dt, &rng);
    }
    return data;
}

double SurrogatePlant::step(double collective_offset, double dt) {
    const ActuatorCommand cmd = ActuatorCommand::collective(params_.hover_trim + collective_offset);
    state_ = plant_step(state_, cmd, params_, dt, &rng_);
    return state_.v[2];
}

double TsModelPlant::step(double collective_offset, double dt) {
    const ActuatorCommand cmd = ActuatorCommand::collective(trim_ + collective_offset);
    Vector in(4);
    for (int i = 0; i < 4; ++i)
        in[i] = cmd.amplitudes[i];
    const Vector out = infer(in, model_);
    const double vbz = out[2];
    if (!std::isfinite(vbz))
        throw NumericError("ts-model plant: non-finite climb rate");
    z_ += vbz * dt;
    return vbz;
}

} // namespace fwmav
