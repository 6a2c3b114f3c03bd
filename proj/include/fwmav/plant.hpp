#ifndef FWMAV_PLANT_HPP
#define FWMAV_PLANT_HPP

#include "fwmav/ts_model.hpp"

#include <array>

namespace fwmav {

// --- wing kinematics ------------------------------------------------------

struct WingKinematicsParams {
    double flap_amplitude = 0.0;   // phi_fa, rad
    double flap_frequency = 1.0;   // f, Hz, > 0
    double mean_aoa = 0.0;         // alpha_ma, rad
    double pitch_amplitude = 0.0;  // alpha_0, rad, >= 0
    double pitch_omega = 0.0;      // omega, rad/s
    double phase = 0.0;            // psi, pitch/plunge phase difference, rad
    double dt = 0.01;              // s, > 0
};

// Flapping angle (phi_fa / 2) * cos(pi f t).
double flapping_angle(double t, double flap_amplitude, double flap_frequency);

// Angle of attack alpha_ma - alpha_0 * sin(omega * step_time + psi).
double angle_of_attack(const WingKinematicsParams& params, double step_time);

// --- surrogate dynamics ---------------------------------------------------

// Per-wing flapping amplitude commands in degrees, actuators numbered 1..4.
// Construction clamps each amplitude to the physical [-90, 90] range.
struct ActuatorCommand {
    std::array<double, 4> amplitudes{};

    ActuatorCommand() = default;
    ActuatorCommand(double a1, double a2, double a3, double a4);
    static ActuatorCommand collective(double amplitude);  // same value on all four

    double mean() const;
    double left_right_diff() const;  // mean(a1, a2) - mean(a3, a4)
    double front_back_diff() const;  // mean(a1, a3) - mean(a2, a4)
};

// Body velocities plus integrated altitude.
struct PlantState {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();      // v_bx, v_by, v_bz (m/s)
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();  // w_bx, w_by, w_bz (rad/s)
    double z = 0.0;                                   // altitude, m
    double t = 0.0;                                   // s
};

// First-order velocity channels driven affinely by amplitude asymmetries:
// collective above hover trim climbs, left/right asymmetry rolls, front/back
// asymmetry pitches, and the remaining channels bleed off the rotation rates.
// Channel order everywhere: [v_bx, v_by, v_bz, w_bx, w_by, w_bz].
struct SurrogateParams {
    double thrust_gain = 10.0;  // m/s^2 per degree of collective above trim
    double roll_gain = 0.1;     // rad/s^2 per degree of left/right asymmetry
    double pitch_gain = 0.1;    // rad/s^2 per degree of front/back asymmetry
    double coupling = 0.2;      // rate -> translation bleed-through, 1/s-ish
    double hover_trim = 45.0;   // degrees; all four wings here = level hover
    Eigen::Matrix<double, 6, 1> damping =
        Eigen::Matrix<double, 6, 1>::Constant(50.0);  // 1/s, each > 0
    Eigen::Matrix<double, 6, 1> noise_std =
        Eigen::Matrix<double, 6, 1>::Zero();  // accel noise per channel
};

// One semi-implicit Euler step; damping is handled implicitly so the update
// is stable for any dt > 0. Pass an Rng to enable the seeded accel noise.
PlantState plant_step(const PlantState& state, const ActuatorCommand& cmd,
                      const SurrogateParams& params, double dt, Rng* noise = nullptr);

// Drive the surrogate with four full-range sinusoids (distinct frequencies
// and phases per actuator) and record amplitude/velocity rows every dt.
IoDataset generate_training_data(const SurrogateParams& params, double duration,
                                 double dt, std::uint64_t seed);

// --- closed-loop plant adapters -------------------------------------------

// Shared step contract: step() applies a collective amplitude offset about
// hover trim to all four wings, advances dt, and returns the climb rate used
// to integrate altitude over the step.

class SurrogatePlant {
public:
    explicit SurrogatePlant(const SurrogateParams& params) : params_(params) {}

    void reset(std::uint64_t seed) {
        state_ = PlantState{};
        rng_ = Rng(seed);
    }
    double step(double collective_offset, double dt);
    double altitude() const { return state_.z; }
    const PlantState& state() const { return state_; }

private:
    SurrogateParams params_;
    PlantState state_;
    Rng rng_{0};
};

// Identified model standing in as the plant: its predicted v_bz is integrated
// to altitude, matching how the model was meant to be flown.
class TsModelPlant {
public:
    TsModelPlant(TsModel model, double hover_trim)
        : model_(std::move(model)), trim_(hover_trim) {}

    void reset(std::uint64_t) { z_ = 0.0; }
    double step(double collective_offset, double dt);
    double altitude() const { return z_; }

private:
    TsModel model_;
    double trim_;
    double z_ = 0.0;
};

} // namespace fwmav

#endif // FWMAV_PLANT_HPP
